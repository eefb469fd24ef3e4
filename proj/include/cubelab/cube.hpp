#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cubelab/orthopoly.hpp"
#include "cubelab/radical.hpp"
#include "cubelab/rational.hpp"

namespace cubelab {

enum class Parity { even, odd, none };

// Noise rate bundle: sigma in (0, 1/2) is the bit-flip probability,
// rho = 1 - 2 sigma the Fourier damping factor.
struct NoiseParam {
    Rat sigma;
    Rat rho;

    static NoiseParam from_sigma(const Rat& sigma);
    static NoiseParam from_rho(const Rat& rho);
};

// A symmetric function on {+-1}^n in exact rational arithmetic.
//
// Internally the level-d coefficient on the orthonormal mode Psi_{d,n} is
// carried as a (rational, radical) pair b_d = c_d * sqrt(C(n,d)); the
// rational parts c_d are the stored "reduced levels". Every quantity this
// library derives from them (profile values, inner products, Parseval sums,
// noise damping) is again exact rational because the radical squares out.
//
// The Hamming profile v_d is the value at any point with d coordinates equal
// to -1 (so the coordinate sum is s = n - 2d). Both representations are
// materialized at construction; instances are immutable.
class SymmetricFn {
public:
    static SymmetricFn from_reduced_levels(int n, std::vector<Rat> reduced);
    static SymmetricFn from_values(int n, std::vector<Rat> values);

    int n() const { return n_; }
    const std::vector<Rat>& reduced_levels() const { return reduced_; }
    const std::vector<Rat>& values() const { return values_; }

    // b_d as an exact radical value c_d * sqrt(C(n,d)).
    Radical level(int d) const;
    const Rat& reduced_level(int d) const { return reduced_.at(d); }
    const Rat& value(int d) const { return values_.at(d); }

    Parity parity() const;

    // ||f||_2^2 = sum_d b_d^2 = sum_d c_d^2 C(n,d)
    Rat norm2_sq() const;
    // E|f| under the uniform measure
    Rat l1_norm() const;

    nlohmann::ordered_json to_json() const;
    static SymmetricFn from_json(const nlohmann::json& j);

private:
    SymmetricFn(int n, std::vector<Rat> reduced, std::vector<Rat> values)
        : n_(n), reduced_(std::move(reduced)), values_(std::move(values)) {}

    int n_;
    std::vector<Rat> reduced_;
    std::vector<Rat> values_;
};

// Psi_{d,n} at any point with coordinate sum s (s = n mod 2 required);
// exact value as (rational) * sqrt(C(n,d)).
Radical psi_mode_value(int d, int n, int s);

// T_rho in the level representation: b_d <- rho^d b_d.
SymmetricFn noise_apply(const Rat& rho, const SymmetricFn& f);

// T_rho from the probabilistic definition, by exact expectation over flip
// patterns (grouped by overlap counts). Independent of the level formula;
// used as an oracle in tests.
SymmetricFn noise_apply_flip_oracle(const Rat& rho, const SymmetricFn& f);

// Level expansion of Maj_n, n odd: only odd levels are populated and
// sum_d b_d^2 = 1 exactly.
SymmetricFn majority_levels(int n);

// Exact level coefficients of a symmetric truth-table by full 2^n
// enumeration with per-point elementary symmetric sums; the independent
// oracle for everything else in this header. The callable receives a bitmask
// whose set bits mark coordinates equal to -1 and must return the value
// there. Throws std::domain_error if the table is not symmetric.
SymmetricFn brute_force_levels(const std::function<Rat(uint32_t)>& f, int n);

// sum_d b_d(f) b_d(g); in unoptimized builds the value-side formula
// sum_d C(n,d) 2^-n v_d(f) v_d(g) is recomputed and must agree.
Rat inner_product(const SymmetricFn& f, const SymmetricFn& g);

// Elementary symmetric sum e_d over the +-1 coordinates encoded by `mask`
// (set bit = coordinate -1), for all d = 0..n at once.
std::vector<int64_t> elementary_symmetric_signs(uint32_t mask, int n);

}  // namespace cubelab
