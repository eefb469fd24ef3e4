#pragma once

#include <cstdint>
#include <vector>

#include "cubelab/planted.hpp"

namespace cubelab {

struct Sample {
    uint32_t xmask = 0;  // set bit = coordinate -1
    int8_t y = 1;
};

// Smallest d >= 0 with rho^{d+1} <= eps/2, rho = 1 - 2 sigma.
int degree_for_eps(double sigma, double eps);

// Exact truncation error  ||T_rho f - (degree-d part)||_2^2
//   = sum_{k > d} rho^{2k} b_k^2.
Rat truncation_error_sq(const SymmetricFn& f, const Rat& rho, int d);

// x uniform, P[y = +1 | x] = (1 + psi(u .* x))/2 using the exact rational
// witness values; deterministic per seed.
std::vector<Sample> draw_samples(const PlantedDist& dist, long N, uint64_t seed);

struct Hypothesis {
    int n = 0;
    int degree = 0;
    std::vector<uint32_t> monomials;  // subset masks, ordered by degree then mask
    std::vector<double> coefficients;
    double threshold = 0;

    double poly_value(uint32_t xmask) const;
    // sign(p(x) - t) with sign(0) = +1.
    int predict(uint32_t xmask) const;
};

// All multilinear monomials of degree <= d over n coordinates, ordered by
// degree then by mask value.
std::vector<uint32_t> monomials_up_to(int n, int degree);

// L1 polynomial regression over all multilinear monomials of degree <= d,
// followed by the exhaustive empirical threshold search (candidate cuts
// between consecutive distinct fitted values; ties toward smaller |t|).
Hypothesis train(const std::vector<Sample>& samples, int n, int degree,
                 long feature_budget = 50000);

struct ExactError {
    Rat err;   // Pr[h(X) != Y]
    Rat corr;  // E[Y h(X)]
};

// Full-enumeration error of h on the planted distribution (n <= 20); also
// verifies err = (1 - corr)/2 exactly.
ExactError exact_error(const Hypothesis& h, const PlantedDist& dist);

}  // namespace cubelab
