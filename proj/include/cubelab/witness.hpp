#pragma once

#include <vector>

#include "cubelab/cube.hpp"
#include "cubelab/radical.hpp"
#include "cubelab/rational.hpp"

namespace cubelab {

// Parameters of the averaged sine-Laguerre witness for target degree m:
// the Laguerre index is k = floor((m+1)/2) and the witness is orthogonal to
// all symmetric polynomials of degree <= 2k >= m.
//
// The closed-form level expansion is valid for every n >= 3 (the series runs
// over odd levels 2r+1 <= n); majority-facing operations additionally
// require n odd and enforce it themselves.
struct WitnessSpec {
    int n = 0;
    int m = 0;
    int k = 0;

    static WitnessSpec for_degree(int n, int m);
};

// The witness in exact form.
//
// Raw level d = 2r+1 of the unnormalized witness carries the coefficient
//     (1/2) (-1)^r C(n,d)^{1/2} n^{-d/2} binom(r+1, k+1) Gamma(r + 3/2),
// which factors as  q_d * sqrt(C(n,d)) * sqrt(pi/n)  with q_d rational.
// Profile values of the unnormalized witness are then sqrt(pi/n) * V_d with
// V_d rational, so the normalized witness psi = Omega / ||Omega||_inf has
// exact rational profile values and exact rational reduced levels.
class WitnessLevels {
public:
    const WitnessSpec& spec() const { return spec_; }
    const SymmetricFn& psi() const { return psi_; }

    // q_d (zero off the populated odd levels).
    const std::vector<Rat>& raw_reduced() const { return raw_reduced_; }

    // Raw orthonormal-level coefficient of the unnormalized witness,
    // q_d * sqrt(C(n,d)) * sqrt(pi/n), as an exact radical.
    Radical raw_level(int d) const;

    // max_d |V_d|, the rational part of ||Omega~||_inf.
    const Rat& sup_reduced() const { return sup_reduced_; }

    // ||Omega~||_inf = sqrt(pi/n) * sup_reduced, exact and as binary64.
    Radical sup_norm() const;
    double sup_norm_f() const;

    // b_d^2 of psi (exact): reduced^2 * C(n,d).
    Rat b2(int d) const;

    // sum_d b_d^2 d^{2p}
    Rat moment(long p) const;

    // b_{d+2}^2 / b_d^2 for odd d (both levels populated).
    Rat ratio_sq(int d) const;

private:
    friend WitnessLevels build_witness(const WitnessSpec& spec);
    WitnessLevels(WitnessSpec spec, std::vector<Rat> raw_reduced, Rat sup_reduced,
                  SymmetricFn psi)
        : spec_(spec),
          raw_reduced_(std::move(raw_reduced)),
          sup_reduced_(std::move(sup_reduced)),
          psi_(std::move(psi)) {}

    WitnessSpec spec_;
    std::vector<Rat> raw_reduced_;
    Rat sup_reduced_;
    SymmetricFn psi_;
};

WitnessLevels build_witness(const WitnessSpec& spec);

struct QuadratureParams {
    double y_max = 0;       // 0 = choose automatically from the tolerance
    double tolerance = 1e-10;
    int max_subdivisions = 22;
};

// Omega~_{k,n} at a point with coordinate sum s, evaluated numerically as
// the average of the two signed Laguerre integrals of the definition.
double witness_value_quadrature(const WitnessSpec& spec, int s, const QuadratureParams& q = {});

// kappa = <T_rho Maj_n, psi_{k,n}>, exact. Computed independently as
//   (a) the level inner product  sum_d rho^d b_d(Maj) b_d(psi)  and
//   (b) the finite hypergeometric-style series divided by the sup norm;
// the two must agree exactly (ConsistencyError otherwise). Requires n odd.
Rat correlation_kappa(const Rat& rho, const WitnessSpec& spec);

struct SupNormScanRow {
    long n;
    double sup;
    bool exact_path;
};

struct SupNormScan {
    int m;
    std::vector<SupNormScanRow> rows;
    double slope;        // log-log slope of sup vs n
    double max_over_min;
};

// ||Omega~_{k,n}||_inf over an n-grid: exact levels for n <= 64, shared-grid
// quadrature beyond.
SupNormScan sup_norm_scan(int m, const std::vector<long>& n_grid);

// Float path for one dimension (used by the scan); sup over the odd-s profile.
double witness_sup_norm_quadrature(int k, long n);

}  // namespace cubelab
