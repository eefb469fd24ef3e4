#pragma once

#include <cstdint>
#include <vector>

#include "cubelab/cube.hpp"
#include "cubelab/rational.hpp"

namespace cubelab {

// ---------------------------------------------------------------------------
// Exact weighted-L1 approximation LP over symmetric functions.
//
//   minimize  sum_d w_d |f_d - p(r_d)|,   w_d = C(n,d) 2^-n,  r_d = 1 - 2d/n,
//
// over symmetric polynomials p of degree <= m, expressed in the normalized
// Krawtchouk basis. Restricting to symmetric p loses nothing against a
// symmetric target (averaging any p over coordinate permutations cannot
// increase the error); the full-basis comparison test exercises this at
// small n.
// ---------------------------------------------------------------------------

struct LPInstance {
    int n = 0;
    int m = 0;
    std::vector<Rat> weights;               // w_d, sums to 1
    std::vector<Rat> target;                // f_d profile values
    std::vector<std::vector<Rat>> design;   // design[d][j] = K_j^{(n)}(r_d), normalized
};

enum class LPStatus { optimal, infeasible, iteration_limit };

struct LPResult {
    LPStatus status = LPStatus::iteration_limit;
    Rat optimum;                     // at iteration_limit: best bound reached
    std::vector<Rat> coefficients;   // Krawtchouk-basis coefficients, length m+1
    std::vector<Rat> duals;          // equality duals of the split-variable form
    long iterations = 0;
};

LPInstance make_l1_instance(const SymmetricFn& target, int m);

// Exact rational split-variable simplex with Bland's rule.
LPResult l1_distance(const SymmetricFn& target, int m, long iteration_limit = 200000);

// Generic exact LP in standard form: min c'x, A x = b, x >= 0 (two-phase
// dense tableau, Bland pivoting). Exposed for the full-multilinear-basis
// comparison test.
struct StandardLP {
    std::vector<std::vector<Rat>> a;
    std::vector<Rat> b;
    std::vector<Rat> c;
};

struct StandardLPResult {
    LPStatus status = LPStatus::iteration_limit;
    Rat objective;
    std::vector<Rat> x;
    std::vector<Rat> duals;
    long iterations = 0;
};

StandardLPResult solve_standard_lp(const StandardLP& lp, long iteration_limit = 200000);

// ---------------------------------------------------------------------------
// Float L1 regression:  minimize sum_i w_i | y_i - <c, phi_i> |.
//
// Solved as the bounded dual  max y'lambda, Phi' lambda = 0, |lambda_i| <= w_i
// with a revised simplex whose basis has one column per feature; the primal
// coefficients are the equality duals at optimality. Feature rows are
// supplied through a source so the learner can price +-1 parity features
// without materializing them.
// ---------------------------------------------------------------------------

struct L1FitResult {
    std::vector<double> coefficients;
    double objective = 0;      // recomputed primally at the returned c
    double dual_objective = 0; // simplex objective at termination
    long iterations = 0;
    bool converged = false;
    bool rank_flagged = false; // tiny-pivot fallback was taken at least once
};

class FeatureSource {
public:
    virtual ~FeatureSource() = default;
    virtual int rows() const = 0;
    virtual int cols() const = 0;
    virtual double y(int i) const = 0;
    virtual double w(int i) const = 0;
    virtual double dot(int i, const double* v) const = 0;  // phi_i . v
    virtual void write(int i, double* out) const = 0;      // out[j] = phi_ij
    virtual double at(int i, int j) const = 0;             // phi_ij
};

L1FitResult l1_fit(const FeatureSource& src, long iteration_limit = 500000);

// Dense convenience wrapper used by tests and small fits.
L1FitResult l1_fit(const std::vector<std::vector<double>>& features,
                   const std::vector<double>& y, const std::vector<double>& w,
                   long iteration_limit = 500000);

}  // namespace cubelab
