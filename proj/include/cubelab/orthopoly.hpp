#pragma once

#include <vector>

#include "cubelab/radical.hpp"
#include "cubelab/rational.hpp"

namespace cubelab {

// ---------------------------------------------------------------------------
// Krawtchouk polynomials, binary case.
//
// K_k(d;n) is the unnormalized integer polynomial; the normalized variant is
// K_k(d;n)/C(n,k), evaluated either on the Hamming lattice d in {0..n} or as
// a polynomial in r = 1 - 2d/n.
// ---------------------------------------------------------------------------

class KrawtchoukTable {
public:
    explicit KrawtchoukTable(int n);

    int n() const { return n_; }

    // K_k(d;n), bounds-checked.
    const Int& at(int k, int d) const;

    // K_k(d;n)/C(n,k)
    Rat normalized(int k, int d) const;

private:
    int n_;
    std::vector<std::vector<Int>> k_;  // k_[k][d]
};

// Single values, computed by the degree recurrence (primary path).
Int krawtchouk(int k, int d, int n);

// The alternating binomial double sum; retained as a cross-check oracle.
Int krawtchouk_sum_oracle(int k, int d, int n);

Rat krawtchouk_normalized(int k, int d, int n);

// Normalized Krawtchouk as a polynomial, evaluated at rational r in [-1,1]
// via the normalized degree recurrence.
Rat krawtchouk_normalized_at(int k, int n, const Rat& r);

// Float path with the normalized recurrence; values stay O(1) on the lattice,
// so this is safe for n far beyond the exact-table range.
double krawtchouk_normalized_f(int k, long n, double r);

// ---------------------------------------------------------------------------
// Laguerre polynomials L_m^{(alpha)}.
// ---------------------------------------------------------------------------

class LaguerrePoly {
public:
    LaguerrePoly(int m, const Rat& alpha);

    int degree() const { return m_; }
    const Rat& alpha() const { return alpha_; }
    const std::vector<Rat>& coefficients() const { return coef_; }  // monomial basis

    Rat eval(const Rat& x) const;
    double eval(double x) const;

private:
    int m_;
    Rat alpha_;
    std::vector<Rat> coef_;
};

// Stable three-term recurrence evaluation, float path.
double laguerre_eval(int m, double alpha, double x);

// Exact value of  integral_0^inf L_m^{(alpha)}(x) x^{r+alpha} e^{-x} dx
// as (rational multiplier) * Gamma(gamma_arg). The multiplier follows the
// convention binom(r,m) = 0 for r < m.
struct GammaMultiple {
    Rat coef;
    Rat gamma_arg;

    // Exact radical form; requires gamma_arg to be a positive integer or
    // half-integer.
    Radical to_radical() const;
    double value() const { return to_radical().value(); }
};

GammaMultiple laguerre_moment(int m, const Rat& alpha, long r);

// Exact  integral_0^inf (sum_q c_q x^q) x^alpha e^{-x} dx  for half-integer
// or integer alpha > -1, as a Radical. Used by the identity suite.
Radical weighted_poly_integral(const std::vector<Rat>& poly, const Rat& alpha);

// ---------------------------------------------------------------------------
// Hermite polynomials (physicists') and normalized Hermite functions.
// ---------------------------------------------------------------------------

std::vector<Int> hermite_coeffs(int k);     // exact monomial coefficients of H_k
double hermite_eval(int k, double x);       // recurrence H_{k+1} = 2x H_k - 2k H_{k-1}

// Normalized Hermite function Phi_k(x); internally scaled so deep-tail
// starting values neither underflow nor overflow.
double hermite_fn(int k, double x);

// Phi_k and Phi_{k+1} together (for ladder/derivative formulas).
void hermite_fn_pair(int k, double x, double* phi_k, double* phi_k1);

// d_n^2 = sqrt(pi) C(2n,n) / 4^n, exact.
Radical packet_dn_sq(int n);
double packet_dn(int n);

// A_n(x) = d_n x Phi_{2n}(x); equals (-1)^n x L_n^{(-1/2)}(x^2) e^{-x^2/2}.
double packet_eval(int n, double x);

// ---------------------------------------------------------------------------
// Numerical scaling report for the Hermite-packet estimates.
// ---------------------------------------------------------------------------

struct ScalingRow {
    int n;
    double l1_norm;        // ||Phi_n||_1
    double l2_sq;          // ||Phi_n||_2^2, self-consistency (should be 1)
    double x_l2_sq;        // ||x Phi_n||_2^2, should be n + 1/2
    double x_dphi_sup;     // ||x Phi_n'||_inf
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    double l1_slope;           // fitted log-log slope of ||Phi_n||_1 vs n+1
    double l1_slope_predicted; // 1/4
    double xd_slope;           // fitted slope of ||x Phi_n'||_inf vs n+1
    double xd_slope_predicted; // (a+b)/2 - 1/4 at a=b=1, i.e. 3/4
    double l1_fitted_const;    // fitted C in C (n+1)^{1/4}
};

// Throws QuadratureError if the internal grid fails the ||Phi_n||_2 = 1
// self-consistency check.
ScalingReport hermite_scaling_report(int max_index);

}  // namespace cubelab
