#include "cubelab/orthopoly.hpp"

#include <algorithm>
#include <cmath>

#include "cubelab/errors.hpp"
#include "cubelab/quadrature.hpp"

namespace cubelab {

namespace {

void check_kraw_range(int k, int d, int n) {
    if (n < 0 || k < 0 || k > n || d < 0 || d > n)
        throw std::domain_error("krawtchouk: indices out of range (need 0 <= k,d <= n)");
}

}  // namespace

// --------------------------------------------------------------------------
// Krawtchouk
// --------------------------------------------------------------------------

KrawtchoukTable::KrawtchoukTable(int n) : n_(n) {
    if (n < 0) throw std::domain_error("KrawtchoukTable: n must be nonnegative");
    k_.assign(n + 1, std::vector<Int>(n + 1));
    for (int d = 0; d <= n; ++d) {
        k_[0][d] = 1;
        if (n >= 1) k_[1][d] = n - 2 * d;
    }
    // degree recurrence: (n-2d) K_k = (k+1) K_{k+1} + (n-k+1) K_{k-1}
    for (int k = 1; k < n; ++k) {
        for (int d = 0; d <= n; ++d) {
            Int num = Int(n - 2 * d) * k_[k][d] - Int(n - k + 1) * k_[k - 1][d];
            k_[k + 1][d] = num / (k + 1);  // always divides exactly
        }
    }
}

const Int& KrawtchoukTable::at(int k, int d) const {
    check_kraw_range(k, d, n_);
    return k_[k][d];
}

Rat KrawtchoukTable::normalized(int k, int d) const {
    return make_rat(at(k, d), binom(n_, k));
}

Int krawtchouk(int k, int d, int n) {
    check_kraw_range(k, d, n);
    Int prev(1);  // K_0
    if (k == 0) return prev;
    Int cur(n - 2 * d);  // K_1
    for (int j = 1; j < k; ++j) {
        Int nxt = (Int(n - 2 * d) * cur - Int(n - j + 1) * prev) / (j + 1);
        prev = cur;
        cur = nxt;
    }
    return cur;
}

Int krawtchouk_sum_oracle(int k, int d, int n) {
    check_kraw_range(k, d, n);
    Int acc(0);
    for (int b = 0; b <= k; ++b) {
        Int term = binom(d, b) * binom(n - d, k - b);
        if (b % 2) acc -= term;
        else acc += term;
    }
    return acc;
}

Rat krawtchouk_normalized(int k, int d, int n) {
    check_kraw_range(k, d, n);
    return make_rat(krawtchouk(k, d, n), binom(n, k));
}

Rat krawtchouk_normalized_at(int k, int n, const Rat& r) {
    if (k < 0 || k > n) throw std::domain_error("krawtchouk_normalized_at: 0 <= k <= n required");
    Rat prev(1);
    if (k == 0) return prev;
    Rat cur = r;
    // normalized recurrence: n r K_j = (n-j) K_{j+1} + j K_{j-1}
    for (int j = 1; j < k; ++j) {
        Rat nxt = (Rat(n) * r * cur - Rat(j) * prev) / Rat(n - j);
        prev = cur;
        cur = nxt;
    }
    return cur;
}

double krawtchouk_normalized_f(int k, long n, double r) {
    if (k < 0 || static_cast<long>(k) > n)
        throw std::domain_error("krawtchouk_normalized_f: 0 <= k <= n required");
    double prev = 1.0;
    if (k == 0) return prev;
    double cur = r;
    for (long j = 1; j < k; ++j) {
        double nxt = (static_cast<double>(n) * r * cur - static_cast<double>(j) * prev) /
                     static_cast<double>(n - j);
        prev = cur;
        cur = nxt;
    }
    return cur;
}

// --------------------------------------------------------------------------
// Laguerre
// --------------------------------------------------------------------------

namespace {

// Generalized binomial C(z, t) for rational z, integer t >= 0.
Rat gen_binom(const Rat& z, long t) {
    Rat acc(1);
    for (long i = 0; i < t; ++i) acc *= (z - Rat(static_cast<long>(i))) / Rat(t - i);
    return acc;
}

}  // namespace

LaguerrePoly::LaguerrePoly(int m, const Rat& alpha) : m_(m), alpha_(alpha) {
    if (m < 0) throw std::domain_error("LaguerrePoly: degree must be nonnegative");
    if (alpha <= -1) throw std::domain_error("LaguerrePoly: alpha > -1 required");
    coef_.resize(m + 1);
    // L_m^{(a)}(x) = sum_j (-1)^j C(m+a, m-j) x^j / j!
    Int fact(1);
    for (int j = 0; j <= m; ++j) {
        if (j > 0) fact *= j;
        Rat c = gen_binom(Rat(m) + alpha, m - j) / Rat(fact);
        coef_[j] = (j % 2) ? Rat(-c) : c;
    }
}

Rat LaguerrePoly::eval(const Rat& x) const {
    Rat acc(0);
    for (int j = m_; j >= 0; --j) acc = acc * x + coef_[j];
    return acc;
}

double LaguerrePoly::eval(double x) const {
    double acc = 0;
    for (int j = m_; j >= 0; --j) acc = acc * x + to_double(coef_[j]);
    return acc;
}

double laguerre_eval(int m, double alpha, double x) {
    if (m < 0) throw std::domain_error("laguerre_eval: degree must be nonnegative");
    double prev = 1.0;
    if (m == 0) return prev;
    double cur = 1.0 + alpha - x;
    for (int j = 1; j < m; ++j) {
        double nxt = ((2.0 * j + 1.0 + alpha - x) * cur - (j + alpha) * prev) / (j + 1.0);
        prev = cur;
        cur = nxt;
    }
    return cur;
}

Radical GammaMultiple::to_radical() const {
    Int den(gamma_arg.get_den());
    if (den != 1 && den != 2)
        throw std::domain_error("GammaMultiple: only integer and half-integer Gamma arguments");
    long twice = (den == 1) ? 2 * gamma_arg.get_num().get_si() : gamma_arg.get_num().get_si();
    Radical g = gamma_half(twice);
    g.coef *= coef;
    return g.normalized();
}

GammaMultiple laguerre_moment(int m, const Rat& alpha, long r) {
    if (alpha <= -1) throw std::domain_error("laguerre_moment: alpha > -1 required");
    if (m < 0 || r < 0) throw std::domain_error("laguerre_moment: nonnegative indices required");
    Rat mult(binom(r, m));
    if (m % 2) mult = -mult;
    return GammaMultiple{mult, Rat(r) + alpha + 1};
}

Radical weighted_poly_integral(const std::vector<Rat>& poly, const Rat& alpha) {
    Radical acc = Radical::of(Rat(0));
    for (size_t q = 0; q < poly.size(); ++q) {
        if (poly[q] == 0) continue;
        GammaMultiple gm{poly[q], Rat(static_cast<long>(q)) + alpha + 1};
        acc = acc.plus(gm.to_radical());
    }
    return acc;
}

// --------------------------------------------------------------------------
// Hermite
// --------------------------------------------------------------------------

std::vector<Int> hermite_coeffs(int k) {
    if (k < 0) throw std::domain_error("hermite_coeffs: degree must be nonnegative");
    std::vector<Int> prev{Int(1)};      // H_0
    if (k == 0) return prev;
    std::vector<Int> cur{Int(0), Int(2)};  // H_1 = 2x
    for (int j = 1; j < k; ++j) {
        std::vector<Int> nxt(j + 2, Int(0));
        for (int p = 0; p <= j; ++p) nxt[p + 1] += 2 * cur[p];
        for (int p = 0; p < j; ++p) nxt[p] -= 2 * j * prev[p];
        prev = std::move(cur);
        cur = std::move(nxt);
    }
    return cur;
}

double hermite_eval(int k, double x) {
    double prev = 1.0;
    if (k == 0) return prev;
    double cur = 2.0 * x;
    for (int j = 1; j < k; ++j) {
        double nxt = 2.0 * x * cur - 2.0 * j * prev;
        prev = cur;
        cur = nxt;
    }
    return cur;
}

namespace {

// Scaled recurrence for Phi_k. Values are carried as v * 2^scale with v
// renormalized whenever it drifts out of [2^-512, 2^512]; the starting value
// e^{-x^2/2} may sit far below the subnormal range, which the scale absorbs.
struct ScaledPhi {
    double v0, v1;  // Phi_j, Phi_{j+1} up to the common scale
    int scale;
};

ScaledPhi phi_recurrence(int k, double x) {
    const double log2_phi0 = (-x * x / 2.0 - 0.25 * std::log(M_PI)) / std::log(2.0);
    int scale = static_cast<int>(std::floor(log2_phi0));
    double v0 = std::exp2(log2_phi0 - scale);         // Phi_0 / 2^scale
    double v1 = std::sqrt(2.0) * x * v0;              // Phi_1 / 2^scale
    if (k == 0) return {v0, v1, scale};
    for (int j = 1; j <= k; ++j) {
        const double nxt = x * std::sqrt(2.0 / (j + 1)) * v1 - std::sqrt(j / (j + 1.0)) * v0;
        v0 = v1;
        v1 = nxt;
        const double mag = std::max(std::fabs(v0), std::fabs(v1));
        if (mag > 0x1p512 || (mag != 0 && mag < 0x1p-512)) {
            int e;
            std::frexp(mag, &e);
            v0 = std::ldexp(v0, -e);
            v1 = std::ldexp(v1, -e);
            scale += e;
        }
    }
    return {v0, v1, scale};  // v0 = Phi_k, v1 = Phi_{k+1}
}

}  // namespace

double hermite_fn(int k, double x) {
    if (k < 0) throw std::domain_error("hermite_fn: index must be nonnegative");
    ScaledPhi s = phi_recurrence(k == 0 ? 0 : k - 1, x);
    const double v = (k == 0) ? s.v0 : s.v1;
    return std::ldexp(v, s.scale);
}

void hermite_fn_pair(int k, double x, double* phi_k, double* phi_k1) {
    ScaledPhi s = phi_recurrence(k, x);
    *phi_k = std::ldexp(s.v0, s.scale);
    *phi_k1 = std::ldexp(s.v1, s.scale);
}

Radical packet_dn_sq(int n) {
    if (n < 0) throw std::domain_error("packet_dn_sq: n must be nonnegative");
    return Radical{make_rat(binom(2 * n, n), int_pow(Int(4), n)), Int(1), 1};
}

double packet_dn(int n) { return std::sqrt(packet_dn_sq(n).value()); }

double packet_eval(int n, double x) {
    if (n < 0) throw std::domain_error("packet_eval: n must be nonnegative");
    return packet_dn(n) * x * hermite_fn(2 * n, x);
}

// --------------------------------------------------------------------------
// Scaling report
// --------------------------------------------------------------------------

namespace {

// Simpson integral of f over [0, b] with a fixed number of panels.
template <class F>
double simpson_fixed(F&& f, double b, long panels) {
    const double h = b / static_cast<double>(panels);
    double odd = 0, even = 0;
    for (long i = 1; i < panels; i += 2) odd += f(h * static_cast<double>(i));
    for (long i = 2; i < panels; i += 2) even += f(h * static_cast<double>(i));
    return h / 3.0 * (f(0.0) + f(b) + 4.0 * odd + 2.0 * even);
}

}  // namespace

ScalingReport hermite_scaling_report(int max_index) {
    if (max_index < 4) throw std::domain_error("hermite_scaling_report: max_index >= 4 required");
    ScalingReport rep;
    std::vector<int> grid;
    for (int n = 4; n <= max_index; n = std::max(n + 1, n + n / 4)) grid.push_back(n);
    if (grid.back() != max_index) grid.push_back(max_index);

    for (int n : grid) {
        // |Phi_n| is even; integrate on [0, X] and double. Beyond the turning
        // point sqrt(2n+1) the function decays like a Gaussian.
        const double X = std::sqrt(2.0 * n + 1.0) + 12.0;
        // Oscillation wavelength near the origin is ~ pi / sqrt(2n+1).
        const double wavelength = M_PI / std::sqrt(2.0 * n + 1.0);
        long panels = static_cast<long>(std::ceil(X / (wavelength / 24.0)));
        panels += panels % 2;

        auto abs_phi = [&](double x) { return std::fabs(hermite_fn(n, x)); };
        auto phi_sq = [&](double x) {
            const double p = hermite_fn(n, x);
            return p * p;
        };
        auto x_phi_sq = [&](double x) {
            const double p = x * hermite_fn(n, x);
            return p * p;
        };

        ScalingRow row;
        row.n = n;
        row.l1_norm = 2.0 * simpson_fixed(abs_phi, X, panels);
        row.l2_sq = 2.0 * simpson_fixed(phi_sq, X, panels);
        row.x_l2_sq = 2.0 * simpson_fixed(x_phi_sq, X, panels);
        if (std::fabs(row.l2_sq - 1.0) > 1e-8)
            throw QuadratureError("hermite_scaling_report: ||Phi_n||_2 self-check failed at n=" +
                                  std::to_string(n) + " (got " + std::to_string(row.l2_sq) + ")");

        double sup = 0;
        const double step = wavelength / 24.0;
        for (double x = 0; x <= X; x += step) {
            // Phi_n' = sqrt(n/2) Phi_{n-1} - sqrt((n+1)/2) Phi_{n+1}; one
            // recurrence pass gives (Phi_{n-1}, Phi_n), one more step Phi_{n+1}.
            double pm1, pn;
            hermite_fn_pair(n - 1, x, &pm1, &pn);
            const double pp1 = x * std::sqrt(2.0 / (n + 1)) * pn - std::sqrt(n / (n + 1.0)) * pm1;
            const double dphi = std::sqrt(n / 2.0) * pm1 - std::sqrt((n + 1) / 2.0) * pp1;
            sup = std::max(sup, std::fabs(x * dphi));
        }
        row.x_dphi_sup = sup;
        rep.rows.push_back(row);
    }

    std::vector<double> lx, l1y, xdy;
    for (const auto& r : rep.rows) {
        lx.push_back(std::log(r.n + 1.0));
        l1y.push_back(std::log(r.l1_norm));
        xdy.push_back(std::log(r.x_dphi_sup));
    }
    rep.l1_slope = fit_slope(lx, l1y);
    rep.l1_slope_predicted = 0.25;
    rep.xd_slope = fit_slope(lx, xdy);
    rep.xd_slope_predicted = 0.75;
    double cmax = 0;
    for (const auto& r : rep.rows) cmax = std::max(cmax, r.l1_norm / std::pow(r.n + 1.0, 0.25));
    rep.l1_fitted_const = cmax;
    return rep;
}

}  // namespace cubelab
