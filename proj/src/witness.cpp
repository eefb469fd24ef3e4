#include "cubelab/witness.hpp"

#include <algorithm>
#include <cmath>

#include "cubelab/errors.hpp"
#include "cubelab/orthopoly.hpp"
#include "cubelab/quadrature.hpp"

namespace cubelab {

WitnessSpec WitnessSpec::for_degree(int n, int m) {
    if (n < 3) throw std::domain_error("WitnessSpec: n >= 3 required");
    if (m < 1) throw std::domain_error("WitnessSpec: m >= 1 required");
    const int k = (m + 1) / 2;
    if (k > (n - 1) / 2)
        throw std::domain_error(
            "WitnessSpec: k = floor((m+1)/2) must satisfy k <= (n-1)/2 (witness vanishes)");
    return WitnessSpec{n, m, k};
}

namespace {

// q_{2r+1} = (-1)^r binom(r+1, k+1) (2r+1)!! / (2^{r+2} n^r)
Rat raw_reduced_coeff(int n, int k, int r) {
    Rat q = make_rat(binom(r + 1, k + 1) * odd_double_factorial(r),
                     int_pow(Int(2), r + 2) * int_pow(Int(n), r));
    return (r % 2) ? Rat(-q) : q;
}

}  // namespace

WitnessLevels build_witness(const WitnessSpec& spec) {
    const int n = spec.n, k = spec.k;
    const int rmax = (n - 1) / 2;

    std::vector<Rat> raw(n + 1, Rat(0));
    for (int r = k; r <= rmax; ++r) raw[2 * r + 1] = raw_reduced_coeff(n, k, r);

    // Profile values of the unnormalized witness, divided by sqrt(pi/n):
    // V_d = sum_r q_{2r+1} K_{2r+1}(d;n).
    KrawtchoukTable K(n);
    std::vector<Rat> V(n + 1, Rat(0));
    for (int d = 0; d <= n; ++d)
        for (int r = k; r <= rmax; ++r) V[d] += raw[2 * r + 1] * Rat(K.at(2 * r + 1, d));

    Rat sup(0);
    for (const Rat& v : V) sup = std::max(sup, rat_abs(v));
    if (sup == 0) throw std::domain_error("build_witness: witness is identically zero");

    std::vector<Rat> psi_values(n + 1);
    for (int d = 0; d <= n; ++d) psi_values[d] = V[d] / sup;
    SymmetricFn psi = SymmetricFn::from_values(n, std::move(psi_values));

    // The level transform must reproduce q_d / sup on the populated levels
    // and exact zeros elsewhere.
    for (int d = 0; d <= n; ++d) {
        const Rat expect = raw[d] / sup;
        if (psi.reduced_level(d) != expect)
            throw ConsistencyError("build_witness: value/level transforms disagree at level " +
                                   std::to_string(d));
    }
    return WitnessLevels(spec, std::move(raw), std::move(sup), std::move(psi));
}

Radical WitnessLevels::raw_level(int d) const {
    const Rat& q = raw_reduced_.at(d);
    if (q == 0) return Radical::of(Rat(0));
    // q * sqrt(C(n,d)) * sqrt(pi)/sqrt(n) = (q/n) * sqrt(C(n,d) n) * sqrt(pi)
    return Radical{q / Rat(spec_.n), binom(spec_.n, d) * Int(spec_.n), 1}.normalized();
}

Radical WitnessLevels::sup_norm() const {
    return Radical{sup_reduced_ / Rat(spec_.n), Int(spec_.n), 1};
}

double WitnessLevels::sup_norm_f() const { return sup_norm().value(); }

Rat WitnessLevels::b2(int d) const {
    const Rat& c = psi_.reduced_level(d);
    return c * c * Rat(binom(spec_.n, d));
}

Rat WitnessLevels::moment(long p) const {
    Rat acc(0);
    for (int d = 1; d <= spec_.n; ++d) {
        Rat bd2 = b2(d);
        if (bd2 == 0) continue;
        acc += bd2 * Rat(int_pow(Int(d), 2 * p));
    }
    return acc;
}

Rat WitnessLevels::ratio_sq(int d) const {
    const Rat num = b2(d + 2);
    const Rat den = b2(d);
    if (den == 0) throw std::domain_error("WitnessLevels::ratio_sq: level " + std::to_string(d) +
                                          " is not populated");
    return num / den;
}

// --------------------------------------------------------------------------
// Quadrature paths
// --------------------------------------------------------------------------

namespace {

double poly_abs_bound(const LaguerrePoly& L, double y) {
    double acc = 0, p = 1;
    for (const Rat& c : L.coefficients()) {
        acc += std::fabs(to_double(c)) * p;
        p *= y;
    }
    return acc;
}

}  // namespace

double witness_value_quadrature(const WitnessSpec& spec, int s, const QuadratureParams& q) {
    const int n = spec.n, k = spec.k;
    if (s < -n || s > n) throw std::domain_error("witness_value_quadrature: |s| <= n required");

    const LaguerrePoly Lk(k, make_rat(1, 2));
    const LaguerrePoly Lk1(k + 1, make_rat(1, 2));

    double y_max = q.y_max;
    if (y_max <= 0) {
        // The weight sqrt(y) e^{-y} / W_n(y) = e^{-y} (1+y/n)^{n/2} <= e^{-y/2};
        // grow the cutoff until the remaining tail is below tolerance/10.
        y_max = 60;
        auto tail_bound = [&](double Y) {
            const double envelope = std::max(poly_abs_bound(Lk, Y), poly_abs_bound(Lk1, Y));
            return 4.0 * envelope * std::exp(-Y / 2.0);
        };
        while (tail_bound(y_max) > q.tolerance / 10.0) y_max *= 1.5;
    }

    auto integrand = [&](double y) {
        const double weight = std::exp(-y + (n / 2.0) * std::log1p(y / n));
        const double phase = std::atan(std::sqrt(y / n)) * s;
        const double sk = (k % 2) ? -Lk.eval(y) : Lk.eval(y);
        const double sk1 = ((k + 1) % 2) ? -Lk1.eval(y) : Lk1.eval(y);
        return 0.5 * (sk + sk1) * weight * std::sin(phase);
    };

    // Resolve the oscillation: phase runs up to |s| * atan(sqrt(y_max/n)).
    const double total_phase = std::fabs(static_cast<double>(s)) * std::atan(std::sqrt(y_max / n));
    int panels = 128;
    while (panels < 16 * (total_phase + 1)) panels *= 2;

    return integrate_refining(integrand, 0.0, y_max, q.tolerance, q.max_subdivisions, panels).value;
}

Rat correlation_kappa(const Rat& rho, const WitnessSpec& spec) {
    const int n = spec.n, k = spec.k;
    if (n % 2 == 0) throw std::domain_error("correlation_kappa: n must be odd");
    if (!(rho > 0 && rho < 1)) throw std::domain_error("correlation_kappa: rho in (0,1) required");
    const int N = (n - 1) / 2;

    WitnessLevels w = build_witness(spec);
    SymmetricFn maj = majority_levels(n);

    // (a) level inner product with the noise damping folded in
    Rat by_levels(0);
    {
        Rat p = rho;  // rho^1
        const Rat rho2 = rho * rho;
        for (int r = 0; r <= N; ++r) {
            const int d = 2 * r + 1;
            by_levels += p * maj.reduced_level(d) * w.psi().reduced_level(d) * Rat(binom(n, d));
            p *= rho2;
        }
    }

    // (b) the exact series: <T_rho Maj, Omega~> = sqrt(pi n) * S with
    // S = C(2N,N)/4^N * sum_r rho^{2r+1} n^{-r}/(2r+1) C(N,r) (1/2) C(r+1,k+1) g_r,
    // g_r = (2r+1)!!/2^{r+1}; dividing by ||Omega~||_inf = sqrt(pi/n) sup gives
    // kappa = n S / sup.
    Rat series(0);
    {
        Rat p = rho;
        const Rat rho2 = rho * rho;
        for (int r = 0; r <= N; ++r) {
            if (r >= k) {
                Rat g = make_rat(odd_double_factorial(r), int_pow(Int(2), r + 1));
                Rat term = p * make_rat(binom(N, r), int_pow(Int(n), r) * Int(2 * r + 1)) *
                           make_rat(binom(r + 1, k + 1), 2) * g;
                series += term;
            }
            p *= rho2;
        }
        series *= make_rat(binom(2 * N, N), int_pow(Int(4), N));
    }
    const Rat by_series = Rat(n) * series / w.sup_reduced();

    if (by_levels != by_series)
        throw ConsistencyError("correlation_kappa: level and series paths disagree");
    return by_levels;
}

// --------------------------------------------------------------------------
// Large-n sup-norm scan
// --------------------------------------------------------------------------

double witness_sup_norm_quadrature(int k, long n) {
    if (k < 1 || k > (n - 1) / 2)
        throw std::domain_error("witness_sup_norm_quadrature: 1 <= k <= (n-1)/2 required");
    // Substituted form of the single-Laguerre-kernel integral: with
    // u = theta_n(y), y = n tan^2 u,
    //   Omega~(s) = int_0^{pi/2} G(u) sin(u s) du,
    //   G(u) = (-1)^{k+1}/2 L_{k+1}^{(-1/2)}(n tan^2 u)
    //          e^{-n tan^2 u} sec^n u * 2 n tan u sec^2 u.
    // G decays like e^{-n u^2 / 2}, so the effective support is u = O(n^{-1/2})
    // and the phase u*s is linear, which keeps the grid size manageable for
    // every odd s up to n.
    const LaguerrePoly L(k + 1, make_rat(-1, 2));
    const double sign = ((k + 1) % 2) ? -1.0 : 1.0;

    // Cutoff: n (tan^2 u - log sec u) >= 45 makes the envelope < 3e-20.
    double u_max = std::sqrt(2.0 * 45.0 / static_cast<double>(n));
    while (u_max < M_PI / 2 - 1e-9) {
        const double t = std::tan(u_max);
        if (static_cast<double>(n) * (t * t - std::log(1.0 / std::cos(u_max))) >= 45.0) break;
        u_max *= 1.1;
    }
    u_max = std::min(u_max, M_PI / 2 - 1e-9);

    auto envelope = [&](double u) {
        const double t = std::tan(u);
        const double y = static_cast<double>(n) * t * t;
        const double logw = -y - (static_cast<double>(n) / 2.0 + 0.0) * std::log(std::cos(u) * std::cos(u));
        const double sec2 = 1.0 / (std::cos(u) * std::cos(u));
        return sign * 0.5 * L.eval(y) * std::exp(logw) * 2.0 * static_cast<double>(n) * t * sec2;
    };

    // Shared grid across all s: finest oscillation has period 2 pi / n.
    long panels = 1 << 12;
    const double finest_need = 20.0 * u_max * static_cast<double>(n) / (2.0 * M_PI);
    while (panels < finest_need) panels *= 2;

    std::vector<double> base(panels + 1), u_grid(panels + 1);
    const double h = u_max / static_cast<double>(panels);
    for (long i = 0; i <= panels; ++i) {
        u_grid[i] = h * static_cast<double>(i);
        base[i] = envelope(u_grid[i]);
    }

    auto value_at = [&](long s, long stride) {
        // Simpson on the subsampled grid (stride must divide panels).
        double odd = 0, even = 0;
        const long m = panels / stride;
        for (long i = 1; i < m; i += 2) odd += base[i * stride] * std::sin(u_grid[i * stride] * s);
        for (long i = 2; i < m; i += 2) even += base[i * stride] * std::sin(u_grid[i * stride] * s);
        const double hh = u_max / static_cast<double>(m);
        const double f0 = base[0] * std::sin(0.0);
        const double fm = base[panels] * std::sin(u_grid[panels] * s);
        return hh / 3.0 * (f0 + fm + 4.0 * odd + 2.0 * even);
    };

    // Grid self-check at the fastest oscillation.
    {
        const double fine = value_at(n, 1);
        const double coarse = value_at(n, 2);
        if (std::fabs(fine - coarse) > 1e-7)
            throw QuadratureError("witness_sup_norm_quadrature: grid not converged at n=" +
                                  std::to_string(n));
    }

    double sup = 0;
    for (long s = 1; s <= n; s += 2) sup = std::max(sup, std::fabs(value_at(s, 1)));
    return sup;
}

SupNormScan sup_norm_scan(int m, const std::vector<long>& n_grid) {
    SupNormScan scan;
    scan.m = m;
    const int k = (m + 1) / 2;
    for (long n : n_grid) {
        if (k > (n - 1) / 2)
            throw std::domain_error("sup_norm_scan: k <= (n-1)/2 violated at n=" + std::to_string(n));
        SupNormScanRow row;
        row.n = n;
        if (n <= 64) {
            WitnessLevels w = build_witness(WitnessSpec::for_degree(static_cast<int>(n), m));
            row.sup = w.sup_norm_f();
            row.exact_path = true;
        } else {
            row.sup = witness_sup_norm_quadrature(k, n);
            row.exact_path = false;
        }
        scan.rows.push_back(row);
    }
    std::vector<double> lx, ly;
    double mx = 0, mn = 0;
    for (const auto& r : scan.rows) {
        lx.push_back(std::log(static_cast<double>(r.n)));
        ly.push_back(std::log(r.sup));
        mx = (mx == 0) ? r.sup : std::max(mx, r.sup);
        mn = (mn == 0) ? r.sup : std::min(mn, r.sup);
    }
    scan.slope = fit_slope(lx, ly);
    scan.max_over_min = mx / mn;
    return scan;
}

}  // namespace cubelab
