#include "cubelab/identities.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "cubelab/cube.hpp"
#include "cubelab/orthopoly.hpp"
#include "cubelab/rng.hpp"

namespace cubelab {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

void add(std::vector<Check>& out, const std::string& name, bool pass, const std::string& lhs,
         const std::string& rhs, double margin) {
    out.push_back(Check{name, pass, lhs, rhs, margin});
}

// Exact polynomial product over rationals.
std::vector<Rat> poly_mul(const std::vector<Rat>& a, const std::vector<Rat>& b) {
    std::vector<Rat> c(a.size() + b.size() - 1, Rat(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

std::vector<Rat> to_rat_poly(const std::vector<Int>& v) {
    std::vector<Rat> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = Rat(v[i]);
    return out;
}

// integral over R of x^{2q} e^{-x^2} dx = Gamma(q + 1/2); odd moments vanish.
Radical gaussian_poly_integral(const std::vector<Rat>& poly) {
    Radical acc = Radical::of(Rat(0));
    for (size_t q = 0; q < poly.size(); q += 2) {
        if (poly[q] == 0) continue;
        Radical g = gamma_half(static_cast<long>(q) + 1);  // Gamma((q+1)/2... see below
        // Gamma at argument (q/2 + 1/2): twice the argument is q + 1.
        g.coef *= poly[q];
        acc = acc.plus(g);
    }
    return acc;
}

// Laguerre coefficients straight from the Rodrigues formula: differentiate
// x^{m+alpha} e^{-x} m times symbolically. Independent of the closed-form
// constructor.
std::vector<Rat> rodrigues_laguerre(int m, const Rat& alpha) {
    // Represent sum_i c_i x^{alpha + i} e^{-x} by the coefficient vector c.
    std::vector<Rat> c(m + 1, Rat(0));
    c[m] = Rat(1);  // x^{m+alpha} e^{-x}
    for (int step = 0; step < m; ++step) {
        std::vector<Rat> d(m + 1, Rat(0));
        for (int i = 0; i <= m; ++i) {
            if (c[i] == 0) continue;
            if (i > 0) d[i - 1] += (alpha + i) * c[i];  // power rule
            d[i] -= c[i];                               // from e^{-x}
        }
        c = std::move(d);
    }
    Int mf(1);
    for (int t = 2; t <= m; ++t) mf *= t;
    for (auto& v : c) v /= Rat(mf);
    return c;
}

}  // namespace

std::vector<Check> run_identity_suite() {
    std::vector<Check> out;

    // ---- Hermite: generating function (A.3 family) -------------------------
    {
        const double x = 0.7, t = 0.3;
        double acc = 0, fact = 1, tp = 1;
        for (int k = 0; k <= 40; ++k) {
            if (k > 0) {
                fact *= k;
                tp *= t;
            }
            acc += hermite_eval(k, x) * tp / fact;
        }
        const double closed = std::exp(2 * x * t - t * t);
        add(out, "hermite_generating_function", std::fabs(acc - closed) < 1e-10, fmt(acc),
            fmt(closed), std::fabs(acc - closed));
    }

    // ---- Hermite: orthogonality, exact (A.4) -------------------------------
    {
        bool ok = true;
        for (int j = 0; j <= 8 && ok; ++j)
            for (int k = j; k <= 8 && ok; ++k) {
                auto prod = poly_mul(to_rat_poly(hermite_coeffs(j)), to_rat_poly(hermite_coeffs(k)));
                Radical got = gaussian_poly_integral(prod);
                Radical want = Radical::of(Rat(0));
                if (j == k) {
                    Int f(1);
                    for (int t = 2; t <= k; ++t) f *= t;
                    want = Radical{Rat(int_pow(Int(2), k) * f), Int(1), 1};
                }
                ok = got == want;
            }
        add(out, "hermite_orthogonality_exact", ok, "integral H_j H_k e^{-x^2}",
            "sqrt(pi) 2^k k! [j=k]", 0);
    }

    // ---- Hermite functions: normalization and ladders (A.5, A.8, A.9) ------
    {
        bool ok = true;
        double worst = 0;
        for (int k : {1, 4, 9, 16}) {
            for (double x : {-3.3, -0.9, 0.0, 0.4, 1.7, 2.9}) {
                double pk, pk1, pm1, pm;
                hermite_fn_pair(k, x, &pk, &pk1);
                hermite_fn_pair(k - 1, x, &pm1, &pm);
                const double lhs = x * pk;
                const double rhs = std::sqrt((k + 1) / 2.0) * pk1 + std::sqrt(k / 2.0) * pm1;
                worst = std::max(worst, std::fabs(lhs - rhs));
                // derivative ladder against the explicit H-form derivative
                const double c_k = std::sqrt(std::pow(2.0, k) * std::tgamma(k + 1.0) * std::sqrt(M_PI));
                const double dphi_explicit =
                    (2.0 * k * hermite_eval(k - 1, x) - x * hermite_eval(k, x)) *
                    std::exp(-x * x / 2) / c_k;
                const double dphi_ladder = std::sqrt(k / 2.0) * pm1 - std::sqrt((k + 1) / 2.0) * pk1;
                worst = std::max(worst, std::fabs(dphi_explicit - dphi_ladder));
            }
        }
        ok = worst < 1e-10;
        add(out, "hermite_fn_ladders_pointwise", ok, "x Phi_k and Phi_k'", "ladder forms", worst);
    }

    // ---- Laguerre: Rodrigues coefficients, exact (A.10) --------------------
    {
        bool ok = true;
        for (const Rat& alpha : {make_rat(1, 2), make_rat(-1, 2)})
            for (int m = 0; m <= 8 && ok; ++m) {
                LaguerrePoly L(m, alpha);
                ok = L.coefficients() == rodrigues_laguerre(m, alpha);
                // leading coefficient (-1)^m / m!
                Int mf(1);
                for (int t = 2; t <= m; ++t) mf *= t;
                Rat lead = make_rat(Int(1), mf);
                if (m % 2) lead = -lead;
                ok = ok && L.coefficients().back() == lead;
            }
        add(out, "laguerre_rodrigues_exact", ok, "closed-form coefficients", "Rodrigues derivation", 0);
    }

    // ---- Laguerre: generating function at (x,z) = (1, 1/2) (A.11) ----------
    {
        const double x = 1.0, z = 0.5, alpha = 0.5;
        double acc = 0;
        for (int m = 0; m <= 60; ++m) acc += laguerre_eval(m, alpha, x) * std::pow(z, m);
        const double closed = std::pow(1 - z, -alpha - 1) * std::exp(-x * z / (1 - z));
        add(out, "laguerre_generating_function", std::fabs(acc - closed) < 1e-10, fmt(acc),
            fmt(closed), std::fabs(acc - closed));
    }

    // ---- Laguerre: orthogonality + moments, exact (A.12-A.14) --------------
    {
        bool ok = true;
        for (const Rat& alpha : {make_rat(1, 2), make_rat(-1, 2)}) {
            for (int j = 0; j <= 6 && ok; ++j)
                for (int m = j; m <= 6 && ok; ++m) {
                    auto prod = poly_mul(LaguerrePoly(j, alpha).coefficients(),
                                         LaguerrePoly(m, alpha).coefficients());
                    Radical got = weighted_poly_integral(prod, alpha);
                    Radical want = Radical::of(Rat(0));
                    if (j == m) {
                        // Gamma(m + alpha + 1)/m!
                        GammaMultiple gm{Rat(1), Rat(m) + alpha + 1};
                        want = gm.to_radical();
                        Int mf(1);
                        for (int t = 2; t <= m; ++t) mf *= t;
                        want.coef /= Rat(mf);
                    }
                    ok = got == want;
                }
            // A.14 for a grid of (m, r)
            for (int m = 0; m <= 5 && ok; ++m)
                for (long r = 0; r <= 6 && ok; ++r) {
                    std::vector<Rat> shifted(LaguerrePoly(m, alpha).coefficients());
                    shifted.insert(shifted.begin(), r, Rat(0));  // multiply by x^r
                    Radical got = weighted_poly_integral(shifted, alpha);
                    Radical want = laguerre_moment(m, alpha, r).to_radical();
                    ok = got == want;
                }
        }
        // A.13 at (alpha, alpha') = (1/2, 3/2): binom(alpha - alpha' + m, m) Gamma(alpha')
        for (int m = 0; m <= 5 && ok; ++m) {
            std::vector<Rat> shifted(LaguerrePoly(m, make_rat(1, 2)).coefficients());
            shifted.insert(shifted.begin(), 0, Rat(0));  // x^{alpha'-1} = x^{1/2}: alpha shift
            Radical got = weighted_poly_integral(shifted, make_rat(1, 2));
            // alpha - alpha' + m = m - 1
            Rat gb(1);
            {  // generalized binom(m-1, m)
                Rat acc(1);
                for (long i = 0; i < m; ++i) acc *= (Rat(m - 1 - i)) / Rat(m - i);
                gb = acc;
            }
            Radical want = gamma_half(3);  // Gamma(3/2)
            want.coef *= gb;
            ok = got == want.normalized();
        }
        add(out, "laguerre_orthogonality_moments_exact", ok, "weighted integrals",
            "Gamma closed forms", 0);
    }

    // ---- Quadratic transformations, exact coefficients (A.15, A.16) --------
    {
        bool ok = true;
        for (int m = 0; m <= 10 && ok; ++m) {
            auto h2m = hermite_coeffs(2 * m);
            auto l = LaguerrePoly(m, make_rat(-1, 2)).coefficients();
            Rat scale = make_rat(int_pow(Int(2), 2 * m), 1);
            Int mf(1);
            for (int t = 2; t <= m; ++t) mf *= t;
            scale *= Rat(mf);
            if (m % 2) scale = -scale;
            for (int q = 0; q <= 2 * m && ok; ++q) {
                Rat want = (q % 2 == 0) ? scale * l[q / 2] : Rat(0);
                ok = Rat(h2m[q]) == want;
            }
            auto h2m1 = hermite_coeffs(2 * m + 1);
            auto l2 = LaguerrePoly(m, make_rat(1, 2)).coefficients();
            Rat scale2 = make_rat(int_pow(Int(2), 2 * m + 1), 1) * Rat(mf);
            if (m % 2) scale2 = -scale2;
            for (int q = 0; q <= 2 * m + 1 && ok; ++q) {
                Rat want = (q % 2 == 1) ? scale2 * l2[(q - 1) / 2] : Rat(0);
                ok = Rat(h2m1[q]) == want;
            }
        }
        add(out, "hermite_laguerre_quadratic_exact", ok, "H_{2m}, H_{2m+1} coefficients",
            "Laguerre images", 0);
    }

    // ---- Packet factorization and d_n^2 (A.17-A.19) ------------------------
    {
        double worst = 0;
        for (int n = 1; n <= 10; ++n)
            for (double x : {-4.0, -1.1, 0.0, 0.35, 2.2, 3.7}) {
                const double via_laguerre = ((n % 2) ? -1.0 : 1.0) * x *
                                            laguerre_eval(n, -0.5, x * x) * std::exp(-x * x / 2);
                const double via_packet = packet_eval(n, x);
                worst = std::max(worst, std::fabs(via_laguerre - via_packet));
            }
        add(out, "packet_factorization_pointwise", worst < 1e-10, "A_n via Laguerre",
            "d_n x Phi_2n", worst);

        bool ok = true;
        for (int n = 1; n <= 30 && ok; ++n) {
            // d_n^2 = (2n)! sqrt(pi) / (4^n (n!)^2) must equal sqrt(pi) C(2n,n)/4^n
            Int nf(1);
            for (int t = 2; t <= n; ++t) nf *= t;
            Int n2f(1);
            for (int t = 2; t <= 2 * n; ++t) n2f *= t;
            Radical lhs{make_rat(n2f, int_pow(Int(4), n) * nf * nf), Int(1), 1};
            ok = lhs == packet_dn_sq(n);
        }
        add(out, "packet_dn_sq_exact", ok, "(2n)!/(4^n n!^2) sqrt(pi)", "C(2n,n)/4^n sqrt(pi)", 0);

        bool odd_ok = true;
        for (int n = 1; n <= 8; ++n) {
            if (packet_eval(n, 0.0) != 0.0) odd_ok = false;
            for (double x : {0.6, 1.9}) {
                if (std::fabs(packet_eval(n, x) + packet_eval(n, -x)) > 1e-12) odd_ok = false;
            }
        }
        add(out, "packet_odd", odd_ok, "A_n(-x)", "-A_n(x)", 0);
    }

    // ---- Krawtchouk: value agreement and recurrences (A.22-A.30) -----------
    {
        bool ok = true;
        for (int n = 1; n <= 16 && ok; ++n) {
            KrawtchoukTable K(n);
            for (int k = 0; k <= n && ok; ++k)
                for (int d = 0; d <= n && ok; ++d) {
                    ok = K.at(k, d) == krawtchouk_sum_oracle(k, d, n) &&
                         K.at(k, d) == krawtchouk(k, d, n);
                }
        }
        add(out, "krawtchouk_recurrence_vs_sum", ok, "A.29 recurrence", "A.23 double sum", 0);

        // generating function (A.24): coefficients of (1-z)^d (1+z)^{n-d}
        ok = true;
        for (int n : {5, 9, 12})
            for (int d = 0; d <= n && ok; ++d) {
                std::vector<Rat> poly{Rat(1)};
                for (int t = 0; t < d; ++t) poly = poly_mul(poly, {Rat(1), Rat(-1)});
                for (int t = 0; t < n - d; ++t) poly = poly_mul(poly, {Rat(1), Rat(1)});
                for (int k = 0; k <= n && ok; ++k) ok = poly[k] == Rat(krawtchouk(k, d, n));
            }
        add(out, "krawtchouk_generating_function", ok, "(1-z)^d (1+z)^{n-d}", "sum K_k z^k", 0);

        ok = true;
        for (int n = 2; n <= 14 && ok; ++n) {
            KrawtchoukTable K(n);
            for (int k = 0; k <= n && ok; ++k)
                for (int d = 0; d <= n && ok; ++d) {
                    // reflection (A.25) and duality (A.27)
                    Int refl = K.at(k, n - d);
                    ok = refl == ((k % 2) ? Int(-K.at(k, d)) : K.at(k, d));
                    if (ok) ok = binom(n, d) * K.at(k, d) == binom(n, k) * K.at(d, k);
                }
            // orthogonality (A.28)
            for (int k = 0; k <= n && ok; ++k)
                for (int kp = 0; kp <= n && ok; ++kp) {
                    Int acc(0);
                    for (int d = 0; d <= n; ++d) acc += binom(n, d) * K.at(k, d) * K.at(kp, d);
                    Int want = (k == kp) ? int_pow(Int(2), n) * binom(n, k) : Int(0);
                    ok = acc == want;
                }
        }
        add(out, "krawtchouk_reflection_duality_orthogonality", ok, "A.25/A.27/A.28", "exact", 0);

        // normalized recurrence (A.30) on the lattice
        ok = true;
        for (int n = 2; n <= 14 && ok; ++n)
            for (int k = 1; k < n && ok; ++k)
                for (int d = 0; d <= n && ok; ++d) {
                    const Rat r = make_rat(n - 2 * d, n);
                    const Rat lhs = Rat(n) * r * krawtchouk_normalized(k, d, n);
                    const Rat rhs = Rat(n - k) * krawtchouk_normalized(k + 1, d, n) +
                                    Rat(k) * krawtchouk_normalized(k - 1, d, n);
                    ok = lhs == rhs;
                }
        add(out, "krawtchouk_normalized_recurrence", ok, "n r K_k", "(n-k) K_{k+1} + k K_{k-1}", 0);
    }

    // ---- Character sum and addition formula (A.31, A.32) -------------------
    {
        bool ok = true;
        const int n = 10;
        Rng rng(20240901u);
        for (int trial = 0; trial < 40 && ok; ++trial) {
            const uint32_t x = static_cast<uint32_t>(rng.sign_mask(n));
            const uint32_t y = static_cast<uint32_t>(rng.sign_mask(n));
            const auto e = elementary_symmetric_signs(x ^ y, n);
            const int D = std::popcount(x ^ y);
            for (int l = 0; l <= n && ok; ++l)
                ok = Int(static_cast<long>(e[l])) == krawtchouk(l, D, n);
        }
        add(out, "character_sum_krawtchouk", ok, "sum_{|S|=l} chi_S(x)chi_S(y)", "K_l(D;n)", 0);

        ok = true;
        for (int n2 : {8, 11, 12}) {
            Rng rng2(7700 + n2);
            const uint64_t lim = uint64_t(1) << n2;
            for (int trial = 0; trial < 34 && ok; ++trial) {
                const uint64_t u = rng2.sign_mask(n2), v = rng2.sign_mask(n2);
                const int D = std::popcount(u ^ v);
                std::vector<std::vector<int64_t>> accum(n2 + 1, std::vector<int64_t>(n2 + 1, 0));
                for (uint64_t xm = 0; xm < lim; ++xm) {
                    const auto eu = elementary_symmetric_signs(static_cast<uint32_t>(u ^ xm), n2);
                    const auto ev = elementary_symmetric_signs(static_cast<uint32_t>(v ^ xm), n2);
                    for (int l = 0; l <= n2; ++l)
                        for (int lp = 0; lp <= n2; ++lp) accum[l][lp] += eu[l] * ev[lp];
                }
                for (int l = 0; l <= n2 && ok; ++l)
                    for (int lp = 0; lp <= n2 && ok; ++lp) {
                        const Int want = (l == lp)
                                             ? Int(int_pow(Int(2), n2) * krawtchouk(l, D, n2))
                                             : Int(0);
                        ok = Int(static_cast<long>(accum[l][lp])) == want;
                    }
            }
        }
        add(out, "addition_formula_bruteforce", ok,
            "E_x[Psi_l(u.x) Psi_l'(v.x)] (2^n enumeration)", "K_l(<u,v>/n) [l=l']", 0);
    }

    // ---- Scaling laws (Prop A.1 style fits) --------------------------------
    {
        ScalingReport rep = hermite_scaling_report(220);
        const double l1_dev = std::fabs(rep.l1_slope - rep.l1_slope_predicted);
        add(out, "hermite_l1_scaling_slope", l1_dev < 0.05, fmt(rep.l1_slope),
            fmt(rep.l1_slope_predicted) + " +- 0.05", l1_dev);
        const double xd_dev = std::fabs(rep.xd_slope - rep.xd_slope_predicted);
        add(out, "hermite_xdphi_scaling_slope", xd_dev < 0.05, fmt(rep.xd_slope),
            fmt(rep.xd_slope_predicted) + " +- 0.05", xd_dev);
        bool ok = true;
        double worst = 0;
        for (const auto& row : rep.rows) {
            worst = std::max(worst, std::fabs(row.l2_sq - 1.0));
            const double want = row.n + 0.5;
            if (std::fabs(row.x_l2_sq - want) > 1e-6) ok = false;
        }
        add(out, "hermite_fn_l2_selfcheck", worst < 1e-8, "||Phi_n||_2^2", "1 +- 1e-8", worst);
        add(out, "hermite_x_phi_l2", ok, "||x Phi_n||_2^2", "n + 1/2 +- 1e-6", 0);
    }

    return out;
}

}  // namespace cubelab
