#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cubelab/errors.hpp"
#include "cubelab/orthopoly.hpp"

using namespace cubelab;

TEST_CASE("krawtchouk single values") {
    CHECK(krawtchouk(0, 7, 10) == 1);
    CHECK(krawtchouk(2, 0, 5) == 10);          // K_k(0;n) = C(n,k)
    CHECK(krawtchouk(1, 3, 10) == 4);          // n - 2d
    CHECK_THROWS_AS(krawtchouk(3, 1, 2), std::domain_error);
    CHECK_THROWS_AS(krawtchouk(1, -1, 4), std::domain_error);
    CHECK_THROWS_AS(krawtchouk(1, 5, 4), std::domain_error);
}

TEST_CASE("krawtchouk normalized values") {
    CHECK(krawtchouk_normalized(3, 0, 9) == Rat(1));
    CHECK(krawtchouk_normalized(3, 4, 8) == Rat(0));  // odd k at the midpoint
    CHECK(krawtchouk_normalized(5, 6, 12) == Rat(0));
    CHECK(krawtchouk_normalized(2, 6, 6) == Rat(1));  // reflection with (-1)^2
}

TEST_CASE("krawtchouk recurrence agrees with the alternating sum oracle") {
    for (int n = 0; n <= 20; ++n) {
        KrawtchoukTable table(n);
        for (int k = 0; k <= n; ++k)
            for (int d = 0; d <= n; ++d) {
                CAPTURE(n);
                CAPTURE(k);
                CAPTURE(d);
                REQUIRE(table.at(k, d) == krawtchouk_sum_oracle(k, d, n));
            }
    }
}

TEST_CASE("krawtchouk exact orthogonality and structural identities") {
    for (int n = 1; n <= 20; ++n) {
        KrawtchoukTable K(n);
        for (int k = 0; k <= n; ++k) {
            REQUIRE(K.at(k, 0) == binom(n, k));
            for (int kp = 0; kp <= n; ++kp) {
                Int acc(0);
                for (int d = 0; d <= n; ++d) acc += binom(n, d) * K.at(k, d) * K.at(kp, d);
                const Int want = (k == kp) ? Int(int_pow(Int(2), n) * binom(n, k)) : Int(0);
                REQUIRE(acc == want);
            }
            for (int d = 0; d <= n; ++d) {
                // reflection and duality
                REQUIRE(K.at(k, n - d) == ((k % 2) ? Int(-K.at(k, d)) : K.at(k, d)));
                REQUIRE(binom(n, d) * K.at(k, d) == binom(n, k) * K.at(d, k));
            }
        }
    }
}

TEST_CASE("normalized degree recurrence holds exactly on the lattice") {
    for (int n = 2; n <= 20; ++n)
        for (int k = 1; k < n; ++k)
            for (int d = 0; d <= n; ++d) {
                const Rat r = make_rat(n - 2 * d, n);
                const Rat lhs = Rat(n) * r * krawtchouk_normalized(k, d, n);
                const Rat rhs = Rat(n - k) * krawtchouk_normalized(k + 1, d, n) +
                                Rat(k) * krawtchouk_normalized(k - 1, d, n);
                REQUIRE(lhs == rhs);
            }
}

TEST_CASE("krawtchouk polynomial evaluation matches the lattice") {
    for (int n : {6, 11}) {
        for (int k = 0; k <= n; ++k)
            for (int d = 0; d <= n; ++d)
                REQUIRE(krawtchouk_normalized_at(k, n, make_rat(n - 2 * d, n)) ==
                        krawtchouk_normalized(k, d, n));
    }
}

TEST_CASE("laguerre evaluation") {
    CHECK(LaguerrePoly(0, make_rat(1, 2)).eval(Rat(3)) == Rat(1));
    CHECK(LaguerrePoly(0, make_rat(-1, 2)).eval(Rat(7)) == Rat(1));
    CHECK(LaguerrePoly(1, make_rat(1, 2)).eval(Rat(0)) == make_rat(3, 2));
    // parameter-shift identity at x = 0: L_2^{1/2}(0) - L_1^{1/2}(0) = L_2^{-1/2}(0)
    const Rat shift = LaguerrePoly(2, make_rat(1, 2)).eval(Rat(0)) -
                      LaguerrePoly(1, make_rat(1, 2)).eval(Rat(0));
    CHECK(shift == make_rat(3, 8));
    CHECK(shift == LaguerrePoly(2, make_rat(-1, 2)).eval(Rat(0)));
    CHECK_THROWS_AS(LaguerrePoly(1, Rat(-2)), std::domain_error);
}

TEST_CASE("laguerre parameter-shift identity as polynomials") {
    for (int k = 0; k <= 9; ++k) {
        const auto a = LaguerrePoly(k + 1, make_rat(1, 2)).coefficients();
        const auto b = LaguerrePoly(k, make_rat(1, 2)).coefficients();
        const auto c = LaguerrePoly(k + 1, make_rat(-1, 2)).coefficients();
        for (size_t j = 0; j < a.size(); ++j) {
            const Rat bj = j < b.size() ? b[j] : Rat(0);
            REQUIRE(a[j] - bj == c[j]);
        }
    }
}

TEST_CASE("laguerre float recurrence matches exact coefficients") {
    for (int m : {1, 3, 7})
        for (double alpha : {0.5, -0.5})
            for (double x : {0.0, 0.7, 4.2, 19.5}) {
                LaguerrePoly L(m, rat_from_double(alpha));
                CHECK(laguerre_eval(m, alpha, x) == doctest::Approx(L.eval(x)).epsilon(1e-12));
            }
}

TEST_CASE("laguerre moments") {
    // binom(r,m) convention: zero when r < m
    CHECK(laguerre_moment(3, make_rat(1, 2), 1).coef == Rat(0));
    {
        const auto gm = laguerre_moment(0, make_rat(1, 2), 2);
        CHECK(gm.coef == Rat(1));
        CHECK(gm.gamma_arg == make_rat(7, 2));
    }
    {
        const auto gm = laguerre_moment(2, make_rat(-1, 2), 2);
        CHECK(gm.coef == Rat(1));
        CHECK(gm.gamma_arg == make_rat(5, 2));
        // Gamma(5/2) = 3/4 sqrt(pi)
        CHECK(gm.to_radical() == Radical{make_rat(3, 4), Int(1), 1});
    }
}

TEST_CASE("laguerre moment identity against exact integration") {
    for (const Rat& alpha : {make_rat(1, 2), make_rat(-1, 2)})
        for (int m = 0; m <= 6; ++m)
            for (long r = 0; r <= 7; ++r) {
                std::vector<Rat> shifted(LaguerrePoly(m, alpha).coefficients());
                shifted.insert(shifted.begin(), r, Rat(0));
                REQUIRE(weighted_poly_integral(shifted, alpha) ==
                        laguerre_moment(m, alpha, r).to_radical());
            }
}

TEST_CASE("laguerre generating function converges geometrically") {
    const double x = 1.0, z = 0.5, alpha = 0.5;
    const double closed = std::pow(1 - z, -alpha - 1) * std::exp(-x * z / (1 - z));
    double acc = 0;
    double prev_gap = 1e9;
    for (int m = 0; m <= 70; ++m) {
        acc += laguerre_eval(m, alpha, x) * std::pow(z, m);
        if (m % 10 == 9) {
            const double gap = std::fabs(acc - closed);
            CHECK(gap < prev_gap * 0.9);
            prev_gap = std::max(gap, 1e-14);
        }
    }
    CHECK(std::fabs(acc - closed) < 1e-10);
}

TEST_CASE("hermite basics") {
    CHECK(hermite_eval(2, 1.0) == 2.0);  // 4x^2 - 2
    const auto h2 = hermite_coeffs(2);
    CHECK(h2 == std::vector<Int>{Int(-2), Int(0), Int(4)});
    // H_2(x) = -4 L_1^{(-1/2)}(x^2)
    for (double x = -5; x <= 5; x += 0.5)
        CHECK(hermite_eval(2, x) ==
              doctest::Approx(-4 * laguerre_eval(1, -0.5, x * x)).epsilon(1e-12));
}

TEST_CASE("quadratic transformations pointwise") {
    for (int m = 0; m <= 10; ++m) {
        double fact = 1;
        for (int t = 2; t <= m; ++t) fact *= t;
        const double sign = (m % 2) ? -1.0 : 1.0;
        for (double x = -5; x <= 5; x += 0.25) {
            const double even = sign * std::pow(2.0, 2 * m) * fact * laguerre_eval(m, -0.5, x * x);
            CHECK(hermite_eval(2 * m, x) == doctest::Approx(even).epsilon(1e-10));
            const double odd =
                sign * std::pow(2.0, 2 * m + 1) * fact * x * laguerre_eval(m, 0.5, x * x);
            CHECK(hermite_eval(2 * m + 1, x) == doctest::Approx(odd).epsilon(1e-10));
        }
    }
}

TEST_CASE("hermite functions avoid overflow and underflow") {
    // naive H_k e^{-x^2/2} would overflow/underflow far out in the tail
    const double v = hermite_fn(600, 34.0);
    CHECK(std::isfinite(v));
    CHECK(v != 0.0);  // 34 < sqrt(1201): still inside the oscillatory region
    CHECK(std::isfinite(hermite_fn(600, 80.0)));  // deep tail: tiny but finite
    CHECK(std::fabs(hermite_fn(600, 80.0)) < 1e-100);
}

TEST_CASE("packet values") {
    for (int n = 1; n <= 8; ++n) {
        CHECK(packet_eval(n, 0.0) == 0.0);
        for (double x : {0.3, 1.2, 2.6}) {
            CHECK(packet_eval(n, x) == doctest::Approx(-packet_eval(n, -x)).epsilon(1e-12));
            const double direct = ((n % 2) ? -1.0 : 1.0) * x * laguerre_eval(n, -0.5, x * x) *
                                  std::exp(-x * x / 2);
            CHECK(packet_eval(n, x) == doctest::Approx(direct).epsilon(1e-10));
        }
    }
    // d_n^2 exact form
    CHECK(packet_dn_sq(3) == Radical{make_rat(binom(6, 3), 64), Int(1), 1});
}

TEST_CASE("hermite scaling report") {
    CHECK_THROWS_AS(hermite_scaling_report(3), std::domain_error);
    ScalingReport rep = hermite_scaling_report(150);
    CHECK(std::fabs(rep.l1_slope - 0.25) < 0.05);
    CHECK(std::fabs(rep.xd_slope - 0.75) < 0.05);
    for (const auto& row : rep.rows) {
        CHECK(std::fabs(row.l2_sq - 1.0) < 1e-8);
        CHECK(std::fabs(row.x_l2_sq - (row.n + 0.5)) < 1e-6);
    }
    CHECK(rep.l1_fitted_const > 0);
}
