#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>

#include "cubelab/cube.hpp"
#include "cubelab/l1lp.hpp"
#include "cubelab/learner.hpp"
#include "cubelab/rng.hpp"
#include "cubelab/witness.hpp"

using namespace cubelab;

TEST_CASE("exact distance at the extremes") {
    SymmetricFn maj = majority_levels(9);
    {
        LPResult full = l1_distance(maj, 9);
        REQUIRE(full.status == LPStatus::optimal);
        CHECK(full.optimum == Rat(0));
    }
    {
        LPResult constant = l1_distance(maj, 0);
        REQUIRE(constant.status == LPStatus::optimal);
        CHECK(constant.optimum == Rat(1));  // |Maj| = 1 and 0 is a median
    }
}

TEST_CASE("optimum is nonincreasing in the degree") {
    SymmetricFn target = noise_apply(make_rat(1, 2), majority_levels(11));
    Rat prev(-1);
    for (int m = 5; m >= 0; --m) {
        LPResult res = l1_distance(target, m);
        REQUIRE(res.status == LPStatus::optimal);
        if (prev >= 0) CHECK(res.optimum >= prev);
        prev = res.optimum;
        CHECK(res.optimum >= 0);
    }
}

TEST_CASE("weak duality against the witness, exact") {
    for (int n : {9, 13})
        for (int m : {1, 2}) {
            const Rat rho = make_rat(1, 2);
            SymmetricFn target = noise_apply(rho, majority_levels(n));
            LPResult res = l1_distance(target, m);
            REQUIRE(res.status == LPStatus::optimal);
            const Rat kappa = correlation_kappa(rho, WitnessSpec::for_degree(n, m));
            CHECK(res.optimum > kappa);  // strict: the witness is not LP-optimal
        }
}

TEST_CASE("lp optimum matches a fine coefficient grid at small n") {
    // Independent oracle: degree-1 fit scanned over a grid around the LP
    // solution; the grid can never beat the LP and must come within the
    // grid resolution times the weight mass.
    const int n = 7;
    SymmetricFn target = noise_apply(make_rat(1, 2), majority_levels(n));
    LPResult res = l1_distance(target, 1);
    REQUIRE(res.status == LPStatus::optimal);
    LPInstance inst = make_l1_instance(target, 1);
    auto objective = [&](double a0, double a1) {
        double acc = 0;
        for (int d = 0; d <= n; ++d) {
            const double p = a0 + a1 * to_double(inst.design[d][1]);
            acc += to_double(inst.weights[d]) * std::fabs(to_double(inst.target[d]) - p);
        }
        return acc;
    };
    const double opt = to_double(res.optimum);
    double best = 1e9;
    const double c0 = to_double(res.coefficients[0]), c1 = to_double(res.coefficients[1]);
    for (double a0 = c0 - 0.3; a0 <= c0 + 0.3; a0 += 0.004)
        for (double a1 = c1 - 0.3; a1 <= c1 + 0.3; a1 += 0.004)
            best = std::min(best, objective(a0, a1));
    CHECK(best >= opt - 1e-9);
    CHECK(best - opt < 0.01);
}

TEST_CASE("restriction to symmetric polynomials loses nothing (full-basis LP)") {
    // Exact comparison at small n: the LP over the full multilinear basis of
    // degree <= m attains the same optimum as the symmetric-profile LP.
    for (int m : {1, 2}) {
        const int n = 6;
        SymmetricFn target = noise_apply(make_rat(1, 3), SymmetricFn::from_values(
            n, {Rat(1), Rat(1), Rat(-1), Rat(1), Rat(-1), Rat(-1), Rat(-1)}));
        LPResult sym = l1_distance(target, m);
        REQUIRE(sym.status == LPStatus::optimal);

        // full LP: variables split-coefficients per monomial + residuals
        const auto monos = monomials_up_to(n, m);
        const int nf = static_cast<int>(monos.size());
        const uint32_t points = 1u << n;
        StandardLP lp;
        const int cols = 2 * nf + 3 * static_cast<int>(points);
        const int col_t = 2 * nf;
        const int col_s1 = col_t + points, col_s2 = col_s1 + points;
        lp.c.assign(cols, Rat(0));
        lp.a.assign(2 * points, std::vector<Rat>(cols, Rat(0)));
        lp.b.assign(2 * points, Rat(0));
        const Rat w = make_rat(Int(1), int_pow(Int(2), n));
        for (uint32_t x = 0; x < points; ++x) {
            lp.c[col_t + x] = w;
            auto& r1 = lp.a[2 * x];
            auto& r2 = lp.a[2 * x + 1];
            for (int j = 0; j < nf; ++j) {
                const Rat chi = (std::popcount(x & monos[j]) & 1) ? Rat(-1) : Rat(1);
                r1[j] = chi;
                r1[nf + j] = -chi;
                r2[j] = -chi;
                r2[nf + j] = chi;
            }
            r1[col_t + x] = Rat(1);
            r2[col_t + x] = Rat(1);
            r1[col_s1 + x] = Rat(-1);
            r2[col_s2 + x] = Rat(-1);
            const Rat f = target.value(std::popcount(x));
            lp.b[2 * x] = f;
            lp.b[2 * x + 1] = -f;
        }
        StandardLPResult full = solve_standard_lp(lp, 2000000);
        REQUIRE(full.status == LPStatus::optimal);
        CHECK(full.objective == sym.optimum);
    }
}

TEST_CASE("float fit: exactly representable labels give zero objective") {
    Rng rng(5u);
    const int rows = 60, p = 4;
    std::vector<std::vector<double>> X(rows, std::vector<double>(p));
    std::vector<double> y(rows), w(rows, 1.0 / rows);
    const std::vector<double> truth = {0.3, -1.2, 0.05, 2.0};
    for (int i = 0; i < rows; ++i) {
        X[i][0] = 1;
        for (int j = 1; j < p; ++j) X[i][j] = rng.unit() * 4 - 2;
        y[i] = 0;
        for (int j = 0; j < p; ++j) y[i] += truth[j] * X[i][j];
    }
    L1FitResult fit = l1_fit(X, y, w);
    CHECK(fit.objective < 1e-9);
    for (int j = 0; j < p; ++j) CHECK(fit.coefficients[j] == doctest::Approx(truth[j]).epsilon(1e-6));
}

TEST_CASE("float fit: single constant feature is the weighted median") {
    std::vector<std::vector<double>> X = {{1}, {1}, {1}, {1}, {1}};
    std::vector<double> y = {-3, 0.5, 1, 2, 11};
    std::vector<double> w(5, 0.2);
    L1FitResult fit = l1_fit(X, y, w);
    CHECK(fit.coefficients[0] == doctest::Approx(1.0).epsilon(1e-9));  // median
    // objective = mean absolute deviation around the median
    double mad = 0;
    for (double v : y) mad += 0.2 * std::fabs(v - 1.0);
    CHECK(fit.objective == doctest::Approx(mad).epsilon(1e-9));
}

TEST_CASE("float fit recovers a mode coefficient under bounded noise") {
    // labels = Psi_1-values + bounded noise on n = 9; the fitted coefficient
    // must sit within the noise amplitude of the truth, verified against an
    // exhaustive scan over a coefficient grid.
    const int n = 9;
    Rng rng(77u);
    const int rows = 300;
    std::vector<std::vector<double>> X(rows, std::vector<double>(2));
    std::vector<double> y(rows), w(rows, 1.0 / rows);
    for (int i = 0; i < rows; ++i) {
        const uint64_t x = rng.sign_mask(n);
        const double s = static_cast<double>(n - 2 * std::popcount(x));
        X[i][0] = 1;
        X[i][1] = s / 3.0;  // Psi_1 = sum x_i / sqrt(9)
        y[i] = 0.8 * X[i][1] + (rng.unit() - 0.5) * 0.1;
    }
    L1FitResult fit = l1_fit(X, y, w);
    CHECK(std::fabs(fit.coefficients[1] - 0.8) < 0.05);
    double best = 1e9;
    double best_c = 0;
    for (double c = 0.5; c <= 1.1; c += 0.002) {
        double acc = 0;
        for (int i = 0; i < rows; ++i) acc += w[i] * std::fabs(y[i] - fit.coefficients[0] - c * X[i][1]);
        if (acc < best) {
            best = acc;
            best_c = c;
        }
    }
    CHECK(std::fabs(best_c - fit.coefficients[1]) < 0.01);
    CHECK(fit.objective <= best + 1e-9);
}

TEST_CASE("float fit agrees with the exact simplex on random instances") {
    Rng rng(13u);
    for (int trial = 0; trial < 6; ++trial) {
        const int rows = 18, p = 3;
        std::vector<std::vector<double>> X(rows, std::vector<double>(p));
        std::vector<double> y(rows), w(rows);
        double wsum = 0;
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < p; ++j) X[i][j] = std::floor(rng.unit() * 9) - 4;
            y[i] = std::floor(rng.unit() * 9) - 4;
            w[i] = 1 + std::floor(rng.unit() * 3);
            wsum += w[i];
        }
        for (int i = 0; i < rows; ++i) w[i] /= wsum;
        L1FitResult fit = l1_fit(X, y, w);
        REQUIRE(fit.converged);

        // exact LP on the same data (doubles are dyadic rationals)
        StandardLP lp;
        const int cols = 2 * p + 3 * rows;
        const int col_t = 2 * p, col_s1 = col_t + rows, col_s2 = col_s1 + rows;
        lp.c.assign(cols, Rat(0));
        lp.a.assign(2 * rows, std::vector<Rat>(cols, Rat(0)));
        lp.b.assign(2 * rows, Rat(0));
        for (int i = 0; i < rows; ++i) {
            lp.c[col_t + i] = rat_from_double(w[i]);
            auto& r1 = lp.a[2 * i];
            auto& r2 = lp.a[2 * i + 1];
            for (int j = 0; j < p; ++j) {
                const Rat xij = rat_from_double(X[i][j]);
                r1[j] = xij;
                r1[p + j] = -xij;
                r2[j] = -xij;
                r2[p + j] = xij;
            }
            r1[col_t + i] = Rat(1);
            r2[col_t + i] = Rat(1);
            r1[col_s1 + i] = Rat(-1);
            r2[col_s2 + i] = Rat(-1);
            lp.b[2 * i] = rat_from_double(y[i]);
            lp.b[2 * i + 1] = -rat_from_double(y[i]);
        }
        StandardLPResult exact = solve_standard_lp(lp);
        REQUIRE(exact.status == LPStatus::optimal);
        CHECK(fit.objective == doctest::Approx(to_double(exact.objective)).epsilon(1e-7));
    }
}

TEST_CASE("l1_fit input validation") {
    std::vector<std::vector<double>> X = {{1, 0}};
    std::vector<double> y = {1}, w = {1};
    CHECK_THROWS_AS(l1_fit(X, y, w), std::domain_error);  // p > rows
    CHECK_THROWS_AS(l1_fit({}, {}, {}), std::domain_error);
}

TEST_CASE("instance weights sum to one and the design is well formed") {
    SymmetricFn maj = majority_levels(11);
    LPInstance inst = make_l1_instance(maj, 3);
    Rat total(0);
    for (const auto& w : inst.weights) total += w;
    CHECK(total == Rat(1));
    for (int d = 0; d <= 11; ++d) CHECK(inst.design[d][0] == Rat(1));
}
