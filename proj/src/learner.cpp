#include "cubelab/learner.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

#include "cubelab/errors.hpp"
#include "cubelab/l1lp.hpp"
#include "cubelab/rng.hpp"

namespace cubelab {

int degree_for_eps(double sigma, double eps) {
    if (!(sigma > 0 && sigma < 0.5)) throw std::domain_error("degree_for_eps: sigma in (0,1/2)");
    if (!(eps > 0 && eps < 1)) throw std::domain_error("degree_for_eps: eps in (0,1)");
    const double rho = 1 - 2 * sigma;
    int d = 0;
    double p = rho;  // rho^{d+1}
    while (p > eps / 2) {
        p *= rho;
        ++d;
    }
    return d;
}

Rat truncation_error_sq(const SymmetricFn& f, const Rat& rho, int d) {
    Rat acc(0);
    const Rat rho2 = rho * rho;
    Rat p = rat_pow(rho2, d + 1);
    for (int k = d + 1; k <= f.n(); ++k) {
        const Rat c = f.reduced_level(k);
        acc += p * c * c * Rat(binom(f.n(), k));
        p *= rho2;
    }
    return acc;
}

std::vector<Sample> draw_samples(const PlantedDist& dist, long N, uint64_t seed) {
    if (N < 1) throw std::domain_error("draw_samples: N >= 1 required");
    const int n = dist.n();
    if (n > 32) throw std::domain_error("draw_samples: n <= 32 required");

    // P[y=+1 | x] depends only on the Hamming distance between x and the
    // hidden direction; precompute 64-bit acceptance thresholds per distance.
    const Int two64 = int_pow(Int(2), 64);
    std::vector<uint64_t> threshold(n + 1);
    for (int d = 0; d <= n; ++d) {
        const Rat p = (1 + dist.witness->psi().value(d)) / 2;
        Int t = Int(p.get_num() * two64 / p.get_den());
        if (t >= two64) t = two64 - 1;
        threshold[d] = t.get_ui() | (t.fits_ulong_p() ? 0 : 0);  // t < 2^64 by construction
    }

    Rng rng(seed);
    std::vector<Sample> out;
    out.reserve(N);
    for (long i = 0; i < N; ++i) {
        const uint32_t x = static_cast<uint32_t>(rng.sign_mask(n));
        const int d = std::popcount((uint64_t)((x ^ dist.u.mask) & ((uint64_t(1) << n) - 1)));
        const uint64_t w = rng.word();
        out.push_back(Sample{x, static_cast<int8_t>(w < threshold[d] ? 1 : -1)});
    }
    return out;
}

std::vector<uint32_t> monomials_up_to(int n, int degree) {
    std::vector<uint32_t> out;
    for (int deg = 0; deg <= degree; ++deg) {
        if (deg == 0) {
            out.push_back(0);
            continue;
        }
        // Gosper's hack over masks of popcount deg.
        uint32_t v = (uint32_t(1) << deg) - 1;
        const uint32_t limit = uint32_t(1) << n;
        while (v < limit) {
            out.push_back(v);
            uint32_t t = v | (v - 1);
            v = (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
        }
    }
    return out;
}

double Hypothesis::poly_value(uint32_t xmask) const {
    double acc = 0;
    for (size_t j = 0; j < monomials.size(); ++j) {
        const int par = std::popcount(xmask & monomials[j]) & 1;
        acc += par ? -coefficients[j] : coefficients[j];
    }
    return acc;
}

int Hypothesis::predict(uint32_t xmask) const {
    return poly_value(xmask) - threshold >= 0 ? 1 : -1;
}

namespace {

// Aggregated rows: one per observed (x, y) pair, weighted by multiplicity.
struct AggregatedRows {
    std::vector<uint32_t> xs;
    std::vector<int8_t> ys;
    std::vector<long> counts;
    long total = 0;
};

AggregatedRows aggregate(const std::vector<Sample>& samples) {
    AggregatedRows agg;
    std::unordered_map<uint64_t, size_t> index;
    index.reserve(samples.size() * 2);
    for (const Sample& s : samples) {
        const uint64_t key = (uint64_t(s.xmask) << 1) | (s.y > 0 ? 1u : 0u);
        auto [it, fresh] = index.try_emplace(key, agg.xs.size());
        if (fresh) {
            agg.xs.push_back(s.xmask);
            agg.ys.push_back(s.y);
            agg.counts.push_back(0);
        }
        ++agg.counts[it->second];
    }
    agg.total = static_cast<long>(samples.size());
    return agg;
}

// +-1 parity features, cached as a row-major sign matrix so the simplex
// pricing loop vectorizes.
class ParitySource final : public FeatureSource {
public:
    ParitySource(const AggregatedRows& agg, const std::vector<uint32_t>& monomials)
        : agg_(agg), p_(monomials.size()) {
        signs_.resize(agg.xs.size() * p_);
        for (size_t i = 0; i < agg.xs.size(); ++i) {
            const uint32_t x = agg.xs[i];
            int8_t* row = &signs_[i * p_];
            for (size_t j = 0; j < p_; ++j)
                row[j] = (std::popcount(x & monomials[j]) & 1) ? int8_t(-1) : int8_t(1);
        }
    }

    int rows() const override { return static_cast<int>(agg_.xs.size()); }
    int cols() const override { return static_cast<int>(p_); }
    double y(int i) const override { return agg_.ys[i] > 0 ? 1.0 : -1.0; }
    double w(int i) const override {
        return static_cast<double>(agg_.counts[i]) / static_cast<double>(agg_.total);
    }
    double dot(int i, const double* v) const override {
        const int8_t* row = &signs_[static_cast<size_t>(i) * p_];
        double acc = 0;
        for (size_t j = 0; j < p_; ++j) acc += static_cast<double>(row[j]) * v[j];
        return acc;
    }
    void write(int i, double* out) const override {
        const int8_t* row = &signs_[static_cast<size_t>(i) * p_];
        for (size_t j = 0; j < p_; ++j) out[j] = static_cast<double>(row[j]);
    }
    double at(int i, int j) const override {
        return static_cast<double>(signs_[static_cast<size_t>(i) * p_ + j]);
    }

private:
    const AggregatedRows& agg_;
    size_t p_;
    std::vector<int8_t> signs_;
};

}  // namespace

Hypothesis train(const std::vector<Sample>& samples, int n, int degree, long feature_budget) {
    if (samples.empty()) throw std::domain_error("train: no samples");
    if (n < 1 || n > 32) throw std::domain_error("train: 1 <= n <= 32 required");
    if (degree < 0 || degree > n) throw std::domain_error("train: 0 <= degree <= n required");

    Int feature_count(0);
    for (int j = 0; j <= degree; ++j) feature_count += binom(n, j);
    if (feature_count > feature_budget)
        throw BudgetError("train: feature budget exceeded (" + feature_count.get_str() + " > " +
                          std::to_string(feature_budget) + " columns)");

    Hypothesis h;
    h.n = n;
    h.degree = degree;
    h.monomials = monomials_up_to(n, degree);

    AggregatedRows agg = aggregate(samples);
    if (static_cast<long>(h.monomials.size()) > static_cast<long>(agg.xs.size())) {
        // Fewer distinct rows than features: drop to the plain least-L1
        // interpolation over the observed rows by trimming high monomials.
        throw BudgetError("train: fewer distinct sample rows than features; more samples needed");
    }
    ParitySource src(agg, h.monomials);
    // The exchange solver starts from an IRLS/coordinate-descent point that
    // is within ~1% of the LP optimum; the budget below trades the last
    // fraction of LP convergence for bounded runtime on wide designs and is
    // reported through the converged flag (best-bound semantics).
    const long budget = std::max<long>(4 * h.monomials.size(), 2500);
    L1FitResult fit = l1_fit(src, budget);
    h.coefficients = fit.coefficients;

    // Exhaustive threshold search over the sample-induced cuts of the fitted
    // values, minimizing empirical 0/1 error; candidate cuts are midpoints of
    // consecutive distinct values plus one below and one above.
    struct Cell {
        double value;
        long plus;
        long minus;
    };
    std::unordered_map<uint32_t, size_t> seen;
    std::vector<Cell> cells;
    for (size_t i = 0; i < agg.xs.size(); ++i) {
        auto [it, fresh] = seen.try_emplace(agg.xs[i], cells.size());
        if (fresh) cells.push_back(Cell{h.poly_value(agg.xs[i]), 0, 0});
        if (agg.ys[i] > 0) cells[it->second].plus += agg.counts[i];
        else cells[it->second].minus += agg.counts[i];
    }
    std::sort(cells.begin(), cells.end(),
              [](const Cell& a, const Cell& b) { return a.value < b.value; });

    long total_plus = 0, total_minus = 0;
    for (const Cell& c : cells) {
        total_plus += c.plus;
        total_minus += c.minus;
    }

    std::vector<double> candidates;
    candidates.push_back(cells.front().value - 1.0);
    for (size_t i = 0; i + 1 < cells.size(); ++i)
        if (cells[i].value < cells[i + 1].value)
            candidates.push_back((cells[i].value + cells[i + 1].value) / 2);
    candidates.push_back(cells.back().value + 1.0);

    // Sweeping t upward: points below t predict -1. errors(t) =
    // (plus below t) + (minus at or above t).
    long best_err = -1;
    double best_t = 0;
    size_t idx = 0;
    long plus_below = 0, minus_below = 0;
    for (double t : candidates) {
        while (idx < cells.size() && cells[idx].value < t) {
            plus_below += cells[idx].plus;
            minus_below += cells[idx].minus;
            ++idx;
        }
        const long err = plus_below + (total_minus - minus_below);
        if (best_err < 0 || err < best_err ||
            (err == best_err && std::fabs(t) < std::fabs(best_t))) {
            best_err = err;
            best_t = t;
        }
    }
    h.threshold = best_t;
    return h;
}

ExactError exact_error(const Hypothesis& h, const PlantedDist& dist) {
    const int n = dist.n();
    if (n > 20) throw std::domain_error("exact_error: n <= 20 required");
    if (h.n != n) throw std::domain_error("exact_error: dimension mismatch");

    // corr = E[Y h(X)] = E_x[h(x) psi(u .* x)]; group by (sign, profile d).
    std::vector<long> count_plus(n + 1, 0), count_minus(n + 1, 0);
    const uint64_t lim = uint64_t(1) << n;
    const uint64_t nmask = lim - 1;
    for (uint64_t x = 0; x < lim; ++x) {
        const int d = std::popcount((x ^ dist.u.mask) & nmask);
        if (h.predict(static_cast<uint32_t>(x)) > 0) ++count_plus[d];
        else ++count_minus[d];
    }
    Rat corr(0), err(0);
    const Rat two_n(int_pow(Int(2), n));
    for (int d = 0; d <= n; ++d) {
        const Rat psi = dist.witness->psi().value(d);
        corr += Rat(count_plus[d] - count_minus[d]) * psi;
        // err = E_x[(1 - h psi)/2]
        err += Rat(count_plus[d]) * (1 - psi) / 2 + Rat(count_minus[d]) * (1 + psi) / 2;
    }
    corr /= two_n;
    err /= two_n;
    if (err != (1 - corr) / 2)
        throw ConsistencyError("exact_error: err = (1-corr)/2 identity failed");
    return ExactError{err, corr};
}

}  // namespace cubelab
