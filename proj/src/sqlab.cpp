#include "cubelab/sqlab.hpp"

#include <bit>
#include <cmath>

#include "cubelab/errors.hpp"
#include "cubelab/orthopoly.hpp"
#include "cubelab/rng.hpp"

namespace cubelab {

namespace {

uint64_t fnv1a(uint64_t h, const void* data, size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

uint64_t fnv1a_str(uint64_t h, const std::string& s) { return fnv1a(h, s.data(), s.size()); }

}  // namespace

Query Query::raw(int n, std::vector<Rat> table) {
    if (n < 1 || n > 20) throw std::domain_error("Query::raw: 1 <= n <= 20 required");
    if (table.size() != (size_t(1) << (n + 1)))
        throw std::domain_error("Query::raw: table must have 2^{n+1} entries");
    for (const Rat& v : table)
        if (v < 0 || v > 1) throw std::domain_error("Query::raw: values must lie in [0,1]");
    Query q;
    q.kind = Kind::raw;
    q.n = n;
    q.table = std::move(table);
    return q;
}

Query Query::correlation(std::shared_ptr<const SymmetricFn> h, const Direction& frame) {
    if (!h) throw std::domain_error("Query::correlation: missing h");
    if (h->n() != frame.n) throw std::domain_error("Query::correlation: dimension mismatch");
    for (const Rat& v : h->values())
        if (rat_abs(v) > 1)
            throw std::domain_error("Query::correlation: ||h||_inf <= 1 violated");
    Query q;
    q.kind = Kind::correlation;
    q.n = frame.n;
    q.h = std::move(h);
    q.frame = frame;
    return q;
}

uint64_t Query::content_hash() const {
    uint64_t h = 0xcbf29ce484222325ull;
    const int kind_tag = static_cast<int>(kind);
    h = fnv1a(h, &kind_tag, sizeof kind_tag);
    h = fnv1a(h, &n, sizeof n);
    if (kind == Kind::raw) {
        for (const Rat& v : table) h = fnv1a_str(h, rat_str(v));
    } else {
        h = fnv1a(h, &frame.mask, sizeof frame.mask);
        for (const Rat& v : this->h->values()) h = fnv1a_str(h, rat_str(v));
    }
    return h;
}

OracleConfig OracleConfig::stat(const Rat& tau, Adversary adv) {
    if (!(tau > 0)) throw std::domain_error("OracleConfig::stat: tau > 0 required");
    return OracleConfig{Mode::stat, tau, adv, std::nullopt};
}

OracleConfig OracleConfig::vstat(const Rat& t, Adversary adv) {
    if (!(t > 0)) throw std::domain_error("OracleConfig::vstat: t > 0 required");
    return OracleConfig{Mode::vstat, t, adv, std::nullopt};
}

Rat exact_expectation(const PlantedDist& dist, const Query& q) {
    if (q.n != dist.n()) throw std::domain_error("exact_expectation: dimension mismatch");
    if (q.kind == Query::Kind::raw) {
        const int n = q.n;
        Rat acc(0);
        for (uint64_t x = 0; x < (uint64_t(1) << n); ++x) {
            const Rat psi = dist.psi_at(x);
            // density = 2^{-(n+1)} (1 + y psi)
            acc += (1 + psi) * q.table[2 * x + 1] + (1 - psi) * q.table[2 * x];
        }
        return acc / Rat(int_pow(Int(2), n + 1));
    }
    // correlation: E[q] = 1/2 + <h(frame .* x), psi(u .* x)>/2; the rotated
    // inner product collapses through the addition formula to a Krawtchouk
    // value at the frame/direction distance.
    const int n = q.n;
    const int dist_uu = std::popcount(q.frame.mask ^ dist.u.mask);
    KrawtchoukTable K(n);
    Rat inner(0);
    for (int d = 0; d <= n; ++d) {
        const Rat ch = q.h->reduced_level(d);
        const Rat cpsi = dist.witness->psi().reduced_level(d);
        if (ch == 0 || cpsi == 0) continue;
        inner += ch * cpsi * Rat(binom(n, d)) * K.normalized(d, dist_uu);
    }
    return make_rat(1, 2) + inner / 2;
}

Rat reference_expectation(const Query& q) {
    if (q.kind == Query::Kind::correlation) return make_rat(1, 2);
    Rat acc(0);
    for (const Rat& v : q.table) acc += v;
    return acc / Rat(int_pow(Int(2), q.n + 1));
}

SQOracle::SQOracle(OracleConfig cfg, PlantedDist dist) : cfg_(cfg), dist_(std::move(dist)) {}

Rat SQOracle::tolerance_sq(const Rat& p) const {
    if (cfg_.mode == OracleConfig::Mode::stat) return cfg_.param * cfg_.param;
    const Rat inv_t2 = 1 / (cfg_.param * cfg_.param);
    const Rat var_term = p * (1 - p) / cfg_.param;
    return std::max(inv_t2, var_term);
}

Rat SQOracle::answer(const Query& q) {
    const Rat p = exact_expectation(dist_, q);
    const Rat tol2 = tolerance_sq(p);
    const double tol = std::sqrt(to_double(tol2));

    TranscriptRow row;
    row.query_id = q.content_hash();
    row.true_p = p;
    row.tol_sq = tol2;
    row.tol_f = tol;

    if (cfg_.adversary == OracleConfig::Adversary::honest) {
        row.answer = p;
        if (cfg_.jitter_seed) {
            // Deterministic jitter inside half the allowed band.
            Rng rng(*cfg_.jitter_seed + transcript_.query_count);
            const double off = (rng.unit() * 2 - 1) * tol / 2;
            Rat jittered = p + rat_from_double(off);
            if ((jittered - p) * (jittered - p) <= tol2 && jittered >= 0 && jittered <= 1)
                row.answer = jittered;
        }
        row.answer_f = to_double(row.answer);
    } else {
        // Reference-pull: the least informative legal answer is the reference
        // distribution's value clamped into [p - tau, p + tau].
        const Rat p0 = reference_expectation(q);
        const Rat diff = p0 - p;
        if (diff * diff <= tol2) {
            row.answer = p0;
            row.answer_f = to_double(p0);
        } else {
            row.answer_on_boundary = true;
            const double pd = to_double(p);
            row.answer_f = (diff > 0) ? pd + tol : pd - tol;
            row.answer = rat_from_double(row.answer_f);
        }
    }

    // Per-row soundness: the answer must be a legal oracle reply.
    if (!row.answer_on_boundary) {
        const Rat d = row.answer - p;
        if (d * d > tol2)
            throw ConsistencyError("SQOracle: produced an answer outside its tolerance");
    }
    transcript_.rows.push_back(row);
    ++transcript_.query_count;
    return row.answer;
}

Rat average_correlation(const std::vector<Direction>& members, const WitnessLevels& w) {
    if (members.empty()) throw std::domain_error("average_correlation: empty set");
    ChiTable table(w);
    Rat acc(0);
    for (size_t i = 0; i < members.size(); ++i)
        for (size_t j = 0; j < members.size(); ++j)
            acc += rat_abs(table.inner(members[i], members[j]));
    const Rat M(static_cast<long>(members.size()));
    return acc / (M * M);
}

int select_hardness_degree(double sigma, double eps, double a0) {
    if (!(sigma > 0 && sigma <= 0.499))
        throw std::domain_error("select_hardness_degree: sigma in (0, 0.499] required");
    if (!(eps > 0 && eps <= 0.25))
        throw std::domain_error("select_hardness_degree: eps in (0, 1/4] required");
    if (!(a0 > 0)) throw std::domain_error("select_hardness_degree: a0 > 0 required");
    return static_cast<int>(std::floor(a0 * std::log1p(sigma / (eps * eps)) / sigma));
}

int largest_hard_degree(int n, const Rat& rho, const Rat& bound) {
    if (n < 3 || n % 2 == 0) throw std::domain_error("largest_hard_degree: odd n >= 3 required");
    for (int m = n - 1; m >= 1; --m) {
        const Rat kappa = correlation_kappa(rho, WitnessSpec::for_degree(n, m));
        if (kappa >= bound) return m;
    }
    return 0;
}

AttackResult correlation_attack(const PackingFamily& family,
                                std::shared_ptr<const WitnessLevels> witness,
                                const OracleConfig& cfg, uint64_t seed) {
    if (family.members.empty()) throw std::domain_error("correlation_attack: empty family");
    if (cfg.adversary != OracleConfig::Adversary::reference_pull)
        throw std::domain_error("correlation_attack: oracle must be in reference-pull mode");

    Rng rng(seed);
    const int planted = static_cast<int>(rng.below(family.members.size()));
    PlantedDist dist = plant(family.members[planted], witness);
    SQOracle oracle(cfg, dist);

    auto h = std::make_shared<const SymmetricFn>(witness->psi());

    AttackResult res;
    res.planted_index = planted;
    const Rat half = make_rat(1, 2);
    res.tolerance_at_half = std::sqrt(to_double(oracle.tolerance_sq(half)));
    for (size_t v = 0; v < family.members.size(); ++v) {
        Query q = Query::correlation(h, family.members[v]);
        const Rat ans = oracle.answer(q);
        if (ans != half) {
            res.detected = true;
            res.declared_index = static_cast<int>(v);
            break;
        }
    }
    res.queries = oracle.transcript().query_count;
    res.transcript = oracle.transcript();
    res.transcript.final_answer = res.detected ? std::optional<int>(res.declared_index)
                                               : std::nullopt;
    return res;
}

}  // namespace cubelab
