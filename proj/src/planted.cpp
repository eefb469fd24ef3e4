#include "cubelab/planted.hpp"

#include <bit>
#include <cmath>

#include "cubelab/errors.hpp"
#include "cubelab/orthopoly.hpp"
#include "cubelab/rng.hpp"

namespace cubelab {

long Direction::dot(const Direction& o) const {
    // <u,v> = n - 2 * popcount(u xor v)
    return n - 2 * std::popcount(mask ^ o.mask);
}

std::string Direction::to_string() const {
    std::string s(n, '+');
    for (int i = 0; i < n; ++i)
        if ((mask >> i) & 1u) s[i] = '-';
    return s;
}

PackingFamily generate_packing(int n, double delta, int target_size, uint64_t seed,
                               long draw_budget) {
    if (n < 1 || n > 64) throw std::domain_error("generate_packing: 1 <= n <= 64 required");
    if (!(delta > 0 && delta <= 1)) throw std::domain_error("generate_packing: delta in (0,1] required");
    if (target_size < 1) throw std::domain_error("generate_packing: target size >= 1 required");

    PackingFamily fam;
    fam.n = n;
    fam.delta = delta;
    fam.seed = seed;
    Rng rng(seed);
    const double threshold = delta * n;
    while (static_cast<int>(fam.members.size()) < target_size) {
        if (fam.draws_used >= draw_budget)
            throw BudgetError("generate_packing: draw budget exhausted with " +
                              std::to_string(fam.members.size()) + " of " +
                              std::to_string(target_size) + " members");
        ++fam.draws_used;
        Direction cand{n, rng.sign_mask(n)};
        bool ok = true;
        for (const Direction& u : fam.members) {
            if (u.mask == cand.mask ||
                std::fabs(static_cast<double>(u.dot(cand))) > threshold) {
                ok = false;
                break;
            }
        }
        if (ok) fam.members.push_back(cand);
    }
    return fam;
}

Rat PlantedDist::psi_at(uint64_t xmask) const {
    const int d = std::popcount((u.mask ^ xmask) & ((u.n >= 64) ? ~uint64_t(0)
                                                                : ((uint64_t(1) << u.n) - 1)));
    return witness->psi().value(d);
}

Rat PlantedDist::density(uint64_t xmask, int y) const {
    if (y != 1 && y != -1) throw std::domain_error("PlantedDist::density: y must be +-1");
    const Rat base = make_rat(Int(1), int_pow(Int(2), u.n + 1));
    return base * (1 + Rat(y) * psi_at(xmask));
}

PlantedDist plant(const Direction& u, std::shared_ptr<const WitnessLevels> witness) {
    if (u.n != witness->spec().n)
        throw std::domain_error("plant: direction and witness dimensions differ");
    return PlantedDist{u, std::move(witness)};
}

ChiTable::ChiTable(const WitnessLevels& w) : n_(w.spec().n) {
    KrawtchoukTable K(n_);
    by_dist_.assign(n_ + 1, Rat(0));
    for (int dist = 0; dist <= n_; ++dist) {
        Rat acc(0);
        for (int d = 2 * w.spec().k + 1; d <= n_; d += 2) {
            const Rat b2 = w.b2(d);
            if (b2 == 0) continue;
            acc += b2 * K.normalized(d, dist);
        }
        by_dist_[dist] = acc;
    }
}

Rat ChiTable::inner(const Direction& a, const Direction& b) const {
    if (a.n != n_ || b.n != n_) throw std::domain_error("ChiTable: dimension mismatch");
    return by_dist_.at(std::popcount(a.mask ^ b.mask));
}

Rat pairwise_inner(const Direction& a, const Direction& b, const WitnessLevels& w) {
    if (a.n != b.n || a.n != w.spec().n)
        throw std::domain_error("pairwise_inner: dimension mismatch");
    const int n = a.n;
    const int dist = std::popcount(a.mask ^ b.mask);  // <a,b> = n - 2 dist
    Rat acc(0);
    for (int d = w.spec().k * 2 + 1; d <= n; d += 2) {
        const Rat b2 = w.b2(d);
        if (b2 == 0) continue;
        acc += b2 * krawtchouk_normalized(d, dist, n);
    }
    return acc;
}

Rat pairwise_chi(const Direction& a, const Direction& b, const WitnessLevels& w) {
    return rat_abs(pairwise_inner(a, b, w));
}

Rat krawtchouk_bound_rhs(int d, int n, const Rat& r_abs, int P) {
    if (d < 1 || Int(d) * Int(d) > Int(n))
        throw std::domain_error("krawtchouk_bound_rhs: 0 < d <= sqrt(n) required");
    if (r_abs < 0 || r_abs > 1) throw std::domain_error("krawtchouk_bound_rhs: |r| <= 1 required");
    // Rational upper bound on e^2; using an upper bound keeps every asserted
    // inequality a true consequence of the chain.
    static const Rat e2_up = make_rat(Int("7389056098930651"), int_pow(Int(10), 15));
    Rat rhs = rat_pow(r_abs, d);
    Int fact(1);
    const Rat x = make_rat(Int(d) * Int(d), Int(n));
    for (int p = 1; p <= P; ++p) {
        fact *= p;
        const Rat cp = make_rat(int_pow(Int(2), p), fact);
        rhs += cp * rat_pow(x, p) * rat_pow(r_abs, std::max(0, d - 2 * p));
    }
    rhs += Rat(int_pow(Int(2), P + 1)) * e2_up * rat_pow(x, P + 1);
    return rhs;
}

BoundDReport check_bound_D(int k, int n, double delta, int family_size, uint64_t seed) {
    if (k < 1 || k > (n - 1) / 2)
        throw std::domain_error("check_bound_D: 1 <= k <= (n-1)/2 required");
    BoundDReport rep;
    rep.k = k;
    rep.n = n;
    rep.delta = rat_from_double(delta);

    WitnessLevels w = build_witness(WitnessSpec::for_degree(n, 2 * k));
    for (int p = 0; p <= k + 1; ++p) rep.moments.push_back(w.moment(p));

    // Constructive chain: Lemma-style split of the chi sum at degree sqrt(n),
    // with the exact witness moments in place of the existential moment bound.
    static const Rat e2_up = make_rat(Int("7389056098930651"), int_pow(Int(10), 15));
    Rat rhs = rat_pow(rep.delta, 2 * k + 1);  // Parseval <= 1 on the leading term
    Int fact(1);
    for (int p = 1; p <= k; ++p) {
        fact *= p;
        rhs += make_rat(int_pow(Int(2), p), fact * int_pow(Int(n), p)) *
               rat_pow(rep.delta, std::max(0, 2 * k + 1 - 2 * p)) * rep.moments[p];
    }
    rhs += (Rat(int_pow(Int(2), k + 1)) * e2_up + 1) * rep.moments[k + 1] /
           Rat(int_pow(Int(n), k + 1));
    rep.rhs = rhs;

    PackingFamily fam = generate_packing(n, delta, family_size, seed,
                                         10L * family_size * family_size);
    ChiTable table(w);
    rep.max_chi = Rat(0);
    rep.holds = true;
    for (size_t i = 0; i < fam.members.size(); ++i)
        for (size_t j = i + 1; j < fam.members.size(); ++j) {
            const Rat chi = table.chi(fam.members[i], fam.members[j]);
            ++rep.pairs_checked;
            if (chi > rep.max_chi) rep.max_chi = chi;
            if (chi > rhs) rep.holds = false;
        }
    return rep;
}

Rat smoothed_benchmark(const Direction& u, const WitnessLevels& w, const Rat& rho) {
    (void)u;  // rotation symmetry: the bound is frame-independent
    const Rat kappa = correlation_kappa(rho, w.spec());
    return (1 - kappa) / 2;
}

}  // namespace cubelab
