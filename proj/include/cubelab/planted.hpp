#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "cubelab/rational.hpp"
#include "cubelab/witness.hpp"

namespace cubelab {

// A hidden direction u in {+-1}^n (n <= 64, kept as a bitmask: set bit means
// the coordinate is -1).
struct Direction {
    int n = 0;
    uint64_t mask = 0;

    int coord(int i) const { return (mask >> i) & 1u ? -1 : 1; }
    long dot(const Direction& o) const;
    std::string to_string() const;  // "+-" pattern
};

struct PackingFamily {
    int n = 0;
    double delta = 0;
    uint64_t seed = 0;
    long draws_used = 0;
    std::vector<Direction> members;
};

// Rejection-sample M directions with |<u,v>| <= delta*n pairwise. Fails with
// BudgetError (carrying the partial size in the message) past the draw budget.
PackingFamily generate_packing(int n, double delta, int target_size, uint64_t seed,
                               long draw_budget);

// The planted labeled distribution D_u(x,y) = 2^{-(n+1)} (1 + y psi(u .* x)).
struct PlantedDist {
    Direction u;
    std::shared_ptr<const WitnessLevels> witness;

    int n() const { return u.n; }
    // psi(u .* x) for x given as a minus-mask.
    Rat psi_at(uint64_t xmask) const;
    // Density at (x, y), y in {+1,-1}.
    Rat density(uint64_t xmask, int y) const;
};

PlantedDist plant(const Direction& u, std::shared_ptr<const WitnessLevels> witness);

// |<psi^{(a)}, psi^{(b)}>| via the Krawtchouk addition formula, exact.
Rat pairwise_chi(const Direction& a, const Direction& b, const WitnessLevels& w);

// Signed version (used by the oracle algebra).
Rat pairwise_inner(const Direction& a, const Direction& b, const WitnessLevels& w);

// <psi^{(a)}, psi^{(b)}> depends only on the Hamming distance between the
// frames; this table precomputes it for all n+1 distances so that family
// scans cost one popcount per pair.
class ChiTable {
public:
    explicit ChiTable(const WitnessLevels& w);
    const Rat& inner_by_distance(int dist) const { return by_dist_.at(dist); }
    Rat inner(const Direction& a, const Direction& b) const;
    Rat chi(const Direction& a, const Direction& b) const { return rat_abs(inner(a, b)); }

private:
    int n_;
    std::vector<Rat> by_dist_;
};

// The constructive small-|r| Krawtchouk bound with the explicit chain
// constants c_p = 2^p/p! and tail constant C_P = 2^{P+1} e^2 (e^2 replaced by
// a rational upper bound, which only weakens the asserted inequality).
Rat krawtchouk_bound_rhs(int d, int n, const Rat& r_abs, int P);

struct BoundDReport {
    int k = 0, n = 0;
    Rat delta;
    Rat rhs;             // constructive eq-(D)-style bound on pairwise chi
    Rat max_chi;         // maximum over the sampled packing
    bool holds = false;
    long pairs_checked = 0;
    std::vector<Rat> moments;  // M_p = sum b_d^2 d^{2p}, p = 0..k+1
};

// Builds the witness at (k,n), samples a packing at the given delta, and
// verifies pairwise_chi <= rhs for every pair, where rhs propagates the
// constructive constants through the degree split at sqrt(n):
//   rhs = delta^{2k+1}
//       + sum_{p=1}^{k} (2^p/p!) n^{-p} delta^{max(0,2k+1-2p)} M_p
//       + (2^{k+1} e^2 + 1) n^{-(k+1)} M_{k+1}.
BoundDReport check_bound_D(int k, int n, double delta, int family_size, uint64_t seed);

// Upper bound (1 - kappa)/2 on the sigma-smoothed halfspace benchmark of the
// planted distribution; by rotation symmetry kappa does not depend on u.
Rat smoothed_benchmark(const Direction& u, const WitnessLevels& w, const Rat& rho);

}  // namespace cubelab
