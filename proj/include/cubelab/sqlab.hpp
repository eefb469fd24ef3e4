#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "cubelab/planted.hpp"

namespace cubelab {

// A statistical query with values in [0,1].
struct Query {
    enum class Kind { raw, correlation };
    Kind kind = Kind::raw;
    int n = 0;

    // raw: table over (x, y), indexed 2*xmask + (y == +1); n <= 20.
    std::vector<Rat> table;

    // correlation: q(x,y) = (1 + y h(frame .* x)) / 2 with ||h||_inf <= 1.
    std::shared_ptr<const SymmetricFn> h;
    Direction frame;

    static Query raw(int n, std::vector<Rat> table);
    static Query correlation(std::shared_ptr<const SymmetricFn> h, const Direction& frame);

    uint64_t content_hash() const;
};

struct OracleConfig {
    enum class Mode { stat, vstat };
    enum class Adversary { honest, reference_pull };
    Mode mode = Mode::vstat;
    Rat param;  // tau for STAT, t for VSTAT
    Adversary adversary = Adversary::honest;
    std::optional<uint64_t> jitter_seed;  // honest mode only; default exact

    static OracleConfig stat(const Rat& tau, Adversary adv = Adversary::honest);
    static OracleConfig vstat(const Rat& t, Adversary adv = Adversary::honest);
};

struct TranscriptRow {
    uint64_t query_id = 0;
    Rat true_p;
    Rat answer;        // exact answer value
    bool answer_on_boundary = false;  // answer is p +- tau with tau irrational
    double answer_f = 0;
    Rat tol_sq;        // tau^2, exact
    double tol_f = 0;
};

struct SQTranscript {
    std::vector<TranscriptRow> rows;
    long query_count = 0;
    std::optional<int> final_answer;  // index of the declared direction
};

// E_{D_u}[q], exact. Raw queries enumerate the density; correlation queries
// go through the addition formula when h is in a declared frame.
Rat exact_expectation(const PlantedDist& dist, const Query& q);

// E_{D_0}[q] under the unlabeled-uniform reference.
Rat reference_expectation(const Query& q);

// Stateful oracle; one instance per logical thread of control.
class SQOracle {
public:
    SQOracle(OracleConfig cfg, PlantedDist dist);

    // Returns the oracle answer and appends a transcript row. Every answer is
    // a legal (V)STAT answer by construction; this is re-asserted per row.
    Rat answer(const Query& q);

    const SQTranscript& transcript() const { return transcript_; }
    SQTranscript& transcript() { return transcript_; }

    // tau^2 at expectation p (exact); VSTAT uses max(1/t^2, p(1-p)/t).
    Rat tolerance_sq(const Rat& p) const;

private:
    OracleConfig cfg_;
    PlantedDist dist_;
    SQTranscript transcript_;
};

// Average correlation gamma of a set of planted distributions relative to
// the uniform reference: (1/M^2) sum over ordered pairs of chi, with
// ||psi||_2^2 on the diagonal.
Rat average_correlation(const std::vector<Direction>& members, const WitnessLevels& w);

// floor(a0 log(1 + sigma/eps^2) / sigma); values < 1 mean "no hard degree".
int select_hardness_degree(double sigma, double eps, double a0);

// Companion: the largest m (descending scan) with kappa_m >= bound at this n,
// or 0 if none.
int largest_hard_degree(int n, const Rat& rho, const Rat& bound);

struct AttackResult {
    bool detected = false;
    long queries = 0;
    int planted_index = -1;
    int declared_index = -1;
    SQTranscript transcript;
    double tolerance_at_half = 0;  // tau of the matched-frame regime
};

// Scan attack: for each v in family order issue the correlation query with
// h = psi in frame v against a reference-pull oracle; declare v when the
// answer differs from the reference value 1/2 (the clamp could not reach it).
// The planted direction is drawn uniformly from the family by `seed`.
AttackResult correlation_attack(const PackingFamily& family,
                                std::shared_ptr<const WitnessLevels> witness,
                                const OracleConfig& cfg, uint64_t seed);

}  // namespace cubelab
