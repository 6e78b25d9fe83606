#pragma once

#include "arena/engine.hpp"
#include "arena/space.hpp"
#include "arena/tournament.hpp"

#include <cstdint>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

namespace arena {

/// One (subspace id, observed score) pair fed back to a baseline tuner.
/// Scores are representative completion times: lower is better.
struct Observation {
    std::uint64_t subspace = 0;
    double score = 0.0;
};

/// Minimal contract for an off-the-shelf tuner being integrated: it only
/// ever sees subspace ids and one scalar score per id, never the
/// configurations inside.
class BaselineTuner {
public:
    virtual ~BaselineTuner() = default;

    /// Next subspace to evaluate, given everything observed so far.
    /// Must return an id in [0, n_sub).
    virtual std::uint64_t propose(const std::vector<Observation>& history) = 0;
    /// True once the evaluation budget is exhausted.
    virtual bool done() const = 0;
    virtual std::uint64_t budget() const = 0;
};

/// Uniform sampling without replacement; ignores history.
std::unique_ptr<BaselineTuner> baseline_random(std::uint64_t n_sub, std::uint64_t budget,
                                               std::uint64_t seed);
/// Greedy neighbourhood walk around the best subspace so far, with a
/// uniform random restart whenever both neighbours are already visited.
std::unique_ptr<BaselineTuner> baseline_hillclimb(std::uint64_t n_sub, std::uint64_t budget,
                                                  std::uint64_t seed);

/// Result of evaluating one subspace with an inner tournament.
struct SubspaceEvaluation {
    std::uint64_t subspace = 0;
    Configuration winner;
    /// Winner's completion time in its final two-player full-run game (or
    /// a solo full-run observation when the inner bracket degenerated).
    double representative_score = 0.0;
    double cost = 0.0;
    bool cached = false;
};

struct IntegratedReport {
    Configuration winner;
    std::uint64_t winner_linear = 0;
    std::vector<SubspaceEvaluation> evaluations;  // in proposal order
    CostLedger ledger;
    std::uint64_t proposals = 0;
    std::uint64_t cache_hits = 0;
    std::vector<GameResult> games;  // all inner-tournament games, in order
};

/// Drives `baseline` over `n_sub` contiguous subspaces; each fresh proposal
/// runs a full inner tournament on the subspace (with n_r scaled down
/// proportionally) and feeds the winner's representative time back. Repeat
/// proposals return the cached evaluation at zero additional cost. The
/// answer is the best winner across all evaluated subspaces.
IntegratedReport tune_with_baseline(const SearchSpace& space, std::uint64_t n_sub,
                                    BaselineTuner& baseline, const TournamentConfig& inner_cfg,
                                    Runner& runner);

struct NoiseUnawareReport {
    Configuration winner;
    std::uint64_t winner_linear = 0;
    std::vector<Observation> samples;  // (linear index, observed time)
    double cost = 0.0;
    std::vector<GameResult> games;
};

/// The strawman a tournament is measured against: sample configurations
/// one at a time (solo games, no co-location, one fresh shared-noise draw
/// each) and return the argmin of the single observations. Sampling is
/// uniform without replacement; stops at `budget` samples or when accrued
/// core-time reaches `core_time_cap`, whichever comes first.
NoiseUnawareReport tune_noise_unaware(const SearchSpace& space, std::uint64_t budget,
                                      Runner& runner, std::uint64_t seed,
                                      double core_time_cap =
                                          std::numeric_limits<double>::infinity());

/// One solo full-run game of `config` (group size 1, no early termination),
/// recorded under Phase::sample. Used for representative-score fallbacks
/// and for the noise-unaware baseline.
GameResult play_solo_sample(const Configuration& config, Runner& runner, std::uint64_t seed,
                            std::uint64_t stream, std::uint64_t k);

} // namespace arena
