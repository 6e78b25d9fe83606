#pragma once

#include "arena/engine.hpp"
#include "arena/space.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace arena {

/// Structural ablations; every switch removes one ingredient of the full
/// design while keeping the rest intact.
struct TournamentVariants {
    bool no_regional = false;            // all configurations enter the global phase
    bool no_swiss = false;               // regional rounds sample uniformly, no pools
    bool no_global = false;              // regional winners go straight to the playoffs
    bool no_double_elimination = false;  // losers are eliminated; no wild card
    bool no_barrage = false;             // playoffs replaced by direct top-2 seeding
    bool no_consistency_score = false;   // global games judged by execution score only
    bool no_exec_score = false;          // global games judged by consistency score only
    bool all_two_player = false;         // every multi-player game shrinks to 2 players
};

struct TournamentConfig {
    int P = 8;                    // players per co-located game
    std::uint64_t n_r = 100;      // region count (clamped to the space size)
    double d = 6.0;               // work-done deviation, percentage points
    double min_work_fraction = 0.25;
    int main_bracket_target = 3;  // global phase stops at this many survivors
    // Cumulative regional wins that settle a region ("consistently winning
    // for more than one time"); wins need not come in consecutive rounds.
    int region_consecutive_win_threshold = 2;
    int max_regional_rounds = 0;  // 0 = 4 × ⌈|region|/P⌉ per region
    bool early_termination = true;
    std::uint64_t seed = 1;
    int parallelism = 1;          // OpenMP threads for regions / round games
    TournamentVariants variants;

    /// P after applying the all_two_player ablation.
    int group_size() const { return variants.all_two_player ? 2 : P; }
    void validate() const;
};

/// Core-time bookkeeping; total always equals the sum of the phase slots.
struct CostLedger {
    double total = 0.0;
    double regional = 0.0;
    double global = 0.0;
    double playoffs = 0.0;
    double final_game = 0.0;
    double sample = 0.0;
    std::uint64_t games = 0;
    /// Core-time an early-terminated game would additionally have spent
    /// running its leader to completion (leader-linear extrapolation).
    double early_termination_savings = 0.0;

    void add(const GameResult& result);
    void merge(const CostLedger& other);
};

/// Global-phase bracket membership after one round, by linear index.
struct BracketSnapshot {
    int round = 0;
    std::vector<std::uint64_t> main;
    std::vector<std::uint64_t> losers;
    std::vector<std::uint64_t> eliminated;
    std::vector<std::uint64_t> advanced;  // wild card after the loser-bracket game
};

/// One region's Swiss phase: how it ended and who advanced.
struct RegionalOutcome {
    std::vector<Player> winners;
    std::vector<GameResult> games;
    int rounds = 0;
    /// "win_threshold" (a), "coverage" (b), "round_cap" (c), or "singleton".
    std::string termination;
    std::uint64_t members = 0;
    std::uint64_t played = 0;  // distinct members that appeared in ≥ 1 game
};

RegionalOutcome run_regional(const SearchSpace& space, IndexRange region,
                             std::uint64_t region_id, const TournamentConfig& cfg,
                             Runner& runner);

/// Splits players into groups of at most `max_group`, spreading region
/// mates across groups (two same-region players share a group only when
/// unavoidable). Deterministic: buckets ordered by size then region id.
std::vector<std::vector<Player*>> form_diverse_groups(const std::vector<Player*>& players,
                                                      std::size_t max_group);

struct GlobalOutcome {
    std::vector<Player*> finalists;        // main-bracket survivors (≤ target)
    Player* wild_card = nullptr;
    std::vector<GameResult> games;
    std::vector<BracketSnapshot> brackets;
    std::vector<std::string> flags;
};

GlobalOutcome run_global(const std::vector<Player*>& players, const TournamentConfig& cfg,
                         Runner& runner);

struct PlayoffOutcome {
    std::array<Player*, 2> finalists{nullptr, nullptr};
    std::vector<GameResult> games;
    std::vector<std::string> flags;
};

/// Barrage among the entrants (nominally 4: main-bracket survivors plus the
/// wild card); two-player games, no early termination, judged by time alone.
PlayoffOutcome run_playoffs(const std::vector<Player*>& entrants, const TournamentConfig& cfg,
                            Runner& runner);

GameResult run_final(Player& first, Player& second, const TournamentConfig& cfg, Runner& runner);

/// Per-region footprint kept in the tournament report.
struct RegionalSummary {
    std::uint64_t region = 0;
    std::uint64_t members = 0;
    std::uint64_t played = 0;
    int rounds = 0;
    std::string termination;
    std::vector<std::uint64_t> winners;
};

struct TournamentReport {
    std::uint64_t winner_linear = 0;
    Configuration winner;
    std::vector<GameResult> games;  // deterministic order across all phases
    std::vector<BracketSnapshot> brackets;
    CostLedger ledger;
    std::vector<RegionalSummary> regional;
    std::vector<std::uint64_t> regional_winners;
    std::vector<std::uint64_t> playoff_entrants;
    std::vector<std::uint64_t> finalists;
    std::optional<GameResult> final_game;
    std::vector<std::string> flags;
};

TournamentReport run_tournament(const SearchSpace& space, const TournamentConfig& cfg,
                                Runner& runner);
/// Tournament restricted to a contiguous slice of the space (used for
/// subspace tuning); regions partition the slice.
TournamentReport run_tournament(const SearchSpace& space, IndexRange range,
                                const TournamentConfig& cfg, Runner& runner);

} // namespace arena
