#pragma once

#include "arena/space.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace arena {

enum class Phase : std::uint8_t { regional, global, playoffs, final_game, sample };

std::string phase_name(Phase phase);

struct GameRecord {
    std::uint64_t game_uid = 0;
    Phase phase = Phase::regional;
    double execution_score = 0.0;
    int rank = 0;
    int group_size = 0;
};

/// One tuning configuration competing in the tournament, with its full
/// game history. Histories are only ever mutated by the game that the
/// player is currently in; the orchestrator never co-locates a player in
/// two concurrent games.
struct Player {
    Configuration config;
    std::uint64_t region = 0;
    std::vector<GameRecord> history;
    int wins = 0;

    double latest_execution_score() const;
    double best_execution_score() const;
    /// Arithmetic mean of execution scores over every game played so far.
    double average_execution_score() const;
};

struct GameSpec {
    std::vector<Player*> players;
    bool early_termination = true;
    double deviation_pct = 10.0;    // d: work-done gap in percentage points
    double min_work_fraction = 0.25;
    /// Games normally require distinct configurations; determinism tests
    /// may opt in to fielding the same configuration twice.
    bool allow_duplicates = false;
};

/// Identifies a game for traces and for deriving its noise stream. The uid
/// is assigned before the game runs, so results never depend on scheduling.
struct GameContext {
    std::uint64_t uid = 0;
    Phase phase = Phase::regional;
    int round = 0;
    std::uint64_t unit = 0;  // region id (regional) or group index (global)
    std::uint32_t seq = 0;
};

struct PlayerOutcome {
    std::uint64_t linear_index = 0;
    double work_fraction = 0.0;
    double execution_score = 0.0;
    int rank = 0;
    bool failed = false;
};

struct GameResult {
    std::uint64_t uid = 0;
    Phase phase = Phase::regional;
    int round = 0;
    std::uint64_t unit = 0;
    std::uint32_t seq = 0;
    std::vector<PlayerOutcome> players;  // in game order
    std::uint64_t winner_index = 0;      // linear index of the winner
    bool terminated_early = false;
    double elapsed = 0.0;
    double cost = 0.0;  // group size x elapsed
};

/// A live co-located run. work_fraction is non-decreasing per player and
/// reaches 1.0 at completion; advance() moves to the next polling instant.
class GameSession {
public:
    virtual ~GameSession() = default;

    /// Advance simulated or wall-clock time to the next poll. Returns false
    /// once no player can make further progress.
    virtual bool advance() = 0;
    virtual double elapsed() const = 0;
    virtual double work_fraction(std::size_t player) const = 0;
    virtual bool failed(std::size_t player) const = 0;
    /// Terminate outstanding work (early termination or cleanup).
    virtual void stop() = 0;
};

/// Executes co-located games. Implementations: the interference simulator
/// and the local process runner.
class Runner {
public:
    virtual ~Runner() = default;

    virtual std::size_t capacity() const = 0;
    virtual bool supports_concurrent_sessions() const = 0;
    virtual std::unique_ptr<GameSession> start(const std::vector<const Configuration*>& configs,
                                               const GameContext& ctx) = 0;
};

/// Plays one game to completion or early termination and records it into
/// every player's history. Early termination fires at the first polled
/// instant where the leader has done at least min_work_fraction of its work
/// and leads the runner-up by more than deviation_pct points.
GameResult play_game(const GameSpec& spec, Runner& runner, const GameContext& ctx);

/// Rank 1 = highest execution score. Ties are ordered by lower linear index.
/// Returns ranks aligned with result.players.
std::vector<int> rank_by_execution_score(const GameResult& result);

/// Mean of 1/rank over the player's games whose uid is in `game_uids`.
double consistency_score(const Player& player, std::span<const std::uint64_t> game_uids);

/// Mean of 1/rank over the player's games in the given phase.
double consistency_score(const Player& player, Phase phase);

struct CombinedRankEntry {
    Player* player = nullptr;
    int execution_rank = 0;
    int consistency_rank = 0;
    int rank_sum = 0;
};

/// Joint ranking used in the global phase: each player's execution-score
/// rank in `result` plus their consistency-score rank over the phase's
/// games (current game included). Ordered by ascending rank sum; ties break
/// toward the higher execution score in the current game, then the lower
/// linear index. Front entry is the game winner.
std::vector<CombinedRankEntry> combined_rank(const std::vector<Player*>& players,
                                             const GameResult& result, Phase phase);

} // namespace arena
