#include "arena/engine.hpp"

#include "arena/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <unordered_set>

namespace arena {

std::string phase_name(Phase phase) {
    switch (phase) {
    case Phase::regional: return "regional";
    case Phase::global: return "global";
    case Phase::playoffs: return "playoffs";
    case Phase::final_game: return "final";
    case Phase::sample: return "sample";
    }
    return "unknown";
}

double Player::latest_execution_score() const {
    if (history.empty())
        throw NoHistory("player " + std::to_string(config.linear_index) + " has not played any game");
    return history.back().execution_score;
}

double Player::best_execution_score() const {
    if (history.empty())
        throw NoHistory("player " + std::to_string(config.linear_index) + " has not played any game");
    double best = 0.0;
    for (const GameRecord& rec : history) best = std::max(best, rec.execution_score);
    return best;
}

double Player::average_execution_score() const {
    if (history.empty())
        throw NoHistory("player " + std::to_string(config.linear_index) + " has not played any game");
    double sum = 0.0;
    for (const GameRecord& rec : history) sum += rec.execution_score;
    return sum / static_cast<double>(history.size());
}

namespace {

/// Index of the leading player and of the runner-up at the current instant.
/// Failed players are skipped; ties go to the earlier game slot.
std::pair<std::size_t, std::size_t> leader_and_second(const std::vector<double>& fractions,
                                                      const std::vector<bool>& failed) {
    std::size_t leader = fractions.size();
    std::size_t second = fractions.size();
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        if (failed[i]) continue;
        if (leader == fractions.size() || fractions[i] > fractions[leader]) {
            second = leader;
            leader = i;
        } else if (second == fractions.size() || fractions[i] > fractions[second]) {
            second = i;
        }
    }
    return {leader, second};
}

} // namespace

GameResult play_game(const GameSpec& spec, Runner& runner, const GameContext& ctx) {
    const std::size_t n = spec.players.size();
    if (n == 0) throw InvalidArgument("game needs at least one player");
    if (n > runner.capacity())
        throw InvalidArgument("game of " + std::to_string(n) + " players exceeds runner capacity " +
                              std::to_string(runner.capacity()));
    for (const Player* p : spec.players)
        if (p == nullptr) throw InvalidArgument("game roster contains a null player");
    if (!spec.allow_duplicates) {
        std::unordered_set<std::uint64_t> seen;
        for (const Player* p : spec.players)
            if (!seen.insert(p->config.linear_index).second)
                throw InvalidArgument("duplicate configuration " +
                                      std::to_string(p->config.linear_index) +
                                      " in one game (opt in with allow_duplicates)");
    }

    std::vector<const Configuration*> configs;
    configs.reserve(n);
    for (const Player* p : spec.players) configs.push_back(&p->config);

    std::unique_ptr<GameSession> session = runner.start(configs, ctx);

    std::vector<double> fractions(n, 0.0);
    std::vector<bool> failed(n, false);
    bool early = false;

    // Poll until the first finisher, an early-termination instant, or until
    // the session cannot advance (all remaining players failed).
    for (;;) {
        bool progressed = session->advance();
        bool any_alive = false;
        for (std::size_t i = 0; i < n; ++i) {
            failed[i] = session->failed(i);
            if (failed[i]) continue;
            any_alive = true;
            // Fractions are monotone per the session contract; clamp anyway
            // so a misbehaving runner cannot corrupt the scores.
            fractions[i] = std::clamp(session->work_fraction(i), fractions[i], 1.0);
        }
        if (!any_alive) {
            session->stop();
            throw GameFailed("all " + std::to_string(n) + " players failed in game " +
                             std::to_string(ctx.uid));
        }

        auto [leader, second] = leader_and_second(fractions, failed);
        if (fractions[leader] >= 1.0) break;  // first finisher ends the game

        if (spec.early_termination && n > 1 && second < n) {
            const double gap = fractions[leader] - fractions[second];
            if (fractions[leader] >= spec.min_work_fraction && gap > spec.deviation_pct / 100.0) {
                early = true;
                break;
            }
        }
        if (!progressed) {
            session->stop();
            throw GameFailed("game " + std::to_string(ctx.uid) + " stalled before any player finished");
        }
    }
    session->stop();

    auto [leader, second] = leader_and_second(fractions, failed);
    const double winner_fraction = fractions[leader];

    GameResult result;
    result.uid = ctx.uid;
    result.phase = ctx.phase;
    result.round = ctx.round;
    result.unit = ctx.unit;
    result.seq = ctx.seq;
    result.terminated_early = early;
    result.elapsed = session->elapsed();
    result.cost = static_cast<double>(n) * result.elapsed;
    result.players.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        PlayerOutcome& out = result.players[i];
        out.linear_index = spec.players[i]->config.linear_index;
        out.work_fraction = fractions[i];
        out.failed = failed[i];
        out.execution_score = failed[i] ? 0.0 : fractions[i] / winner_fraction;
    }

    // The winner is the rank-1 player, so exact fraction ties resolve the
    // same way everywhere: toward the lower linear index.
    std::vector<int> ranks = rank_by_execution_score(result);
    for (std::size_t i = 0; i < n; ++i) {
        result.players[i].rank = ranks[i];
        if (ranks[i] == 1) result.winner_index = result.players[i].linear_index;
    }
    for (std::size_t i = 0; i < n; ++i) {
        GameRecord rec;
        rec.game_uid = result.uid;
        rec.phase = result.phase;
        rec.execution_score = result.players[i].execution_score;
        rec.rank = ranks[i];
        rec.group_size = static_cast<int>(n);
        spec.players[i]->history.push_back(rec);
        if (ranks[i] == 1) spec.players[i]->wins += 1;
    }
    return result;
}

std::vector<int> rank_by_execution_score(const GameResult& result) {
    const std::size_t n = result.players.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const PlayerOutcome& pa = result.players[a];
        const PlayerOutcome& pb = result.players[b];
        if (pa.execution_score != pb.execution_score) return pa.execution_score > pb.execution_score;
        return pa.linear_index < pb.linear_index;
    });
    std::vector<int> ranks(n, 0);
    for (std::size_t pos = 0; pos < n; ++pos) ranks[order[pos]] = static_cast<int>(pos) + 1;
    return ranks;
}

double consistency_score(const Player& player, std::span<const std::uint64_t> game_uids) {
    if (game_uids.empty()) throw NoHistory("consistency score over an empty game set");
    std::unordered_set<std::uint64_t> wanted(game_uids.begin(), game_uids.end());
    double sum = 0.0;
    std::size_t count = 0;
    for (const GameRecord& rec : player.history) {
        if (!wanted.contains(rec.game_uid)) continue;
        sum += 1.0 / static_cast<double>(rec.rank);
        ++count;
    }
    if (count == 0)
        throw NoHistory("player " + std::to_string(player.config.linear_index) +
                        " played none of the requested games");
    return sum / static_cast<double>(count);
}

double consistency_score(const Player& player, Phase phase) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const GameRecord& rec : player.history) {
        if (rec.phase != phase) continue;
        sum += 1.0 / static_cast<double>(rec.rank);
        ++count;
    }
    if (count == 0)
        throw NoHistory("player " + std::to_string(player.config.linear_index) +
                        " has no games in phase " + phase_name(phase));
    return sum / static_cast<double>(count);
}

std::vector<CombinedRankEntry> combined_rank(const std::vector<Player*>& players,
                                             const GameResult& result, Phase phase) {
    const std::size_t n = players.size();
    if (n == 0) throw InvalidArgument("combined rank over an empty roster");
    if (result.players.size() != n)
        throw InvalidArgument("combined rank: roster and game result disagree on size");

    // Execution ranks come straight from the game result (aligned order).
    std::vector<CombinedRankEntry> entries(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (players[i]->config.linear_index != result.players[i].linear_index)
            throw InvalidArgument("combined rank: roster order does not match the game result");
        entries[i].player = players[i];
        entries[i].execution_rank = result.players[i].rank;
    }

    // Consistency ranks re-rank the same roster by phase consistency score.
    std::vector<double> consistency(n);
    for (std::size_t i = 0; i < n; ++i) consistency[i] = consistency_score(*players[i], phase);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (consistency[a] != consistency[b]) return consistency[a] > consistency[b];
        return players[a]->config.linear_index < players[b]->config.linear_index;
    });
    for (std::size_t pos = 0; pos < n; ++pos)
        entries[order[pos]].consistency_rank = static_cast<int>(pos) + 1;

    for (CombinedRankEntry& e : entries) e.rank_sum = e.execution_rank + e.consistency_rank;

    std::vector<std::size_t> final_order(n);
    std::iota(final_order.begin(), final_order.end(), 0);
    std::sort(final_order.begin(), final_order.end(), [&](std::size_t a, std::size_t b) {
        if (entries[a].rank_sum != entries[b].rank_sum) return entries[a].rank_sum < entries[b].rank_sum;
        const double sa = result.players[a].execution_score;
        const double sb = result.players[b].execution_score;
        if (sa != sb) return sa > sb;
        return players[a]->config.linear_index < players[b]->config.linear_index;
    });

    std::vector<CombinedRankEntry> sorted;
    sorted.reserve(n);
    for (std::size_t idx : final_order) sorted.push_back(entries[idx]);
    return sorted;
}

} // namespace arena
