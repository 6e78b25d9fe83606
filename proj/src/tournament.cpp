#include "arena/tournament.hpp"

#include "arena/error.hpp"
#include "arena/parallel.hpp"
#include "arena/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <utility>

namespace arena {

namespace {

constexpr std::uint64_t kTagGameUid = 0x6A3Eu;
constexpr std::uint64_t kTagRegionalSelect = 0x5E1u;
constexpr std::uint64_t kWildCardUnit = 0xFFFF'FFFFu;

constexpr std::uint64_t kPhaseRegional = 1;
constexpr std::uint64_t kPhaseGlobal = 2;
constexpr std::uint64_t kPhasePlayoffs = 3;
constexpr std::uint64_t kPhaseFinal = 4;

/// Removes and returns `take` uniformly chosen entries of `pool`.
std::vector<std::size_t> pick_uniform(std::vector<std::size_t>& pool, std::size_t take,
                                      rng::Engine& eng) {
    take = std::min(take, pool.size());
    std::vector<std::size_t> picked;
    picked.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t remaining = pool.size() - i;
        const std::size_t j = i + static_cast<std::size_t>(rng::u01(eng) *
                                                           static_cast<double>(remaining));
        std::swap(pool[i], pool[std::min(j, pool.size() - 1)]);
        picked.push_back(pool[i]);
    }
    pool.erase(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
    return picked;
}

/// Removes and returns `take` entries of `pool`, each draw proportional to
/// its weight; falls back to uniform if all remaining weights vanish.
std::vector<std::size_t> pick_weighted(std::vector<std::size_t>& pool,
                                       const std::vector<double>& weight_of, std::size_t take,
                                       rng::Engine& eng) {
    take = std::min(take, pool.size());
    std::vector<std::size_t> picked;
    picked.reserve(take);
    for (std::size_t round = 0; round < take; ++round) {
        double total = 0.0;
        for (std::size_t idx : pool) total += weight_of[idx];
        std::size_t chosen = 0;
        if (total > 0.0) {
            double r = rng::u01(eng) * total;
            for (std::size_t pos = 0; pos < pool.size(); ++pos) {
                r -= weight_of[pool[pos]];
                if (r <= 0.0 || pos + 1 == pool.size()) {
                    chosen = pos;
                    break;
                }
            }
        } else {
            chosen = static_cast<std::size_t>(rng::u01(eng) * static_cast<double>(pool.size()));
            chosen = std::min(chosen, pool.size() - 1);
        }
        picked.push_back(pool[chosen]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(chosen));
    }
    return picked;
}

GameResult play_round_game(std::vector<Player*> roster, Phase phase, int round,
                           std::uint64_t unit, std::uint32_t seq, bool early_termination,
                           const TournamentConfig& cfg, Runner& runner) {
    GameSpec spec;
    spec.players = std::move(roster);
    spec.early_termination = early_termination;
    spec.deviation_pct = cfg.d;
    spec.min_work_fraction = cfg.min_work_fraction;
    GameContext ctx;
    ctx.phase = phase;
    ctx.round = round;
    ctx.unit = unit;
    ctx.seq = seq;
    std::uint64_t phase_tag = kPhaseRegional;
    if (phase == Phase::global) phase_tag = kPhaseGlobal;
    if (phase == Phase::playoffs) phase_tag = kPhasePlayoffs;
    if (phase == Phase::final_game) phase_tag = kPhaseFinal;
    ctx.uid = rng::derive(cfg.seed, {kTagGameUid, phase_tag, unit,
                                     static_cast<std::uint64_t>(round), seq});
    return play_game(spec, runner, ctx);
}

/// Winner of a global-phase game under the configured judging rule.
Player* judge_global_game(const std::vector<Player*>& group, const GameResult& result,
                          const TournamentConfig& cfg) {
    if (cfg.variants.no_consistency_score || group.size() == 1) {
        for (Player* p : group)
            if (p->config.linear_index == result.winner_index) return p;
        return group.front();
    }
    if (cfg.variants.no_exec_score) {
        std::size_t best = 0;
        double best_score = -1.0;
        for (std::size_t i = 0; i < group.size(); ++i) {
            const double score = consistency_score(*group[i], Phase::global);
            const double tie = result.players[i].execution_score;
            const double best_tie = result.players[best].execution_score;
            if (score > best_score ||
                (score == best_score &&
                 (tie > best_tie || (tie == best_tie && group[i]->config.linear_index <
                                                            group[best]->config.linear_index)))) {
                best = i;
                best_score = score;
            }
        }
        return group[best];
    }
    return combined_rank(group, result, Phase::global).front().player;
}

std::vector<std::uint64_t> linears_of(const std::vector<Player*>& players) {
    std::vector<std::uint64_t> out;
    out.reserve(players.size());
    for (const Player* p : players) out.push_back(p->config.linear_index);
    return out;
}

/// Interleaves players by region (larger buckets first) and cuts the
/// sequence into the requested chunk sizes.
std::vector<std::vector<Player*>> form_groups_with_sizes(const std::vector<Player*>& players,
                                                         const std::vector<std::size_t>& sizes) {
    std::map<std::uint64_t, std::vector<Player*>> by_region;
    for (Player* p : players) by_region[p->region].push_back(p);
    std::vector<std::pair<std::uint64_t, std::vector<Player*>>> buckets;
    buckets.reserve(by_region.size());
    for (auto& [region, members] : by_region) {
        std::sort(members.begin(), members.end(), [](const Player* a, const Player* b) {
            return a->config.linear_index < b->config.linear_index;
        });
        buckets.emplace_back(region, std::move(members));
    }
    std::sort(buckets.begin(), buckets.end(), [](const auto& a, const auto& b) {
        if (a.second.size() != b.second.size()) return a.second.size() > b.second.size();
        return a.first < b.first;
    });

    std::vector<Player*> sequence;
    sequence.reserve(players.size());
    for (std::size_t offset = 0; sequence.size() < players.size(); ++offset)
        for (auto& [region, members] : buckets)
            if (offset < members.size()) sequence.push_back(members[offset]);

    std::vector<std::vector<Player*>> groups;
    groups.reserve(sizes.size());
    std::size_t cursor = 0;
    for (std::size_t size : sizes) {
        std::vector<Player*> group;
        group.reserve(size);
        for (std::size_t i = 0; i < size && cursor < sequence.size(); ++i)
            group.push_back(sequence[cursor++]);
        if (!group.empty()) groups.push_back(std::move(group));
    }
    return groups;
}

std::vector<std::vector<Player*>> form_groups_count(const std::vector<Player*>& players,
                                                    std::size_t group_count) {
    const std::size_t n = players.size();
    group_count = std::min(std::max<std::size_t>(group_count, 1), n);
    const std::size_t base = n / group_count;
    const std::size_t extra = n % group_count;
    std::vector<std::size_t> sizes(group_count, base);
    for (std::size_t i = 0; i < extra; ++i) sizes[i] += 1;
    return form_groups_with_sizes(players, sizes);
}

/// Players whose best execution score sits within d percentage points of
/// the best player's, ordered best-first.
std::vector<std::size_t> companion_set(const std::vector<Player>& players, std::size_t best,
                                       double d) {
    const double cutoff = players[best].best_execution_score() - d / 100.0;
    std::vector<std::size_t> set;
    for (std::size_t i = 0; i < players.size(); ++i) {
        if (players[i].history.empty()) continue;
        if (players[i].best_execution_score() >= cutoff) set.push_back(i);
    }
    std::sort(set.begin(), set.end(), [&](std::size_t a, std::size_t b) {
        const double sa = players[a].best_execution_score();
        const double sb = players[b].best_execution_score();
        if (sa != sb) return sa > sb;
        return players[a].config.linear_index < players[b].config.linear_index;
    });
    return set;
}

std::size_t best_played_index(const std::vector<Player>& players) {
    std::size_t best = players.size();
    for (std::size_t i = 0; i < players.size(); ++i) {
        if (players[i].history.empty()) continue;
        if (best == players.size()) {
            best = i;
            continue;
        }
        const double si = players[i].best_execution_score();
        const double sb = players[best].best_execution_score();
        if (si > sb || (si == sb && players[i].config.linear_index <
                                        players[best].config.linear_index))
            best = i;
    }
    return best;
}

} // namespace

void TournamentConfig::validate() const {
    if (P < 2) throw InvalidConfiguration("tournament P must be at least 2");
    if (n_r < 1) throw InvalidConfiguration("tournament n_r must be at least 1");
    if (!(d > 0.0 && d < 100.0)) throw InvalidConfiguration("tournament d must lie in (0, 100)");
    if (!(min_work_fraction > 0.0 && min_work_fraction <= 1.0))
        throw InvalidConfiguration("min_work_fraction must lie in (0, 1]");
    if (main_bracket_target < 2)
        throw InvalidConfiguration("main_bracket_target must be at least 2");
    if (region_consecutive_win_threshold < 1)
        throw InvalidConfiguration("region_consecutive_win_threshold must be at least 1");
    if (max_regional_rounds < 0)
        throw InvalidConfiguration("max_regional_rounds must be non-negative");
    if (parallelism < 1) throw InvalidConfiguration("parallelism must be at least 1");
}

void CostLedger::add(const GameResult& result) {
    total += result.cost;
    switch (result.phase) {
    case Phase::regional: regional += result.cost; break;
    case Phase::global: global += result.cost; break;
    case Phase::playoffs: playoffs += result.cost; break;
    case Phase::final_game: final_game += result.cost; break;
    case Phase::sample: sample += result.cost; break;
    }
    games += 1;
    if (result.terminated_early) {
        double leader = 0.0;
        for (const PlayerOutcome& p : result.players) leader = std::max(leader, p.work_fraction);
        if (leader > 0.0) {
            const double full = result.elapsed / leader;
            early_termination_savings +=
                static_cast<double>(result.players.size()) * (full - result.elapsed);
        }
    }
}

void CostLedger::merge(const CostLedger& other) {
    total += other.total;
    regional += other.regional;
    global += other.global;
    playoffs += other.playoffs;
    final_game += other.final_game;
    sample += other.sample;
    games += other.games;
    early_termination_savings += other.early_termination_savings;
}

RegionalOutcome run_regional(const SearchSpace& space, IndexRange region,
                             std::uint64_t region_id, const TournamentConfig& cfg,
                             Runner& runner) {
    if (region.size() == 0) throw InvalidArgument("regional phase on an empty region");
    const std::uint64_t members = region.size();

    RegionalOutcome outcome;
    outcome.members = members;

    std::vector<Player> players;
    players.reserve(members);
    for (std::uint64_t linear = region.lo; linear < region.hi; ++linear) {
        Player p;
        p.config = space.delinearize(linear);
        p.region = region_id;
        players.push_back(std::move(p));
    }

    if (members == 1) {
        outcome.termination = "singleton";
        outcome.winners.push_back(std::move(players.front()));
        return outcome;
    }

    const std::size_t game_size =
        std::min<std::size_t>(static_cast<std::size_t>(cfg.group_size()), members);
    const int max_rounds =
        cfg.max_regional_rounds > 0
            ? cfg.max_regional_rounds
            : 4 * static_cast<int>((members + game_size - 1) / game_size);

    rng::Engine eng = rng::make_engine(cfg.seed, {kTagRegionalSelect, region_id});
    std::vector<std::size_t> unplayed(players.size());
    std::iota(unplayed.begin(), unplayed.end(), 0);
    std::vector<std::size_t> played;
    std::vector<double> latest_score(players.size(), 0.0);
    std::vector<int> wins(players.size(), 0);  // cumulative wins, not necessarily consecutive

    std::vector<std::size_t> winner_indices;
    for (int round = 1;; ++round) {
        std::vector<std::size_t> roster_indices;
        if (cfg.variants.no_swiss) {
            std::vector<std::size_t> everyone(players.size());
            std::iota(everyone.begin(), everyone.end(), 0);
            roster_indices = pick_uniform(everyone, game_size, eng);
        } else if (round == 1) {
            roster_indices = pick_uniform(unplayed, game_size, eng);
        } else {
            const std::size_t want_unplayed = (game_size + 1) / 2;
            roster_indices = pick_uniform(unplayed, std::min(want_unplayed, unplayed.size()), eng);
            const std::size_t want_played = game_size - roster_indices.size();
            std::vector<std::size_t> from_played =
                pick_weighted(played, latest_score, std::min(want_played, played.size()), eng);
            roster_indices.insert(roster_indices.end(), from_played.begin(), from_played.end());
            if (roster_indices.size() < game_size) {
                std::vector<std::size_t> more =
                    pick_uniform(unplayed, game_size - roster_indices.size(), eng);
                roster_indices.insert(roster_indices.end(), more.begin(), more.end());
            }
        }

        std::vector<Player*> roster;
        roster.reserve(roster_indices.size());
        for (std::size_t idx : roster_indices) roster.push_back(&players[idx]);

        GameResult result = play_round_game(roster, Phase::regional, round, region_id, 0,
                                            cfg.early_termination, cfg, runner);
        for (std::size_t pos = 0; pos < roster_indices.size(); ++pos)
            latest_score[roster_indices[pos]] = result.players[pos].execution_score;
        if (!cfg.variants.no_swiss) {
            for (std::size_t idx : roster_indices)
                if (std::find(played.begin(), played.end(), idx) == played.end())
                    played.push_back(idx);
        } else {
            for (std::size_t idx : roster_indices) {
                unplayed.erase(std::remove(unplayed.begin(), unplayed.end(), idx), unplayed.end());
                if (std::find(played.begin(), played.end(), idx) == played.end())
                    played.push_back(idx);
            }
        }
        for (std::size_t idx : roster_indices)
            if (players[idx].config.linear_index == result.winner_index) ++wins[idx];
        outcome.games.push_back(std::move(result));
        outcome.rounds = round;

        // (a) someone has proven themselves by winning enough games overall.
        std::size_t threshold_winner = players.size();
        for (std::size_t idx : roster_indices)
            if (wins[idx] >= cfg.region_consecutive_win_threshold) {
                threshold_winner = idx;
                break;
            }
        if (threshold_winner < players.size()) {
            outcome.termination = "win_threshold";
            winner_indices = companion_set(players, threshold_winner, cfg.d);
            break;
        }
        // (b) everyone has been heard at least once. Checked only once the
        // win threshold had a chance to fire, so small regions still play
        // enough rounds for a player to prove consistency.
        if (round >= cfg.region_consecutive_win_threshold && unplayed.empty()) {
            outcome.termination = "coverage";
            winner_indices = companion_set(players, best_played_index(players), cfg.d);
            break;
        }
        // (c) safety cap.
        if (round >= max_rounds) {
            outcome.termination = "round_cap";
            winner_indices = companion_set(players, best_played_index(players), cfg.d);
            break;
        }
    }

    outcome.played = 0;
    for (const Player& p : players)
        if (!p.history.empty()) ++outcome.played;
    outcome.winners.reserve(winner_indices.size());
    for (std::size_t idx : winner_indices) outcome.winners.push_back(std::move(players[idx]));
    return outcome;
}

std::vector<std::vector<Player*>> form_diverse_groups(const std::vector<Player*>& players,
                                                      std::size_t max_group) {
    if (players.empty()) throw InvalidArgument("cannot form groups from an empty roster");
    if (max_group == 0) throw InvalidArgument("group size must be positive");
    const std::size_t count = (players.size() + max_group - 1) / max_group;
    std::vector<std::size_t> sizes(count, max_group);
    const std::size_t rem = players.size() % max_group;
    if (rem != 0) sizes.back() = rem;
    return form_groups_with_sizes(players, sizes);
}

GlobalOutcome run_global(const std::vector<Player*>& players, const TournamentConfig& cfg,
                         Runner& runner) {
    const std::size_t target = static_cast<std::size_t>(cfg.main_bracket_target);
    if (players.size() < target + 1)
        throw InvalidArgument("global phase needs at least main_bracket_target + 1 players");

    GlobalOutcome outcome;
    std::vector<Player*> main = players;
    std::vector<Player*> losers;
    std::vector<Player*> eliminated;

    BracketSnapshot initial;
    initial.round = 0;
    initial.main = linears_of(main);
    outcome.brackets.push_back(std::move(initial));

    const std::size_t P = static_cast<std::size_t>(cfg.group_size());
    int round = 0;
    while (main.size() > target) {
        ++round;
        const std::size_t group_count =
            std::max((main.size() + P - 1) / P, target);
        std::vector<std::vector<Player*>> groups = form_groups_count(main, group_count);

        std::vector<std::optional<GameResult>> results(groups.size());
        std::vector<Player*> winners(groups.size(), nullptr);
        for_each_index(groups.size(), cfg.parallelism, [&](std::size_t g) {
            if (groups[g].size() == 1) {
                winners[g] = groups[g].front();  // walkover
                return;
            }
            GameResult result = play_round_game(groups[g], Phase::global, round, g, 0,
                                                cfg.early_termination, cfg, runner);
            winners[g] = judge_global_game(groups[g], result, cfg);
            results[g] = std::move(result);
        });

        std::vector<Player*> next_main;
        next_main.reserve(groups.size());
        for (std::size_t g = 0; g < groups.size(); ++g) {
            if (results[g]) outcome.games.push_back(std::move(*results[g]));
            next_main.push_back(winners[g]);
            for (Player* p : groups[g])
                if (p != winners[g]) {
                    if (cfg.variants.no_double_elimination)
                        eliminated.push_back(p);
                    else
                        losers.push_back(p);
                }
        }
        main = std::move(next_main);

        BracketSnapshot snap;
        snap.round = round;
        snap.main = linears_of(main);
        snap.losers = linears_of(losers);
        snap.eliminated = linears_of(eliminated);
        outcome.brackets.push_back(std::move(snap));
    }

    if (!cfg.variants.no_double_elimination && !losers.empty()) {
        // One loser-bracket game: the top P losers by joint rank of average
        // execution score and global consistency score play for the wild card.
        std::vector<Player*> order = losers;
        std::vector<double> avg(order.size()), cons(order.size());
        std::vector<std::size_t> idx(order.size());
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t i = 0; i < order.size(); ++i) {
            avg[i] = order[i]->average_execution_score();
            cons[i] = consistency_score(*order[i], Phase::global);
        }
        std::vector<int> avg_rank(order.size()), cons_rank(order.size());
        auto assign_ranks = [&](const std::vector<double>& metric, std::vector<int>& out) {
            std::vector<std::size_t> by(idx);
            std::sort(by.begin(), by.end(), [&](std::size_t a, std::size_t b) {
                if (metric[a] != metric[b]) return metric[a] > metric[b];
                return order[a]->config.linear_index < order[b]->config.linear_index;
            });
            for (std::size_t pos = 0; pos < by.size(); ++pos)
                out[by[pos]] = static_cast<int>(pos) + 1;
        };
        assign_ranks(avg, avg_rank);
        assign_ranks(cons, cons_rank);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            const int sa = avg_rank[a] + cons_rank[a];
            const int sb = avg_rank[b] + cons_rank[b];
            if (sa != sb) return sa < sb;
            if (avg[a] != avg[b]) return avg[a] > avg[b];
            return order[a]->config.linear_index < order[b]->config.linear_index;
        });

        std::vector<Player*> contenders;
        for (std::size_t i = 0; i < std::min(P, idx.size()); ++i)
            contenders.push_back(order[idx[i]]);
        if (contenders.size() == 1) {
            outcome.wild_card = contenders.front();
            outcome.flags.push_back("wild_card_walkover");
        } else {
            GameResult result = play_round_game(contenders, Phase::global, round + 1,
                                                kWildCardUnit, 0, cfg.early_termination, cfg,
                                                runner);
            outcome.wild_card = judge_global_game(contenders, result, cfg);
            outcome.games.push_back(std::move(result));
        }
        losers.erase(std::remove(losers.begin(), losers.end(), outcome.wild_card), losers.end());

        BracketSnapshot snap;
        snap.round = round + 1;
        snap.main = linears_of(main);
        snap.eliminated = linears_of(eliminated);
        for (Player* p : losers) snap.eliminated.push_back(p->config.linear_index);
        snap.advanced.push_back(outcome.wild_card->config.linear_index);
        outcome.brackets.push_back(std::move(snap));
    } else if (cfg.variants.no_double_elimination) {
        outcome.flags.push_back("no_double_elimination");
    }

    outcome.finalists = std::move(main);
    return outcome;
}

PlayoffOutcome run_playoffs(const std::vector<Player*>& entrants, const TournamentConfig& cfg,
                            Runner& runner) {
    if (entrants.empty()) throw InvalidArgument("playoffs need at least one entrant");

    PlayoffOutcome outcome;
    std::vector<Player*> seeds = entrants;
    // Entrants may arrive without a single game on record (direct-final
    // paths on tiny spaces); they seed at the bottom.
    const auto seed_score = [](const Player* p) {
        return p->history.empty() ? 0.0 : p->average_execution_score();
    };
    std::sort(seeds.begin(), seeds.end(), [&](const Player* a, const Player* b) {
        const double sa = seed_score(a);
        const double sb = seed_score(b);
        if (sa != sb) return sa > sb;
        return a->config.linear_index < b->config.linear_index;
    });
    if (seeds.size() > 4) {
        outcome.flags.push_back("playoffs_truncated_to_top_4");
        seeds.resize(4);
    }

    auto play_pair = [&](Player* a, Player* b, int game_no) -> Player* {
        GameResult result = play_round_game({a, b}, Phase::playoffs, game_no,
                                            static_cast<std::uint64_t>(game_no), 0,
                                            /*early_termination=*/false, cfg, runner);
        Player* winner = result.winner_index == a->config.linear_index ? a : b;
        outcome.games.push_back(std::move(result));
        return winner;
    };

    if (seeds.size() == 1) {
        outcome.flags.push_back("single_entrant");
        outcome.finalists = {seeds[0], nullptr};
        return outcome;
    }
    if (seeds.size() == 2) {
        outcome.flags.push_back("direct_final");
        outcome.finalists = {seeds[0], seeds[1]};
        return outcome;
    }
    if (cfg.variants.no_barrage) {
        outcome.flags.push_back("no_barrage_top2_seeding");
        outcome.finalists = {seeds[0], seeds[1]};
        return outcome;
    }
    if (seeds.size() == 3) {
        outcome.flags.push_back("three_entrant_barrage");
        Player* w1 = play_pair(seeds[0], seeds[1], 1);
        Player* l1 = w1 == seeds[0] ? seeds[1] : seeds[0];
        Player* w3 = play_pair(l1, seeds[2], 3);
        outcome.finalists = {w1, w3};
        return outcome;
    }

    Player* w1 = play_pair(seeds[0], seeds[1], 1);
    Player* l1 = w1 == seeds[0] ? seeds[1] : seeds[0];
    Player* w2 = play_pair(seeds[2], seeds[3], 2);
    Player* w3 = play_pair(l1, w2, 3);
    outcome.finalists = {w1, w3};
    return outcome;
}

GameResult run_final(Player& first, Player& second, const TournamentConfig& cfg, Runner& runner) {
    GameSpec spec;
    spec.players = {&first, &second};
    spec.early_termination = false;
    spec.deviation_pct = cfg.d;
    spec.min_work_fraction = cfg.min_work_fraction;
    spec.allow_duplicates = first.config.linear_index == second.config.linear_index;
    GameContext ctx;
    ctx.phase = Phase::final_game;
    ctx.round = 1;
    ctx.unit = 0;
    ctx.seq = 0;
    ctx.uid = rng::derive(cfg.seed, {kTagGameUid, kPhaseFinal, 0, 1, 0});
    return play_game(spec, runner, ctx);
}

TournamentReport run_tournament(const SearchSpace& space, const TournamentConfig& cfg,
                                Runner& runner) {
    return run_tournament(space, space.full_range(), cfg, runner);
}

TournamentReport run_tournament(const SearchSpace& space, IndexRange range,
                                const TournamentConfig& cfg, Runner& runner) {
    cfg.validate();
    if (range.hi > space.size() || range.lo >= range.hi)
        throw InvalidArgument("tournament range is empty or outside the space");

    TournamentReport report;
    const std::uint64_t size = range.size();

    if (size == 1) {
        report.flags.push_back("degenerate_single_config");
        report.winner = space.delinearize(range.lo);
        report.winner_linear = range.lo;
        return report;
    }

    std::uint64_t n_r = cfg.n_r;
    if (n_r > size) {
        n_r = size;
        report.flags.push_back("n_r_clamped_to_space_size");
    }
    RegionPartition partition(range, n_r);

    // Regional phase: fills the global player pool.
    std::vector<Player> pool;
    if (size == 2) {
        report.flags.push_back("direct_final_two_configs");
        for (std::uint64_t linear = range.lo; linear < range.hi; ++linear) {
            Player p;
            p.config = space.delinearize(linear);
            p.region = partition.region_of(linear);
            pool.push_back(std::move(p));
        }
    } else if (cfg.variants.no_regional) {
        report.flags.push_back("no_regional");
        pool.reserve(size);
        for (std::uint64_t linear = range.lo; linear < range.hi; ++linear) {
            Player p;
            p.config = space.delinearize(linear);
            p.region = partition.region_of(linear);
            pool.push_back(std::move(p));
        }
    } else {
        std::vector<RegionalOutcome> outcomes(partition.count());
        for_each_index(partition.count(), cfg.parallelism, [&](std::size_t r) {
            outcomes[r] = run_regional(space, partition.region_range(r), r, cfg, runner);
        });
        std::size_t winner_count = 0;
        for (const RegionalOutcome& o : outcomes) winner_count += o.winners.size();
        pool.reserve(winner_count);
        for (std::uint64_t r = 0; r < partition.count(); ++r) {
            RegionalOutcome& o = outcomes[r];
            RegionalSummary summary;
            summary.region = r;
            summary.members = o.members;
            summary.played = o.played;
            summary.rounds = o.rounds;
            summary.termination = o.termination;
            for (GameResult& g : o.games) {
                report.ledger.add(g);
                report.games.push_back(std::move(g));
            }
            for (Player& w : o.winners) {
                summary.winners.push_back(w.config.linear_index);
                report.regional_winners.push_back(w.config.linear_index);
                pool.push_back(std::move(w));
            }
            report.regional.push_back(std::move(summary));
        }
    }

    std::vector<Player*> pool_ptrs;
    pool_ptrs.reserve(pool.size());
    for (Player& p : pool) pool_ptrs.push_back(&p);

    // Global phase: double elimination down to the bracket target.
    std::vector<Player*> entrants;
    const std::size_t target = static_cast<std::size_t>(cfg.main_bracket_target);
    if (cfg.variants.no_global) {
        report.flags.push_back("no_global");
        entrants = pool_ptrs;
    } else if (pool_ptrs.size() < target + 1) {
        if (size > 2) report.flags.push_back("global_skipped_insufficient_winners");
        entrants = pool_ptrs;
    } else {
        GlobalOutcome global = run_global(pool_ptrs, cfg, runner);
        for (GameResult& g : global.games) {
            report.ledger.add(g);
            report.games.push_back(std::move(g));
        }
        report.brackets = std::move(global.brackets);
        for (std::string& f : global.flags) report.flags.push_back(std::move(f));
        entrants = std::move(global.finalists);
        if (global.wild_card != nullptr) entrants.push_back(global.wild_card);
    }
    report.playoff_entrants = linears_of(entrants);

    // Playoffs: reduce the entrants to two finalists.
    Player* finalist_a = nullptr;
    Player* finalist_b = nullptr;
    if (entrants.size() == 1) {
        report.flags.push_back("winner_by_default");
        report.winner = entrants.front()->config;
        report.winner_linear = report.winner.linear_index;
        return report;
    }
    PlayoffOutcome playoffs = run_playoffs(entrants, cfg, runner);
    for (GameResult& g : playoffs.games) {
        report.ledger.add(g);
        report.games.push_back(std::move(g));
    }
    for (std::string& f : playoffs.flags) report.flags.push_back(std::move(f));
    finalist_a = playoffs.finalists[0];
    finalist_b = playoffs.finalists[1];
    report.finalists = {finalist_a->config.linear_index, finalist_b->config.linear_index};

    // Final: one two-player game, first to finish wins.
    GameResult final_result = run_final(*finalist_a, *finalist_b, cfg, runner);
    report.ledger.add(final_result);
    report.winner_linear = final_result.winner_index;
    report.winner = finalist_a->config.linear_index == report.winner_linear ? finalist_a->config
                                                                            : finalist_b->config;
    report.final_game = final_result;
    report.games.push_back(std::move(final_result));
    return report;
}

} // namespace arena
