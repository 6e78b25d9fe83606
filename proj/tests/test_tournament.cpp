#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "arena/error.hpp"
#include "arena/sim.hpp"
#include "arena/tournament.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <vector>

using namespace arena;

namespace {

SearchSpace make_space(const std::vector<std::size_t>& counts) {
    std::vector<ParameterDef> params;
    for (std::size_t d = 0; d < counts.size(); ++d) {
        ParameterDef def;
        def.name = "p" + std::to_string(d);
        for (std::size_t v = 0; v < counts[d]; ++v) def.values.push_back(std::to_string(v));
        params.push_back(std::move(def));
    }
    return SearchSpace(std::move(params));
}

struct Fixture {
    std::shared_ptr<const Landscape> land;
    std::shared_ptr<const InterferenceModel> model;
    std::unique_ptr<SimRunner> runner;
};

Fixture table_fixture(const SearchSpace& space, std::vector<double> times, NoiseSpec noise,
                      double coloc = 0.05, std::uint64_t model_seed = 1) {
    Fixture f;
    LandscapeSpec spec = LandscapeSpec::table_from(std::move(times));
    spec.robust_fraction = 0.0;
    f.land = std::make_shared<Landscape>(space, spec);
    f.model = std::make_shared<InterferenceModel>(f.land, noise, coloc, model_seed);
    f.runner = std::make_unique<SimRunner>(f.model, 64, 100);
    return f;
}

Fixture smooth_fixture(const SearchSpace& space, std::uint64_t land_seed, NoiseSpec noise,
                       std::uint64_t model_seed = 1) {
    Fixture f;
    f.land = std::make_shared<Landscape>(space, LandscapeSpec::random_smooth_default(land_seed));
    f.model = std::make_shared<InterferenceModel>(f.land, noise, 0.05, model_seed);
    f.runner = std::make_unique<SimRunner>(f.model, 64, 100);
    return f;
}

std::vector<double> ascending_times(std::size_t n, double start = 100.0, double step = 1.0) {
    std::vector<double> times;
    for (std::size_t i = 0; i < n; ++i) times.push_back(start + step * static_cast<double>(i));
    return times;
}

bool same_game(const GameResult& a, const GameResult& b) {
    if (a.uid != b.uid || a.phase != b.phase || a.round != b.round || a.unit != b.unit ||
        a.seq != b.seq || a.winner_index != b.winner_index ||
        a.terminated_early != b.terminated_early || a.elapsed != b.elapsed ||
        a.players.size() != b.players.size())
        return false;
    for (std::size_t i = 0; i < a.players.size(); ++i) {
        if (a.players[i].linear_index != b.players[i].linear_index ||
            a.players[i].execution_score != b.players[i].execution_score ||
            a.players[i].rank != b.players[i].rank)
            return false;
    }
    return true;
}

bool same_report(const TournamentReport& a, const TournamentReport& b) {
    if (a.winner_linear != b.winner_linear || a.games.size() != b.games.size() ||
        a.flags != b.flags || a.regional_winners != b.regional_winners ||
        a.playoff_entrants != b.playoff_entrants || a.finalists != b.finalists)
        return false;
    for (std::size_t i = 0; i < a.games.size(); ++i)
        if (!same_game(a.games[i], b.games[i])) return false;
    if (a.brackets.size() != b.brackets.size()) return false;
    for (std::size_t i = 0; i < a.brackets.size(); ++i) {
        if (a.brackets[i].main != b.brackets[i].main ||
            a.brackets[i].losers != b.brackets[i].losers ||
            a.brackets[i].eliminated != b.brackets[i].eliminated ||
            a.brackets[i].advanced != b.brackets[i].advanced)
            return false;
    }
    return a.ledger.total == b.ledger.total && a.ledger.games == b.ledger.games;
}

TournamentConfig small_cfg() {
    TournamentConfig cfg;
    cfg.P = 4;
    cfg.n_r = 8;
    cfg.seed = 5;
    return cfg;
}

} // namespace

TEST_CASE("a noise-free tournament always crowns the fastest configuration") {
    // Exactness needs full regional coverage: with regions no larger than P,
    // every member is heard before a region can settle, so the noise-free
    // optimum can never be skipped. (Larger regions trade exactness for
    // cost: the win threshold may settle a region before everyone played.)
    const SearchSpace space = make_space({5, 5, 4});
    for (std::uint64_t land_seed : {1u, 2u, 3u}) {
        Fixture f = smooth_fixture(space, land_seed, NoiseSpec::none());
        TournamentConfig cfg;
        cfg.P = 4;
        cfg.n_r = 25;
        cfg.seed = 7 + land_seed;
        const TournamentReport report = run_tournament(space, cfg, *f.runner);
        const Optimum best = true_optimum(*f.land);
        CHECK(report.winner_linear == best.linear);
        CHECK(report.winner.linear_index == best.linear);
        REQUIRE(report.final_game.has_value());
        CHECK(report.final_game->winner_index == best.linear);
    }
}

TEST_CASE("tournament reports are internally consistent under noise") {
    const SearchSpace space = make_space({4, 4, 4});
    Fixture f = smooth_fixture(space, 1, NoiseSpec{});
    const TournamentConfig cfg = small_cfg();
    const TournamentReport report = run_tournament(space, cfg, *f.runner);

    CHECK(report.winner_linear < space.size());
    CHECK(report.winner.linear_index == report.winner_linear);
    REQUIRE(report.final_game.has_value());
    CHECK(report.final_game->winner_index == report.winner_linear);

    // Regional accounting: regions partition the space; winners live in
    // their own region; the flat winner list is the per-region concatenation.
    const RegionPartition regions = partition_regions(space, cfg.n_r);
    REQUIRE(report.regional.size() == cfg.n_r);
    std::uint64_t members = 0;
    std::vector<std::uint64_t> concat;
    for (const RegionalSummary& summary : report.regional) {
        members += summary.members;
        CHECK(summary.members == regions.region_size(summary.region));
        CHECK(summary.played <= summary.members);
        CHECK(summary.rounds >= 1);
        const bool known = summary.termination == "win_threshold" ||
                           summary.termination == "coverage" ||
                           summary.termination == "round_cap" ||
                           summary.termination == "singleton";
        CHECK(known);
        REQUIRE(!summary.winners.empty());
        for (std::uint64_t w : summary.winners) {
            CHECK(regions.region_range(summary.region).contains(w));
            concat.push_back(w);
        }
    }
    CHECK(members == space.size());
    CHECK(concat == report.regional_winners);

    // Game-level invariants: unique pre-assigned uids, phases in pipeline
    // order, a distinct roster per game, exactly one unit-score winner.
    std::set<std::uint64_t> uids;
    int last_phase = -1;
    for (const GameResult& game : report.games) {
        CHECK(uids.insert(game.uid).second);
        CHECK(static_cast<int>(game.phase) >= last_phase);
        last_phase = static_cast<int>(game.phase);
        REQUIRE(game.players.size() >= 2);
        CHECK(game.players.size() <= static_cast<std::size_t>(cfg.P));
        std::set<std::uint64_t> roster;
        std::set<int> ranks;
        int winners_seen = 0;
        bool winner_in_roster = false;
        for (const PlayerOutcome& p : game.players) {
            CHECK(roster.insert(p.linear_index).second);
            CHECK(ranks.insert(p.rank).second);
            CHECK(p.execution_score >= 0.0);
            CHECK(p.execution_score <= 1.0);
            if (p.rank == 1) {
                ++winners_seen;
                CHECK(p.execution_score == 1.0);
            }
            if (p.linear_index == game.winner_index) winner_in_roster = true;
        }
        CHECK(winners_seen == 1);
        CHECK(winner_in_roster);
        CHECK(*ranks.begin() == 1);
        CHECK(*ranks.rbegin() == static_cast<int>(game.players.size()));
        CHECK(game.cost ==
              doctest::Approx(static_cast<double>(game.players.size()) * game.elapsed));
    }

    // The ledger is a pure function of the recorded games.
    CostLedger recomputed;
    for (const GameResult& game : report.games) recomputed.add(game);
    CHECK(recomputed.games == report.ledger.games);
    CHECK(recomputed.games == report.games.size());
    CHECK(recomputed.total == doctest::Approx(report.ledger.total));
    CHECK(recomputed.regional == doctest::Approx(report.ledger.regional));
    CHECK(recomputed.global == doctest::Approx(report.ledger.global));
    CHECK(recomputed.playoffs == doctest::Approx(report.ledger.playoffs));
    CHECK(recomputed.final_game == doctest::Approx(report.ledger.final_game));
    CHECK(recomputed.early_termination_savings ==
          doctest::Approx(report.ledger.early_termination_savings));
    CHECK(report.ledger.total ==
          doctest::Approx(report.ledger.regional + report.ledger.global +
                          report.ledger.playoffs + report.ledger.final_game +
                          report.ledger.sample));

    // Bracket snapshots partition the global entrants, every round.
    REQUIRE(!report.brackets.empty());
    std::vector<std::uint64_t> entrants = report.brackets.front().main;
    std::sort(entrants.begin(), entrants.end());
    for (const BracketSnapshot& snap : report.brackets) {
        std::vector<std::uint64_t> all;
        for (const auto* part : {&snap.main, &snap.losers, &snap.eliminated, &snap.advanced})
            all.insert(all.end(), part->begin(), part->end());
        std::sort(all.begin(), all.end());
        CHECK(all == entrants);  // nobody appears twice, nobody vanishes
    }

    CHECK(!report.playoff_entrants.empty());
    CHECK(report.playoff_entrants.size() <= 4);
    CHECK(report.finalists.size() == 2);
}

TEST_CASE("identical configuration and seed reproduce the identical report") {
    const SearchSpace space = make_space({4, 4, 4});
    Fixture f1 = smooth_fixture(space, 1, NoiseSpec{});
    Fixture f2 = smooth_fixture(space, 1, NoiseSpec{});
    const TournamentConfig cfg = small_cfg();
    const TournamentReport a = run_tournament(space, cfg, *f1.runner);
    const TournamentReport b = run_tournament(space, cfg, *f2.runner);
    CHECK(same_report(a, b));

    TournamentConfig other = cfg;
    other.seed = cfg.seed + 1;
    Fixture f3 = smooth_fixture(space, 1, NoiseSpec{});
    const TournamentReport c = run_tournament(space, other, *f3.runner);
    CHECK_FALSE(same_report(a, c));  // game uids derive from the seed
}

TEST_CASE("the report does not depend on the parallelism level") {
    const SearchSpace space = make_space({4, 4, 4});
    const TournamentConfig base = small_cfg();

    TournamentConfig serial = base;
    serial.parallelism = 1;
    TournamentConfig wide = base;
    wide.parallelism = 4;

    Fixture f1 = smooth_fixture(space, 1, NoiseSpec{});
    Fixture f2 = smooth_fixture(space, 1, NoiseSpec{});
    const TournamentReport a = run_tournament(space, serial, *f1.runner);
    const TournamentReport b = run_tournament(space, wide, *f2.runner);
    CHECK(same_report(a, b));
}

TEST_CASE("early termination changes cost, never outcomes, under simulation") {
    const SearchSpace space = make_space({4, 4});
    Fixture on = smooth_fixture(space, 2, NoiseSpec{});
    Fixture off = smooth_fixture(space, 2, NoiseSpec{});

    TournamentConfig cfg;
    cfg.P = 4;
    cfg.n_r = 4;
    cfg.seed = 11;
    TournamentConfig lazy = cfg;
    lazy.early_termination = false;

    const TournamentReport quick = run_tournament(space, cfg, *on.runner);
    const TournamentReport full = run_tournament(space, lazy, *off.runner);

    CHECK(quick.winner_linear == full.winner_linear);
    REQUIRE(quick.games.size() == full.games.size());
    bool any_early = false;
    for (std::size_t i = 0; i < quick.games.size(); ++i) {
        CHECK(quick.games[i].uid == full.games[i].uid);
        CHECK(quick.games[i].winner_index == full.games[i].winner_index);
        // Progress is linear, so the score ratios match at any instant.
        for (std::size_t p = 0; p < quick.games[i].players.size(); ++p)
            CHECK(quick.games[i].players[p].execution_score ==
                  doctest::Approx(full.games[i].players[p].execution_score));
        any_early = any_early || quick.games[i].terminated_early;
        CHECK_FALSE(full.games[i].terminated_early);
    }
    CHECK(any_early);
    CHECK(quick.ledger.early_termination_savings > 0.0);
    CHECK(full.ledger.early_termination_savings == 0.0);
    // What early termination saved is exactly what the full runs spent.
    CHECK(full.ledger.total ==
          doctest::Approx(quick.ledger.total + quick.ledger.early_termination_savings));
}

TEST_CASE("a two-member region settles by the win threshold") {
    const SearchSpace space = make_space({2});
    Fixture f = table_fixture(space, {100.0, 200.0}, NoiseSpec::none());
    TournamentConfig cfg;
    cfg.P = 8;
    cfg.n_r = 1;
    cfg.seed = 3;
    const RegionalOutcome outcome =
        run_regional(space, space.full_range(), 0, cfg, *f.runner);

    CHECK(outcome.termination == "win_threshold");
    CHECK(outcome.rounds == 2);  // the same dominator wins twice running
    CHECK(outcome.games.size() == 2);
    REQUIRE(outcome.winners.size() == 1);
    CHECK(outcome.winners[0].config.linear_index == 0);
    CHECK(outcome.winners[0].wins == 2);
    CHECK(outcome.members == 2);
    CHECK(outcome.played == 2);
}

TEST_CASE("companions within the deviation band advance alongside the winner") {
    const SearchSpace space = make_space({2});
    // 100 vs 101: the loser still does 99% of the winner's work.
    Fixture close = table_fixture(space, {100.0, 101.0}, NoiseSpec::none());
    TournamentConfig cfg;
    cfg.P = 8;
    cfg.n_r = 1;
    cfg.seed = 3;
    const RegionalOutcome both = run_regional(space, space.full_range(), 0, cfg, *close.runner);
    REQUIRE(both.winners.size() == 2);
    CHECK(both.winners[0].config.linear_index == 0);
    CHECK(both.winners[1].config.linear_index == 1);
    CHECK(both.winners[1].best_execution_score() >= 1.0 - cfg.d / 100.0);

    // 100 vs 200: half the work is far outside the d = 10 point band.
    Fixture wide = table_fixture(space, {100.0, 200.0}, NoiseSpec::none());
    const RegionalOutcome lone = run_regional(space, space.full_range(), 0, cfg, *wide.runner);
    REQUIRE(lone.winners.size() == 1);
    CHECK(lone.winners[0].config.linear_index == 0);
}

TEST_CASE("the round cap stops a region that cannot settle") {
    const SearchSpace space = make_space({8});
    Fixture f = table_fixture(space, ascending_times(8, 100.0, 10.0), NoiseSpec::none());
    TournamentConfig cfg;
    cfg.P = 4;
    cfg.n_r = 1;
    cfg.seed = 9;
    cfg.max_regional_rounds = 1;
    const RegionalOutcome outcome =
        run_regional(space, space.full_range(), 0, cfg, *f.runner);
    CHECK(outcome.termination == "round_cap");
    CHECK(outcome.rounds == 1);
    CHECK(outcome.games.size() == 1);
    CHECK(outcome.played == 4);
    CHECK(!outcome.winners.empty());
}

TEST_CASE("regional terminations keep their promises across many seeds") {
    const SearchSpace space = make_space({8});
    TournamentConfig cfg;
    cfg.P = 4;
    cfg.n_r = 1;
    std::set<std::string> seen;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        Fixture f = smooth_fixture(space, 4, NoiseSpec{}, 2);
        cfg.seed = seed;
        const RegionalOutcome outcome =
            run_regional(space, space.full_range(), 0, cfg, *f.runner);
        seen.insert(outcome.termination);

        // `played` is exactly the set of members that appear in a game.
        std::set<std::uint64_t> appeared;
        for (const GameResult& game : outcome.games)
            for (const PlayerOutcome& p : game.players) appeared.insert(p.linear_index);
        CHECK(appeared.size() == outcome.played);

        REQUIRE(!outcome.winners.empty());
        std::set<std::uint64_t> distinct;
        for (const Player& w : outcome.winners) {
            CHECK(distinct.insert(w.config.linear_index).second);
            CHECK(appeared.contains(w.config.linear_index));
        }

        if (outcome.termination == "win_threshold") {
            int best_wins = 0;
            for (const Player& w : outcome.winners) best_wins = std::max(best_wins, w.wins);
            CHECK(best_wins >= cfg.region_consecutive_win_threshold);
        } else if (outcome.termination == "coverage") {
            CHECK(outcome.played == outcome.members);
            CHECK(outcome.rounds >= cfg.region_consecutive_win_threshold);
        } else {
            CHECK(outcome.termination == "round_cap");
            CHECK(outcome.rounds == 4 * 2);  // default cap: 4 x ceil(8 / 4)
        }
    }
    CHECK(seen.contains("win_threshold"));  // the common case must occur
}

TEST_CASE("the global phase narrows 32 entrants to 3 plus a wild card") {
    const SearchSpace space = make_space({32});
    Fixture f = table_fixture(space, ascending_times(32), NoiseSpec::none());
    TournamentConfig cfg;
    cfg.P = 8;
    cfg.seed = 21;

    std::vector<Player> storage(32);
    std::vector<Player*> players;
    for (std::size_t i = 0; i < 32; ++i) {
        storage[i].config = space.delinearize(i);
        storage[i].region = i / 8;
        players.push_back(&storage[i]);
    }
    const GlobalOutcome outcome = run_global(players, cfg, *f.runner);

    CHECK(outcome.finalists.size() == 3);
    REQUIRE(outcome.wild_card != nullptr);
    // Round one: four groups of eight. Round two: three groups sized
    // (2,1,1), one real game plus two walkovers. One wild-card game.
    CHECK(outcome.games.size() == 4 + 1 + 1);
    REQUIRE(outcome.brackets.size() == 4);
    CHECK(outcome.brackets[0].main.size() == 32);
    CHECK(outcome.brackets[1].main.size() == 4);
    CHECK(outcome.brackets[1].losers.size() == 28);
    CHECK(outcome.brackets[2].main.size() == 3);
    CHECK(outcome.brackets[2].losers.size() == 29);
    CHECK(outcome.brackets[3].advanced.size() == 1);
    CHECK(outcome.brackets[3].advanced[0] == outcome.wild_card->config.linear_index);
    CHECK(outcome.brackets[3].eliminated.size() == 28);

    // Noise-free, the fastest entrant can never lose a game.
    bool fastest_survived = false;
    for (const Player* p : outcome.finalists)
        if (p->config.linear_index == 0) fastest_survived = true;
    CHECK(fastest_survived);
    CHECK(outcome.wild_card->config.linear_index != 0);
}

TEST_CASE("a lone loser takes the wild card by walkover") {
    const SearchSpace space = make_space({4});
    Fixture f = table_fixture(space, ascending_times(4), NoiseSpec::none());
    TournamentConfig cfg;
    cfg.P = 4;
    cfg.seed = 2;

    std::vector<Player> storage(4);
    std::vector<Player*> players;
    for (std::size_t i = 0; i < 4; ++i) {
        storage[i].config = space.delinearize(i);
        storage[i].region = i;
        players.push_back(&storage[i]);
    }
    const GlobalOutcome outcome = run_global(players, cfg, *f.runner);
    CHECK(outcome.finalists.size() == 3);
    CHECK(outcome.games.size() == 1);  // one real game, two walkovers
    REQUIRE(outcome.wild_card != nullptr);
    CHECK(std::find(outcome.flags.begin(), outcome.flags.end(), "wild_card_walkover") !=
          outcome.flags.end());
}

TEST_CASE("the global phase refuses fewer players than it can narrow") {
    const SearchSpace space = make_space({3});
    Fixture f = table_fixture(space, ascending_times(3), NoiseSpec::none());
    TournamentConfig cfg;
    std::vector<Player> storage(3);
    std::vector<Player*> players;
    for (std::size_t i = 0; i < 3; ++i) {
        storage[i].config = space.delinearize(i);
        players.push_back(&storage[i]);
    }
    CHECK_THROWS_AS(run_global(players, cfg, *f.runner), InvalidArgument);
}

namespace {

std::vector<Player> seeded_players(const SearchSpace& space, std::size_t n) {
    // Give seed i an average execution score that decreases with i, the
    // way a noise-free global phase would have ranked them.
    std::vector<Player> storage(n);
    for (std::size_t i = 0; i < n; ++i) {
        storage[i].config = space.delinearize(i);
        GameRecord rec;
        rec.game_uid = 1000 + i;
        rec.phase = Phase::global;
        rec.rank = static_cast<int>(i) + 1;
        rec.execution_score = 1.0 - 0.1 * static_cast<double>(i);
        storage[i].history.push_back(rec);
    }
    return storage;
}

} // namespace

TEST_CASE("the barrage sends the top two seeds to the final the long way") {
    // Base times 100, 105, 120, 140: game one promotes 100, game two
    // promotes 120, game three lets 105 recover by beating 120.
    const SearchSpace space = make_space({4});
    Fixture f = table_fixture(space, {100.0, 105.0, 120.0, 140.0}, NoiseSpec::none());
    TournamentConfig cfg;
    cfg.seed = 31;

    std::vector<Player> storage = seeded_players(space, 4);
    std::vector<Player*> entrants;
    for (Player& p : storage) entrants.push_back(&p);

    const PlayoffOutcome outcome = run_playoffs(entrants, cfg, *f.runner);
    REQUIRE(outcome.finalists[0] != nullptr);
    REQUIRE(outcome.finalists[1] != nullptr);
    CHECK(outcome.finalists[0]->config.linear_index == 0);
    CHECK(outcome.finalists[1]->config.linear_index == 1);
    CHECK(outcome.games.size() == 3);
    for (const GameResult& game : outcome.games) {
        CHECK(game.phase == Phase::playoffs);
        CHECK(game.players.size() == 2);
        CHECK_FALSE(game.terminated_early);  // playoffs always run full length
    }
}

TEST_CASE("a three-entrant barrage skips the bottom pairing") {
    const SearchSpace space = make_space({3});
    Fixture f = table_fixture(space, {100.0, 105.0, 120.0}, NoiseSpec::none());
    TournamentConfig cfg;
    cfg.seed = 32;
    std::vector<Player> storage = seeded_players(space, 3);
    std::vector<Player*> entrants;
    for (Player& p : storage) entrants.push_back(&p);

    const PlayoffOutcome outcome = run_playoffs(entrants, cfg, *f.runner);
    CHECK(outcome.games.size() == 2);
    CHECK(outcome.finalists[0]->config.linear_index == 0);
    CHECK(outcome.finalists[1]->config.linear_index == 1);
    CHECK(std::find(outcome.flags.begin(), outcome.flags.end(), "three_entrant_barrage") !=
          outcome.flags.end());
}

TEST_CASE("playoff edge cases: two entrants, one entrant, five entrants") {
    const SearchSpace space = make_space({5});
    Fixture f = table_fixture(space, ascending_times(5, 100.0, 10.0), NoiseSpec::none());
    TournamentConfig cfg;
    cfg.seed = 33;
    std::vector<Player> storage = seeded_players(space, 5);

    std::vector<Player*> two{&storage[0], &storage[1]};
    const PlayoffOutcome direct = run_playoffs(two, cfg, *f.runner);
    CHECK(direct.games.empty());
    CHECK(direct.finalists[0] == &storage[0]);
    CHECK(direct.finalists[1] == &storage[1]);
    CHECK(std::find(direct.flags.begin(), direct.flags.end(), "direct_final") !=
          direct.flags.end());

    std::vector<Player*> one{&storage[2]};
    const PlayoffOutcome single = run_playoffs(one, cfg, *f.runner);
    CHECK(single.finalists[0] == &storage[2]);
    CHECK(single.finalists[1] == nullptr);
    CHECK(std::find(single.flags.begin(), single.flags.end(), "single_entrant") !=
          single.flags.end());

    std::vector<Player*> five{&storage[0], &storage[1], &storage[2], &storage[3], &storage[4]};
    const PlayoffOutcome trimmed = run_playoffs(five, cfg, *f.runner);
    CHECK(std::find(trimmed.flags.begin(), trimmed.flags.end(), "playoffs_truncated_to_top_4") !=
          trimmed.flags.end());
    CHECK(trimmed.games.size() == 3);
    CHECK(trimmed.finalists[0]->config.linear_index == 0);

    TournamentConfig flat = cfg;
    flat.variants.no_barrage = true;
    std::vector<Player*> four{&storage[0], &storage[1], &storage[2], &storage[3]};
    const PlayoffOutcome seeded = run_playoffs(four, flat, *f.runner);
    CHECK(seeded.games.empty());
    CHECK(seeded.finalists[0] == &storage[0]);
    CHECK(seeded.finalists[1] == &storage[1]);
    CHECK(std::find(seeded.flags.begin(), seeded.flags.end(), "no_barrage_top2_seeding") !=
          seeded.flags.end());
}

TEST_CASE("diverse grouping separates region mates whenever it can") {
    auto make_players = [](const std::vector<std::uint64_t>& regions) {
        std::vector<Player> storage(regions.size());
        for (std::size_t i = 0; i < regions.size(); ++i) {
            storage[i].config.linear_index = i;
            storage[i].region = regions[i];
        }
        return storage;
    };
    auto regions_in = [](const std::vector<Player*>& group) {
        std::multiset<std::uint64_t> regions;
        for (const Player* p : group) regions.insert(p->region);
        return regions;
    };
    auto conserve = [](const std::vector<Player*>& players,
                       const std::vector<std::vector<Player*>>& groups) {
        std::set<const Player*> seen;
        std::size_t total = 0;
        for (const auto& group : groups) {
            total += group.size();
            for (const Player* p : group) CHECK(seen.insert(p).second);
        }
        CHECK(total == players.size());
    };

    // Eight players from eight regions, games of four: all-distinct groups.
    std::vector<Player> eight = make_players({0, 1, 2, 3, 4, 5, 6, 7});
    std::vector<Player*> ptrs;
    for (Player& p : eight) ptrs.push_back(&p);
    auto groups = form_diverse_groups(ptrs, 4);
    REQUIRE(groups.size() == 2);
    for (const auto& g : groups) {
        CHECK(g.size() == 4);
        const std::multiset<std::uint64_t> regs = regions_in(g);
        const std::set<std::uint64_t> unique(regs.begin(), regs.end());
        CHECK(unique.size() == 4);  // all four regions distinct
    }
    conserve(ptrs, groups);

    // Six players, two per region, games of three: one of each per group.
    std::vector<Player> six = make_players({0, 0, 1, 1, 2, 2});
    ptrs.clear();
    for (Player& p : six) ptrs.push_back(&p);
    groups = form_diverse_groups(ptrs, 3);
    REQUIRE(groups.size() == 2);
    for (const auto& g : groups) {
        const std::multiset<std::uint64_t> expected{0, 1, 2};
        CHECK(regions_in(g) == expected);
    }
    conserve(ptrs, groups);

    // Five players from one region: duplication is unavoidable, sizes 4 + 1.
    std::vector<Player> five = make_players({0, 0, 0, 0, 0});
    ptrs.clear();
    for (Player& p : five) ptrs.push_back(&p);
    groups = form_diverse_groups(ptrs, 4);
    REQUIRE(groups.size() == 2);
    CHECK(groups[0].size() + groups[1].size() == 5);
    CHECK(std::max(groups[0].size(), groups[1].size()) == 4);
    conserve(ptrs, groups);
}

TEST_CASE("the cost ledger books each phase and the early-exit savings") {
    GameResult game;
    game.phase = Phase::regional;
    game.elapsed = 30.0;
    game.terminated_early = true;
    game.players.resize(2);
    game.players[0].work_fraction = 0.25;  // leader at termination
    game.players[1].work_fraction = 0.10;
    game.cost = 60.0;

    CostLedger ledger;
    ledger.add(game);
    CHECK(ledger.total == 60.0);
    CHECK(ledger.regional == 60.0);
    CHECK(ledger.games == 1);
    // Leader-linear extrapolation: 2 players x (30/0.25 - 30) = 180.
    CHECK(ledger.early_termination_savings == doctest::Approx(180.0));

    GameResult final_game;
    final_game.phase = Phase::final_game;
    final_game.elapsed = 100.0;
    final_game.players.resize(2);
    final_game.players[0].work_fraction = 1.0;
    final_game.cost = 200.0;
    CostLedger other;
    other.add(final_game);
    CHECK(other.final_game == 200.0);
    CHECK(other.early_termination_savings == 0.0);

    ledger.merge(other);
    CHECK(ledger.total == 260.0);
    CHECK(ledger.games == 2);
    CHECK(ledger.final_game == 200.0);
}

TEST_CASE("degenerate spaces and clamped region counts stay well-defined") {
    const SearchSpace lone = make_space({1});
    Fixture f1 = table_fixture(lone, {100.0}, NoiseSpec::none());
    TournamentConfig cfg;
    cfg.seed = 4;
    const TournamentReport single = run_tournament(lone, cfg, *f1.runner);
    CHECK(single.winner_linear == 0);
    CHECK(!single.final_game.has_value());
    CHECK(std::find(single.flags.begin(), single.flags.end(), "degenerate_single_config") !=
          single.flags.end());

    const SearchSpace pair = make_space({2});
    Fixture f2 = table_fixture(pair, {130.0, 100.0}, NoiseSpec::none());
    const TournamentReport duel = run_tournament(pair, cfg, *f2.runner);
    CHECK(duel.winner_linear == 1);  // the faster of the two
    REQUIRE(duel.final_game.has_value());
    CHECK(std::find(duel.flags.begin(), duel.flags.end(), "direct_final_two_configs") !=
          duel.flags.end());

    const SearchSpace tiny = make_space({2, 2});
    Fixture f3 = table_fixture(tiny, ascending_times(4), NoiseSpec::none());
    TournamentConfig wide = cfg;
    wide.n_r = 100;  // far more regions than configurations
    const TournamentReport clamped = run_tournament(tiny, wide, *f3.runner);
    CHECK(std::find(clamped.flags.begin(), clamped.flags.end(), "n_r_clamped_to_space_size") !=
          clamped.flags.end());
    CHECK(clamped.regional.size() <= tiny.size());
    CHECK(clamped.winner_linear == 0);
}

TEST_CASE("a small winner pool skips the global phase") {
    const SearchSpace space = make_space({6});
    Fixture f = table_fixture(space, {100.0, 130.0, 101.0, 131.0, 102.0, 132.0},
                              NoiseSpec::none());
    TournamentConfig cfg;
    cfg.P = 8;
    cfg.n_r = 3;
    cfg.seed = 6;
    const TournamentReport report = run_tournament(space, cfg, *f.runner);
    CHECK(std::find(report.flags.begin(), report.flags.end(),
                    "global_skipped_insufficient_winners") != report.flags.end());
    for (const GameResult& game : report.games) CHECK(game.phase != Phase::global);
    CHECK(report.ledger.global == 0.0);
    CHECK(report.winner_linear == 0);
}

TEST_CASE("a tournament restricted to a slice stays inside the slice") {
    const SearchSpace space = make_space({4, 4});
    Fixture f = smooth_fixture(space, 3, NoiseSpec::none());
    TournamentConfig cfg;
    cfg.P = 4;
    cfg.n_r = 2;
    cfg.seed = 8;
    const IndexRange slice{4, 12};
    const TournamentReport report = run_tournament(space, slice, cfg, *f.runner);
    CHECK(slice.contains(report.winner_linear));

    std::uint64_t best = slice.lo;
    for (std::uint64_t i = slice.lo; i < slice.hi; ++i)
        if (f.land->base_time(i) < f.land->base_time(best)) best = i;
    CHECK(report.winner_linear == best);
    for (const GameResult& game : report.games)
        for (const PlayerOutcome& p : game.players) CHECK(slice.contains(p.linear_index));
}

TEST_CASE("structural ablations remove exactly their own ingredient") {
    const SearchSpace space = make_space({4, 4});
    const Optimum best = [&] {
        Fixture probe = smooth_fixture(space, 5, NoiseSpec::none());
        return true_optimum(*probe.land);
    }();
    TournamentConfig cfg;
    cfg.P = 4;
    cfg.n_r = 4;
    cfg.seed = 13;

    SUBCASE("no_regional sends every configuration to the global phase") {
        Fixture f = smooth_fixture(space, 5, NoiseSpec::none());
        TournamentConfig variant = cfg;
        variant.variants.no_regional = true;
        const TournamentReport report = run_tournament(space, variant, *f.runner);
        CHECK(report.regional.empty());
        CHECK(report.ledger.regional == 0.0);
        REQUIRE(!report.brackets.empty());
        CHECK(report.brackets.front().main.size() == space.size());
        CHECK(report.winner_linear == best.linear);  // still exact without noise
    }

    SUBCASE("no_global promotes regional winners straight to the playoffs") {
        Fixture f = smooth_fixture(space, 5, NoiseSpec::none());
        TournamentConfig variant = cfg;
        variant.variants.no_global = true;
        const TournamentReport report = run_tournament(space, variant, *f.runner);
        CHECK(std::find(report.flags.begin(), report.flags.end(), "no_global") !=
              report.flags.end());
        for (const GameResult& game : report.games) CHECK(game.phase != Phase::global);
        CHECK(report.ledger.global == 0.0);
    }

    SUBCASE("all_two_player caps every roster at two") {
        Fixture f = smooth_fixture(space, 5, NoiseSpec{});
        TournamentConfig variant = cfg;
        variant.variants.all_two_player = true;
        const TournamentReport report = run_tournament(space, variant, *f.runner);
        for (const GameResult& game : report.games) CHECK(game.players.size() <= 2);
    }

    SUBCASE("no_double_elimination never revives a loser") {
        Fixture f = smooth_fixture(space, 5, NoiseSpec{});
        TournamentConfig variant = cfg;
        variant.variants.no_double_elimination = true;
        const TournamentReport report = run_tournament(space, variant, *f.runner);
        for (const BracketSnapshot& snap : report.brackets) {
            CHECK(snap.advanced.empty());
            CHECK(snap.losers.empty());
        }
    }

    SUBCASE("no_swiss still terminates every region lawfully") {
        Fixture f = smooth_fixture(space, 5, NoiseSpec{});
        TournamentConfig variant = cfg;
        variant.variants.no_swiss = true;
        const TournamentReport report = run_tournament(space, variant, *f.runner);
        for (const RegionalSummary& summary : report.regional) {
            const bool known = summary.termination == "win_threshold" ||
                               summary.termination == "coverage" ||
                               summary.termination == "round_cap" ||
                               summary.termination == "singleton";
            CHECK(known);
        }
        CHECK(report.winner_linear < space.size());
    }
}

TEST_CASE("configuration validation rejects out-of-range settings") {
    TournamentConfig cfg;
    cfg.P = 1;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfiguration);
    cfg = TournamentConfig{};
    cfg.n_r = 0;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfiguration);
    cfg = TournamentConfig{};
    cfg.d = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfiguration);
    cfg = TournamentConfig{};
    cfg.d = 100.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfiguration);
    cfg = TournamentConfig{};
    cfg.min_work_fraction = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfiguration);
    cfg = TournamentConfig{};
    cfg.main_bracket_target = 1;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfiguration);
    cfg = TournamentConfig{};
    cfg.region_consecutive_win_threshold = 0;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfiguration);
    cfg = TournamentConfig{};
    cfg.parallelism = 0;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfiguration);
    cfg = TournamentConfig{};
    CHECK_NOTHROW(cfg.validate());
}
