#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "arena/engine.hpp"
#include "arena/error.hpp"
#include "arena/procrunner.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

using namespace arena;
namespace fs = std::filesystem;

namespace {

const std::string kWorkload = WORKLOAD_BIN;

SearchSpace work_space(const std::vector<std::string>& unit_us) {
    ParameterDef def;
    def.name = "work";
    def.values = unit_us;
    return SearchSpace({def});
}

/// Fresh private directory for one test's progress files.
struct TempDir {
    TempDir() {
        std::string tpl = (fs::temp_directory_path() / "arenaXXXXXX").string();
        REQUIRE(mkdtemp(tpl.data()) != nullptr);
        path = tpl;
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string path;
};

/// Number of live processes whose command line mentions `marker`.
int processes_mentioning(const std::string& marker) {
    int count = 0;
    for (const fs::directory_entry& entry : fs::directory_iterator("/proc")) {
        const std::string name = entry.path().filename().string();
        if (name.find_first_not_of("0123456789") != std::string::npos) continue;
        std::ifstream in(entry.path() / "cmdline", std::ios::binary);
        if (!in) continue;
        std::string cmdline((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
        for (char& c : cmdline)
            if (c == '\0') c = ' ';
        if (cmdline.find(marker) != std::string::npos) ++count;
    }
    return count;
}

bool drains_to_zero(const std::string& marker) {
    for (int i = 0; i < 60; ++i) {
        if (processes_mentioning(marker) == 0) return true;
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    return false;
}

WorkloadTemplate spin_template(const std::string& dir, const std::string& extra = "") {
    WorkloadTemplate tpl;
    tpl.progress_path = dir + "/p{player}_{game}.progress";
    tpl.command = kWorkload + " --progress " + tpl.progress_path +
                  " --mode sleep --units 10 --unit-us {work}" + extra;
    tpl.timeout_s = 30.0;
    tpl.grace_s = 5.0;
    return tpl;
}

} // namespace

TEST_CASE("template instantiation substitutes parameters and built-ins") {
    const SearchSpace space = work_space({"8000", "40000"});
    const Configuration cfg = space.delinearize(1);
    const std::string out = instantiate_template(
        "run --progress /tmp/p{player}_{game} --unit-us {work}", space, cfg, 2, 77);
    CHECK(out == "run --progress /tmp/p2_77 --unit-us 40000");

    CHECK_THROWS_AS(instantiate_template("oops {nope}", space, cfg, 0, 0),
                    InvalidConfiguration);
    CHECK_THROWS_AS(instantiate_template("oops {work", space, cfg, 0, 0),
                    InvalidConfiguration);
}

TEST_CASE("workload templates are validated before anything is launched") {
    const SearchSpace space = work_space({"8000", "40000"});
    WorkloadTemplate tpl;
    tpl.command = "run {work}";
    tpl.progress_path = "/tmp/x";
    CHECK_NOTHROW(tpl.validate(space));

    WorkloadTemplate empty_cmd = tpl;
    empty_cmd.command.clear();
    CHECK_THROWS_AS(empty_cmd.validate(space), InvalidConfiguration);

    WorkloadTemplate no_progress = tpl;
    no_progress.progress_path.clear();
    CHECK_THROWS_AS(no_progress.validate(space), InvalidConfiguration);

    WorkloadTemplate unknown = tpl;
    unknown.command = "run {wrok}";
    CHECK_THROWS_AS(unknown.validate(space), InvalidConfiguration);

    WorkloadTemplate twice = tpl;
    twice.command = "run {work} {work}";
    CHECK_THROWS_AS(twice.validate(space), InvalidConfiguration);

    WorkloadTemplate builtins = tpl;
    builtins.command = "run {work} {player} {player} {game} {game}";
    CHECK_NOTHROW(builtins.validate(space));  // built-ins may repeat

    WorkloadTemplate bad_timeout = tpl;
    bad_timeout.timeout_s = 0.0;
    CHECK_THROWS_AS(bad_timeout.validate(space), InvalidConfiguration);

    WorkloadTemplate bad_grace = tpl;
    bad_grace.grace_s = -1.0;
    CHECK_THROWS_AS(bad_grace.validate(space), InvalidConfiguration);

    CHECK_THROWS_AS(ProcRunner(unknown, space), InvalidConfiguration);
    CHECK_THROWS_AS(ProcRunner(tpl, space, 0), InvalidConfiguration);
    CHECK_THROWS_AS(ProcRunner(tpl, space, 8, 0), InvalidConfiguration);
}

TEST_CASE("the faster real process wins and the protocol reaches done") {
    TempDir dir;
    const SearchSpace space = work_space({"15000", "45000"});
    ProcRunner runner(spin_template(dir.path), space, 8, 30);

    Player fast, slow;
    fast.config = space.delinearize(0);  // 10 x 15 ms
    slow.config = space.delinearize(1);  // 10 x 45 ms
    GameSpec spec;
    spec.players = {&fast, &slow};
    spec.early_termination = false;
    GameContext ctx;
    ctx.uid = 1001;
    const GameResult result = play_game(spec, runner, ctx);

    CHECK(result.winner_index == 0);
    CHECK_FALSE(result.terminated_early);
    CHECK(result.players[0].work_fraction == 1.0);  // read back from "done"
    CHECK(result.players[0].execution_score == 1.0);
    CHECK(result.players[1].work_fraction > 0.0);
    CHECK(result.players[1].work_fraction < 1.0);
    CHECK_FALSE(result.players[1].failed);
    CHECK(result.players[1].execution_score == result.players[1].work_fraction);
    CHECK(fast.wins == 1);
    CHECK(slow.history.size() == 1);
    CHECK(drains_to_zero(dir.path));
}

TEST_CASE("early termination reaps the trailing process, no orphans") {
    TempDir dir;
    const SearchSpace space = work_space({"20000", "400000"});
    ProcRunner runner(spin_template(dir.path), space, 8, 25);

    Player fast, slow;
    fast.config = space.delinearize(0);  // 200 ms total
    slow.config = space.delinearize(1);  // 4 s total: must be cut short
    GameSpec spec;
    spec.players = {&fast, &slow};
    GameContext ctx;
    ctx.uid = 1002;
    const auto wall_start = std::chrono::steady_clock::now();
    const GameResult result = play_game(spec, runner, ctx);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                      wall_start)
                            .count();

    CHECK(result.terminated_early);
    CHECK(result.winner_index == 0);
    CHECK(wall < 2.0);  // nowhere near the slow player's 4 seconds
    CHECK(drains_to_zero(dir.path));
}

TEST_CASE("a process that never writes progress fails after the grace period") {
    TempDir dir;
    const SearchSpace space = work_space({"1"});
    WorkloadTemplate tpl;
    tpl.command = "sleep 30";
    tpl.progress_path = dir.path + "/ghost_{game}.progress";
    tpl.timeout_s = 30.0;
    tpl.grace_s = 0.3;
    ProcRunner runner(tpl, space, 8, 25);

    Player p;
    p.config = space.delinearize(0);
    GameSpec spec;
    spec.players = {&p};
    GameContext ctx;
    ctx.uid = 1003;
    CHECK_THROWS_AS(play_game(spec, runner, ctx), GameFailed);
    CHECK(drains_to_zero("sleep 30"));
}

TEST_CASE("a process that exceeds the timeout is terminated and failed") {
    TempDir dir;
    const SearchSpace space = work_space({"100000"});
    WorkloadTemplate tpl = spin_template(dir.path);  // 10 x 100 ms = 1 s
    tpl.timeout_s = 0.3;
    ProcRunner runner(tpl, space, 8, 25);

    Player p;
    p.config = space.delinearize(0);
    GameSpec spec;
    spec.players = {&p};
    GameContext ctx;
    ctx.uid = 1004;
    CHECK_THROWS_AS(play_game(spec, runner, ctx), GameFailed);
    CHECK(drains_to_zero(dir.path));
}

TEST_CASE("exiting without the done token is a protocol violation") {
    TempDir dir;
    const SearchSpace space = work_space({"5000"});
    ProcRunner runner(spin_template(dir.path, " --no-done"), space, 8, 25);

    Player p;
    p.config = space.delinearize(0);
    GameSpec spec;
    spec.players = {&p};
    GameContext ctx;
    ctx.uid = 1005;
    CHECK_THROWS_AS(play_game(spec, runner, ctx), GameFailed);
    CHECK(drains_to_zero(dir.path));
}

TEST_CASE("a nonzero exit marks the player failed") {
    TempDir dir;
    const SearchSpace space = work_space({"5000", "5001"});
    // Player 0 aborts right away; player 1 finishes normally.
    WorkloadTemplate tpl;
    tpl.progress_path = dir.path + "/p{player}_{game}.progress";
    tpl.command = kWorkload + " --progress " + tpl.progress_path +
                  " --mode sleep --units 5 --unit-us {work} --fail-at {player}0";
    tpl.timeout_s = 30.0;
    tpl.grace_s = 5.0;
    ProcRunner runner(tpl, space, 8, 25);

    Player crasher, steady;
    crasher.config = space.delinearize(0);
    steady.config = space.delinearize(1);
    GameSpec spec;
    spec.players = {&crasher, &steady};
    GameContext ctx;
    ctx.uid = 1006;
    const GameResult result = play_game(spec, runner, ctx);

    // {player} expands to 0 and 1, so the flags read --fail-at 00 and
    // --fail-at 10: player 0 exits with code 1 after its first unit, while
    // player 1's trigger sits past its 5 units and never fires.
    CHECK(result.players[0].failed);
    CHECK(result.players[0].execution_score == 0.0);
    CHECK_FALSE(result.players[1].failed);
    CHECK(result.winner_index == steady.config.linear_index);
    CHECK(drains_to_zero(dir.path));
}

TEST_CASE("malformed progress lines are tolerated, the last good value holds") {
    TempDir dir;
    const SearchSpace space = work_space({"1"});
    const std::string file = dir.path + "/m_{game}.progress";
    WorkloadTemplate tpl;
    tpl.progress_path = file;
    tpl.command = "echo 0.5 > " + file + "; sleep 0.25; echo banana > " + file +
                  "; sleep 0.25; echo done > " + file;
    tpl.timeout_s = 30.0;
    tpl.grace_s = 5.0;
    ProcRunner runner(tpl, space, 8, 25);

    Player p;
    p.config = space.delinearize(0);
    GameSpec spec;
    spec.players = {&p};
    GameContext ctx;
    ctx.uid = 1007;
    const GameResult result = play_game(spec, runner, ctx);
    CHECK(result.players[0].work_fraction == 1.0);
    CHECK_FALSE(result.players[0].failed);
    CHECK(drains_to_zero(dir.path));
}
