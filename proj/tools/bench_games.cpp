// Compares the serial reference path (parallelism = 1) against the
// OpenMP-parallel path over regions and global rounds. Identical results
// are guaranteed by the RNG keying; this target measures the speedup.

#include "arena/experiment.hpp"
#include "arena/sim.hpp"
#include "arena/space.hpp"
#include "arena/tournament.hpp"

#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

namespace {

arena::SearchSpace bench_space() {
    std::vector<arena::ParameterDef> params(3);
    for (std::size_t d = 0; d < params.size(); ++d) {
        params[d].name = "p" + std::to_string(d);
        for (int v = 0; v < 12; ++v) params[d].values.push_back(std::to_string(v));
    }
    return arena::SearchSpace(std::move(params));  // 12^3 = 1728 configurations
}

std::unique_ptr<arena::SimRunner> bench_runner(const arena::SearchSpace& space) {
    auto landscape = std::make_shared<arena::Landscape>(
        space, arena::LandscapeSpec::random_smooth_default(17));
    auto model = std::make_shared<arena::InterferenceModel>(landscape, arena::NoiseSpec{},
                                                            0.05, 17);
    return std::make_unique<arena::SimRunner>(model);
}

void BM_tournament(benchmark::State& state) {
    const arena::SearchSpace space = bench_space();
    std::unique_ptr<arena::SimRunner> runner = bench_runner(space);
    arena::TournamentConfig cfg;
    cfg.n_r = 40;
    cfg.seed = 17;
    cfg.parallelism = static_cast<int>(state.range(0));
    for (auto _ : state) {
        arena::TournamentReport report = arena::run_tournament(space, cfg, *runner);
        benchmark::DoNotOptimize(report.winner_linear);
    }
    state.counters["games"] = static_cast<double>(cfg.n_r);
}
BENCHMARK(BM_tournament)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_effective_times(benchmark::State& state) {
    const arena::SearchSpace space = bench_space();
    auto landscape = std::make_shared<arena::Landscape>(
        space, arena::LandscapeSpec::random_smooth_default(17));
    arena::InterferenceModel model(landscape, arena::NoiseSpec{}, 0.05, 17);
    std::vector<std::uint64_t> group;
    for (std::uint64_t i = 0; i < 8; ++i) group.push_back(i * 7);
    std::uint64_t uid = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.effective_times(group, ++uid));
    }
}
BENCHMARK(BM_effective_times);

} // namespace

BENCHMARK_MAIN();
