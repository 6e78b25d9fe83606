#pragma once

#include "arena/procrunner.hpp"
#include "arena/sim.hpp"
#include "arena/space.hpp"
#include "arena/tournament.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace arena {

inline constexpr int kConfigVersion = 1;

struct SimulatorSettings {
    LandscapeSpec landscape = LandscapeSpec::random_smooth_default(1);
    NoiseSpec noise;
    double coloc_factor = 0.05;
    int ticks = 100;
    std::size_t capacity = 64;
};

struct ProcessSettings {
    WorkloadTemplate workload;
    std::size_t capacity = 8;
    int poll_ms = 250;
    bool pin_cpus = false;
};

struct BaselineSettings {
    std::string kind = "random";     // random | hillclimb
    std::uint64_t n_sub = 10;        // subspaces for integrated tuning
    std::uint64_t budget = 10;       // subspace evaluations
    std::uint64_t sample_budget = 0; // noise-unaware samples; 0 = space size
};

/// Everything one run needs; (config file, seed) fully determines outputs.
struct ExperimentConfig {
    int version = kConfigVersion;
    std::uint64_t seed = 1;
    int repeats = 1;
    std::string output_dir = "out";
    int parallelism = 1;

    std::vector<ParameterDef> params;

    std::string runner_type = "simulator";  // simulator | process
    SimulatorSettings sim;
    ProcessSettings proc;

    TournamentConfig tournament;

    /// Pipeline run by `run`: tournament | noise_unaware | exhaustive_noise
    /// | integrated_random | integrated_hillclimb.
    std::string method = "tournament";
    BaselineSettings baseline;

    /// Throws ConfigError naming the offending field (dotted path).
    static ExperimentConfig from_json(const nlohmann::json& root);
    static ExperimentConfig load_file(const std::string& path);
    nlohmann::json to_json() const;

    SearchSpace make_space() const { return SearchSpace(params); }
    void validate() const;
};

} // namespace arena
