#pragma once

#include "arena/config.hpp"
#include "arena/integrate.hpp"
#include "arena/sim.hpp"
#include "arena/tournament.hpp"

#include <nlohmann/json.hpp>

#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace arena {

/// The simulator world one experiment runs in: landscape, interference
/// model, runner, and the enumerated oracle.
struct SimBundle {
    std::shared_ptr<const Landscape> landscape;
    std::shared_ptr<const InterferenceModel> model;
    std::unique_ptr<SimRunner> runner;
    Optimum optimum;
};

SimBundle make_sim_bundle(const SearchSpace& space, const ExperimentConfig& cfg);

/// One method run on one seed; the row every table is built from.
/// base_time / gap_pct / cov_pct are NaN without a simulator oracle.
struct MethodRunRow {
    std::string method;
    int repeat = 0;
    std::uint64_t seed = 0;
    std::uint64_t winner = 0;
    double base_time = std::numeric_limits<double>::quiet_NaN();
    double gap_pct = std::numeric_limits<double>::quiet_NaN();
    double cov_pct = std::numeric_limits<double>::quiet_NaN();
    double core_time = 0.0;
    std::uint64_t games = 0;
};

struct MethodOutcome {
    MethodRunRow row;
    /// Game-level trace (synthesized phases for non-tournament methods).
    TournamentReport trace;
    /// Subspace evaluations (integrated methods only).
    std::vector<SubspaceEvaluation> evaluations;
};

/// Seed for repeat k; repeat 0 uses the configured seed verbatim.
std::uint64_t repeat_seed(std::uint64_t base, int repeat);

/// Runs one method (tournament | noise_unaware | exhaustive_noise |
/// integrated_random | integrated_hillclimb) once. `sim` may be null
/// (process runner); oracle columns are then NaN. `core_time_cap` bounds
/// the noise-unaware sampler for matched-budget comparisons.
MethodOutcome run_method(const ExperimentConfig& cfg, const SearchSpace& space,
                         const SimBundle* sim, Runner& runner, const std::string& method,
                         int repeat,
                         double core_time_cap = std::numeric_limits<double>::infinity());

/// Valid ablation variant names, in reporting order.
const std::vector<std::string>& known_variants();
/// Applies a named variant; throws ConfigError listing valid names.
TournamentConfig apply_variant(TournamentConfig base, const std::string& name);

struct CommandArtifacts {
    std::vector<MethodRunRow> rows;
    nlohmann::json summary;
    std::string out_dir;
};

/// `run`: executes cfg.method for cfg.repeats repeats; writes config.json,
/// trace.jsonl, metrics.csv, summary.json into out_dir.
CommandArtifacts cmd_run(const ExperimentConfig& cfg, const std::string& out_dir);

/// `compare`: tournament versus baselines at matched core-time budgets
/// (simulator only); writes config.json, records.jsonl, metrics.csv,
/// summary.csv, summary.json.
CommandArtifacts cmd_compare(const ExperimentConfig& cfg, std::vector<std::string> methods,
                             const std::string& out_dir);

/// `ablate`: full design versus named structural variants (simulator
/// only); same file shape as `compare`.
CommandArtifacts cmd_ablate(const ExperimentConfig& cfg, std::vector<std::string> variants,
                            const std::string& out_dir);

} // namespace arena
