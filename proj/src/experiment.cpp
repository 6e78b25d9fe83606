#include "arena/experiment.hpp"

#include "arena/error.hpp"
#include "arena/report.hpp"
#include "arena/rng.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <utility>

namespace arena {

namespace {

using nlohmann::json;

constexpr std::uint64_t kTagRepeat = 0x9E9Du;
constexpr int kReplayRepeats = 100;  // CoV window, one hundred replays

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RunnerError("cannot open output file '" + path.string() + "'");
    return out;
}

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

double median_of(std::vector<double> xs) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

/// Fills the oracle columns of a row from the simulator bundle.
void annotate_row(MethodRunRow& row, const SimBundle* sim) {
    if (sim == nullptr) return;
    row.base_time = sim->landscape->base_time(row.winner);
    row.gap_pct = (row.base_time - sim->optimum.base_time) / sim->optimum.base_time * 100.0;
    row.cov_pct = replay_variability(*sim->model, row.winner, kReplayRepeats).cov * 100.0;
}

/// Wraps non-tournament results in the common report shape so one trace
/// writer serves every method.
TournamentReport synthesize_report(std::uint64_t winner_linear, Configuration winner,
                                   std::vector<GameResult> games, std::string flag) {
    TournamentReport report;
    report.winner_linear = winner_linear;
    report.winner = std::move(winner);
    report.games = std::move(games);
    for (const GameResult& g : report.games) report.ledger.add(g);
    report.flags.push_back(std::move(flag));
    return report;
}

json method_run_json(const MethodRunRow& row) {
    return json{{"type", "method_run"}, {"method", row.method},
                {"repeat", row.repeat},  {"seed", row.seed},
                {"winner", row.winner},  {"base_time", row.base_time},
                {"gap_pct", row.gap_pct}, {"cov_pct", row.cov_pct},
                {"core_time", row.core_time}, {"games", row.games}};
}

const char* kMetricsHeader = "method,repeat,seed,winner,base_time,gap_pct,cov_pct,core_time,games";

void write_metrics_row(std::ostream& out, const MethodRunRow& row) {
    auto cell = [](double v) { return std::isnan(v) ? std::string() : csv_number(v); };
    out << csv_escape(row.method) << ',' << row.repeat << ',' << row.seed << ',' << row.winner
        << ',' << cell(row.base_time) << ',' << cell(row.gap_pct) << ',' << cell(row.cov_pct)
        << ',' << csv_number(row.core_time) << ',' << row.games << '\n';
}

/// Per-method aggregate over repeats: the comparison table's row.
json aggregate_json(const std::string& label, const std::vector<MethodRunRow>& rows) {
    std::vector<double> gaps, covs, costs;
    std::map<std::uint64_t, int> winners;
    for (const MethodRunRow& row : rows) {
        if (!std::isnan(row.gap_pct)) gaps.push_back(row.gap_pct);
        if (!std::isnan(row.cov_pct)) covs.push_back(row.cov_pct);
        costs.push_back(row.core_time);
        winners[row.winner] += 1;
    }
    int modal_count = 0;
    std::uint64_t modal_winner = 0;
    for (const auto& [winner, count] : winners) {
        if (count > modal_count) {
            modal_count = count;
            modal_winner = winner;
        }
    }
    return json{{"label", label},
                {"runs", rows.size()},
                {"mean_gap_pct", mean_of(gaps)},
                {"median_gap_pct", median_of(gaps)},
                {"mean_cov_pct", mean_of(covs)},
                {"mean_core_time", mean_of(costs)},
                {"distinct_winners", winners.size()},
                {"modal_winner", modal_winner},
                {"modal_count", modal_count}};
}

void write_aggregate_csv(std::ostream& out, const std::vector<json>& aggregates) {
    out << "label,runs,mean_gap_pct,median_gap_pct,mean_cov_pct,mean_core_time,"
           "distinct_winners,modal_winner,modal_count\n";
    auto cell = [](const json& v) {
        if (v.is_null()) return std::string();
        if (v.is_number_float()) {
            const double x = v.get<double>();
            return std::isnan(x) ? std::string() : csv_number(x);
        }
        return v.dump();
    };
    for (const json& a : aggregates) {
        out << csv_escape(a.at("label").get<std::string>()) << ',' << a.at("runs") << ','
            << cell(a.at("mean_gap_pct")) << ',' << cell(a.at("median_gap_pct")) << ','
            << cell(a.at("mean_cov_pct")) << ',' << cell(a.at("mean_core_time")) << ','
            << a.at("distinct_winners") << ',' << a.at("modal_winner") << ','
            << a.at("modal_count") << '\n';
    }
}

void write_config_echo(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    std::ofstream out = open_out(dir / "config.json");
    out << cfg.to_json().dump(2) << '\n';
}

std::filesystem::path prepare_dir(const std::string& out_dir) {
    std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw RunnerError("cannot create output directory '" + out_dir + "'");
    return dir;
}

void require_simulator(const ExperimentConfig& cfg, const std::string& command) {
    if (cfg.runner_type != "simulator")
        throw ConfigError("'" + command + "' needs the simulator runner (oracle required); "
                          "field 'runner.type' is '" + cfg.runner_type + "'");
}

} // namespace

SimBundle make_sim_bundle(const SearchSpace& space, const ExperimentConfig& cfg) {
    SimBundle bundle;
    bundle.landscape = std::make_shared<Landscape>(space, cfg.sim.landscape);
    bundle.model = std::make_shared<InterferenceModel>(bundle.landscape, cfg.sim.noise,
                                                       cfg.sim.coloc_factor, cfg.seed);
    bundle.runner = std::make_unique<SimRunner>(bundle.model, cfg.sim.capacity, cfg.sim.ticks);
    bundle.optimum = true_optimum(*bundle.landscape);
    return bundle;
}

std::uint64_t repeat_seed(std::uint64_t base, int repeat) {
    if (repeat == 0) return base;
    return rng::derive(base, {kTagRepeat, static_cast<std::uint64_t>(repeat)});
}

MethodOutcome run_method(const ExperimentConfig& cfg, const SearchSpace& space,
                         const SimBundle* sim, Runner& runner, const std::string& method,
                         int repeat, double core_time_cap) {
    const std::uint64_t seed = repeat_seed(cfg.seed, repeat);
    MethodOutcome outcome;
    outcome.row.method = method;
    outcome.row.repeat = repeat;
    outcome.row.seed = seed;

    if (method == "tournament") {
        TournamentConfig tc = cfg.tournament;
        tc.seed = seed;
        outcome.trace = run_tournament(space, tc, runner);
    } else if (method == "noise_unaware" || method == "exhaustive_noise") {
        std::uint64_t budget = space.size();
        if (method == "noise_unaware" && cfg.baseline.sample_budget > 0)
            budget = cfg.baseline.sample_budget;
        const double cap =
            method == "exhaustive_noise" ? std::numeric_limits<double>::infinity() : core_time_cap;
        NoiseUnawareReport nu = tune_noise_unaware(space, budget, runner, seed, cap);
        outcome.trace = synthesize_report(nu.winner_linear, std::move(nu.winner),
                                          std::move(nu.games), "method:" + method);
    } else if (method == "integrated_random" || method == "integrated_hillclimb") {
        std::unique_ptr<BaselineTuner> tuner =
            method == "integrated_random"
                ? baseline_random(cfg.baseline.n_sub, cfg.baseline.budget, seed)
                : baseline_hillclimb(cfg.baseline.n_sub, cfg.baseline.budget, seed);
        TournamentConfig inner = cfg.tournament;
        inner.seed = seed;
        IntegratedReport ir = tune_with_baseline(space, cfg.baseline.n_sub, *tuner, inner, runner);
        outcome.trace = synthesize_report(ir.winner_linear, std::move(ir.winner),
                                          std::move(ir.games), "method:" + method);
        outcome.evaluations = std::move(ir.evaluations);
    } else {
        throw ConfigError("unknown method '" + method +
                          "' (valid: tournament, noise_unaware, exhaustive_noise, "
                          "integrated_random, integrated_hillclimb)");
    }

    outcome.row.winner = outcome.trace.winner_linear;
    outcome.row.core_time = outcome.trace.ledger.total;
    outcome.row.games = outcome.trace.ledger.games;
    annotate_row(outcome.row, sim);
    return outcome;
}

const std::vector<std::string>& known_variants() {
    static const std::vector<std::string> kVariants{
        "no-regional",       "one-win-regional", "no-swiss",
        "no-global",         "no-double-elimination", "no-barrage",
        "no-consistency-score", "no-exec-score", "all-2-player-games",
        "no-early-termination"};
    return kVariants;
}

TournamentConfig apply_variant(TournamentConfig base, const std::string& name) {
    if (name == "full") return base;
    if (name == "no-regional") base.variants.no_regional = true;
    else if (name == "one-win-regional") base.region_consecutive_win_threshold = 1;
    else if (name == "no-swiss") base.variants.no_swiss = true;
    else if (name == "no-global") base.variants.no_global = true;
    else if (name == "no-double-elimination") base.variants.no_double_elimination = true;
    else if (name == "no-barrage") base.variants.no_barrage = true;
    else if (name == "no-consistency-score") base.variants.no_consistency_score = true;
    else if (name == "no-exec-score") base.variants.no_exec_score = true;
    else if (name == "all-2-player-games") base.variants.all_two_player = true;
    else if (name == "no-early-termination") base.early_termination = false;
    else {
        std::string valid = "full";
        for (const std::string& v : known_variants()) valid += ", " + v;
        throw ConfigError("unknown variant '" + name + "' (valid: " + valid + ")");
    }
    return base;
}

CommandArtifacts cmd_run(const ExperimentConfig& cfg, const std::string& out_dir) {
    const std::filesystem::path dir = prepare_dir(out_dir);
    const SearchSpace space = cfg.make_space();

    SimBundle sim;
    std::unique_ptr<ProcRunner> proc;
    Runner* runner = nullptr;
    const SimBundle* sim_ptr = nullptr;
    if (cfg.runner_type == "simulator") {
        sim = make_sim_bundle(space, cfg);
        runner = sim.runner.get();
        sim_ptr = &sim;
    } else {
        proc = std::make_unique<ProcRunner>(cfg.proc.workload, space, cfg.proc.capacity,
                                            cfg.proc.poll_ms, cfg.proc.pin_cpus);
        runner = proc.get();
    }

    write_config_echo(cfg, dir);
    std::ofstream trace = open_out(dir / "trace.jsonl");
    std::ofstream metrics = open_out(dir / "metrics.csv");
    metrics << kMetricsHeader << '\n';

    CommandArtifacts artifacts;
    artifacts.out_dir = dir.string();
    for (int repeat = 0; repeat < cfg.repeats; ++repeat) {
        MethodOutcome outcome = run_method(cfg, space, sim_ptr, *runner, cfg.method, repeat);
        trace << json{{"type", "run"}, {"repeat", repeat}, {"seed", outcome.row.seed},
                      {"method", cfg.method}}
                     .dump()
              << '\n';
        for (const GameResult& g : outcome.trace.games) trace << game_json(g).dump() << '\n';
        for (const BracketSnapshot& b : outcome.trace.brackets)
            trace << bracket_json(b).dump() << '\n';
        for (const RegionalSummary& r : outcome.trace.regional)
            trace << regional_json(r).dump() << '\n';
        for (const SubspaceEvaluation& e : outcome.evaluations)
            trace << json{{"type", "evaluation"}, {"subspace", e.subspace},
                          {"winner", e.winner.linear_index},
                          {"score", e.representative_score}, {"cost", e.cost},
                          {"cached", e.cached}}
                         .dump()
                  << '\n';
        trace << summary_json(outcome.trace).dump() << '\n';
        write_metrics_row(metrics, outcome.row);
        artifacts.rows.push_back(outcome.row);
    }

    json rows = json::array();
    for (const MethodRunRow& row : artifacts.rows) rows.push_back(method_run_json(row));
    artifacts.summary = json{{"command", "run"},
                             {"method", cfg.method},
                             {"repeats", cfg.repeats},
                             {"rows", std::move(rows)},
                             {"aggregate", aggregate_json(cfg.method, artifacts.rows)}};
    if (sim_ptr != nullptr) {
        artifacts.summary["oracle"] = {{"winner", sim.optimum.linear},
                                       {"base_time", sim.optimum.base_time}};
    }
    std::ofstream summary = open_out(dir / "summary.json");
    summary << artifacts.summary.dump(2) << '\n';
    return artifacts;
}

CommandArtifacts cmd_compare(const ExperimentConfig& cfg, std::vector<std::string> methods,
                             const std::string& out_dir) {
    require_simulator(cfg, "compare");
    if (methods.empty())
        methods = {"tournament", "noise_unaware", "exhaustive_noise", "integrated_random"};
    if (std::find(methods.begin(), methods.end(), "tournament") == methods.end())
        methods.insert(methods.begin(), "tournament");  // budgets are matched against it

    const std::filesystem::path dir = prepare_dir(out_dir);
    const SearchSpace space = cfg.make_space();
    SimBundle sim = make_sim_bundle(space, cfg);

    write_config_echo(cfg, dir);
    std::ofstream records = open_out(dir / "records.jsonl");
    std::ofstream metrics = open_out(dir / "metrics.csv");
    metrics << kMetricsHeader << '\n';

    CommandArtifacts artifacts;
    artifacts.out_dir = dir.string();
    std::map<std::string, std::vector<MethodRunRow>> by_method;
    for (int repeat = 0; repeat < cfg.repeats; ++repeat) {
        double tournament_cost = std::numeric_limits<double>::infinity();
        for (const std::string& method : methods) {
            // The noise-unaware sampler gets exactly the tournament's
            // core-time budget: same spend, different strategy.
            const double cap = method == "noise_unaware" ? tournament_cost
                                                         : std::numeric_limits<double>::infinity();
            MethodOutcome outcome =
                run_method(cfg, space, &sim, *sim.runner, method, repeat, cap);
            if (method == "tournament") tournament_cost = outcome.row.core_time;
            records << method_run_json(outcome.row).dump() << '\n';
            write_metrics_row(metrics, outcome.row);
            by_method[method].push_back(outcome.row);
            artifacts.rows.push_back(std::move(outcome.row));
        }
    }

    std::vector<json> aggregates;
    for (const std::string& method : methods) aggregates.push_back(aggregate_json(method, by_method[method]));
    std::ofstream agg_csv = open_out(dir / "summary.csv");
    write_aggregate_csv(agg_csv, aggregates);

    artifacts.summary = json{{"command", "compare"},
                             {"repeats", cfg.repeats},
                             {"methods", methods},
                             {"oracle",
                              {{"winner", sim.optimum.linear},
                               {"base_time", sim.optimum.base_time}}},
                             {"aggregates", aggregates}};
    std::ofstream summary = open_out(dir / "summary.json");
    summary << artifacts.summary.dump(2) << '\n';
    return artifacts;
}

CommandArtifacts cmd_ablate(const ExperimentConfig& cfg, std::vector<std::string> variants,
                            const std::string& out_dir) {
    require_simulator(cfg, "ablate");
    for (const std::string& v : variants) apply_variant(cfg.tournament, v);  // validate names
    variants.insert(variants.begin(), "full");

    const std::filesystem::path dir = prepare_dir(out_dir);
    const SearchSpace space = cfg.make_space();
    SimBundle sim = make_sim_bundle(space, cfg);

    write_config_echo(cfg, dir);
    std::ofstream records = open_out(dir / "records.jsonl");
    std::ofstream metrics = open_out(dir / "metrics.csv");
    metrics << kMetricsHeader << '\n';

    CommandArtifacts artifacts;
    artifacts.out_dir = dir.string();
    std::map<std::string, std::vector<MethodRunRow>> by_variant;
    for (int repeat = 0; repeat < cfg.repeats; ++repeat) {
        for (const std::string& variant : variants) {
            ExperimentConfig vcfg = cfg;
            vcfg.tournament = apply_variant(cfg.tournament, variant);
            // all-2-player-games also shrinks P for sizing formulas
            MethodOutcome outcome =
                run_method(vcfg, space, &sim, *sim.runner, "tournament", repeat);
            outcome.row.method = variant;
            records << method_run_json(outcome.row).dump() << '\n';
            write_metrics_row(metrics, outcome.row);
            by_variant[variant].push_back(outcome.row);
            artifacts.rows.push_back(std::move(outcome.row));
        }
    }

    std::vector<json> aggregates;
    for (const std::string& variant : variants)
        aggregates.push_back(aggregate_json(variant, by_variant[variant]));
    // Deltas versus the full design, the ablation table's whole point.
    const json& full = aggregates.front();
    for (json& a : aggregates) {
        const double full_cost = full.at("mean_core_time").get<double>();
        const double full_gap = full.at("mean_gap_pct").get<double>();
        a["core_time_delta_pct"] =
            (a.at("mean_core_time").get<double>() - full_cost) / full_cost * 100.0;
        a["gap_delta_pct"] = a.at("mean_gap_pct").get<double>() - full_gap;
    }
    std::ofstream agg_csv = open_out(dir / "summary.csv");
    write_aggregate_csv(agg_csv, aggregates);

    artifacts.summary = json{{"command", "ablate"},
                             {"repeats", cfg.repeats},
                             {"variants", variants},
                             {"oracle",
                              {{"winner", sim.optimum.linear},
                               {"base_time", sim.optimum.base_time}}},
                             {"aggregates", aggregates}};
    std::ofstream summary = open_out(dir / "summary.json");
    summary << artifacts.summary.dump(2) << '\n';
    return artifacts;
}

} // namespace arena
