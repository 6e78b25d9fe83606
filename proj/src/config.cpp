#include "arena/config.hpp"

#include "arena/error.hpp"

#include <fstream>
#include <set>

namespace arena {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key))
        throw ConfigError("missing required field '" + join(path, key) + "'");
    return obj.at(key);
}

template <typename T>
T as(const json& value, const std::string& path) {
    try {
        return value.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("field '" + path + "' has the wrong type");
    }
}

template <typename T>
T get_or(const json& obj, const std::string& key, const std::string& path, T fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    return as<T>(obj.at(key), join(path, key));
}

std::vector<ParameterDef> parse_params(const json& space, const std::string& path) {
    const json& list = require(space, "params", path);
    if (!list.is_array() || list.empty())
        throw ConfigError("field '" + join(path, "params") + "' must be a non-empty array");
    std::vector<ParameterDef> params;
    std::set<std::string> names;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string ppath = join(path, "params[" + std::to_string(i) + "]");
        const json& p = list.at(i);
        ParameterDef def;
        def.name = as<std::string>(require(p, "name", ppath), join(ppath, "name"));
        if (!names.insert(def.name).second)
            throw ConfigError("duplicate parameter name '" + def.name + "' in " + path);
        if (p.contains("values")) {
            def.values = as<std::vector<std::string>>(p.at("values"), join(ppath, "values"));
        } else if (p.contains("count")) {
            const auto count = as<std::uint64_t>(p.at("count"), join(ppath, "count"));
            if (count == 0) throw ConfigError("field '" + join(ppath, "count") + "' must be > 0");
            def.values.reserve(count);
            for (std::uint64_t v = 0; v < count; ++v) def.values.push_back(std::to_string(v));
        } else {
            throw ConfigError("field '" + ppath + "' needs either 'values' or 'count'");
        }
        if (def.values.empty())
            throw ConfigError("field '" + join(ppath, "values") + "' must be non-empty");
        params.push_back(std::move(def));
    }
    return params;
}

LandscapeSpec parse_landscape(const json& obj, const std::string& path) {
    LandscapeSpec spec = LandscapeSpec::random_smooth_default(1);
    const std::string kind = get_or<std::string>(obj, "kind", path, "random_smooth");
    try {
        spec.kind = landscape_kind_from(kind);
    } catch (const Error&) {
        throw ConfigError("field '" + join(path, "kind") + "' has unknown landscape kind '" +
                          kind + "'");
    }
    if (spec.kind == LandscapeKind::separable_quadratic) spec.roughness = 0.0;
    spec.seed = get_or<std::uint64_t>(obj, "seed", path, spec.seed);
    spec.t_min = get_or<double>(obj, "t_min", path, spec.t_min);
    spec.t_max = get_or<double>(obj, "t_max", path, spec.t_max);
    spec.roughness = get_or<double>(obj, "roughness", path, spec.roughness);
    spec.shape_exponent = get_or<double>(obj, "shape_exponent", path, spec.shape_exponent);
    spec.sensitivity_min = get_or<double>(obj, "sensitivity_min", path, spec.sensitivity_min);
    spec.sensitivity_max = get_or<double>(obj, "sensitivity_max", path, spec.sensitivity_max);
    spec.robust_fraction = get_or<double>(obj, "robust_fraction", path, spec.robust_fraction);
    spec.robust_base = get_or<double>(obj, "robust_base", path, spec.robust_base);
    spec.robust_slope = get_or<double>(obj, "robust_slope", path, spec.robust_slope);
    spec.robust_jitter = get_or<double>(obj, "robust_jitter", path, spec.robust_jitter);
    if (obj.contains("table_file")) {
        const auto file = as<std::string>(obj.at("table_file"), join(path, "table_file"));
        std::ifstream in(file);
        if (!in) throw ConfigError("cannot open landscape table file '" + file + "'");
        spec.kind = LandscapeKind::table;
        spec.table = import_table(in);
    }
    return spec;
}

json landscape_json(const LandscapeSpec& spec) {
    json out;
    out["kind"] = landscape_kind_name(spec.kind);
    out["seed"] = spec.seed;
    out["t_min"] = spec.t_min;
    out["t_max"] = spec.t_max;
    out["roughness"] = spec.roughness;
    out["shape_exponent"] = spec.shape_exponent;
    out["sensitivity_min"] = spec.sensitivity_min;
    out["sensitivity_max"] = spec.sensitivity_max;
    out["robust_fraction"] = spec.robust_fraction;
    out["robust_base"] = spec.robust_base;
    out["robust_slope"] = spec.robust_slope;
    out["robust_jitter"] = spec.robust_jitter;
    return out;
}

} // namespace

ExperimentConfig ExperimentConfig::from_json(const json& root) {
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");
    ExperimentConfig cfg;

    cfg.version = as<int>(require(root, "version", ""), "version");
    if (cfg.version != kConfigVersion)
        throw ConfigError("field 'version' must be " + std::to_string(kConfigVersion) +
                          " (got " + std::to_string(cfg.version) + ")");
    cfg.seed = get_or<std::uint64_t>(root, "seed", "", cfg.seed);
    cfg.repeats = get_or<int>(root, "repeats", "", cfg.repeats);
    cfg.output_dir = get_or<std::string>(root, "output_dir", "", cfg.output_dir);
    cfg.parallelism = get_or<int>(root, "parallelism", "", cfg.parallelism);

    cfg.params = parse_params(require(root, "space", ""), "space");

    const json& runner = require(root, "runner", "");
    cfg.runner_type = as<std::string>(require(runner, "type", "runner"), "runner.type");
    if (cfg.runner_type == "simulator") {
        const json sim = runner.contains("simulator") ? runner.at("simulator") : json::object();
        const std::string spath = "runner.simulator";
        if (sim.contains("landscape"))
            cfg.sim.landscape = parse_landscape(sim.at("landscape"), join(spath, "landscape"));
        if (sim.contains("noise")) {
            const json& noise = sim.at("noise");
            const std::string npath = join(spath, "noise");
            cfg.sim.noise.shared_scale =
                get_or<double>(noise, "shared_scale", npath, cfg.sim.noise.shared_scale);
            cfg.sim.noise.shared_sigma =
                get_or<double>(noise, "shared_sigma", npath, cfg.sim.noise.shared_sigma);
            cfg.sim.noise.shared_cap =
                get_or<double>(noise, "shared_cap", npath, cfg.sim.noise.shared_cap);
            cfg.sim.noise.idiosyncratic_sigma = get_or<double>(
                noise, "idiosyncratic_sigma", npath, cfg.sim.noise.idiosyncratic_sigma);
        }
        cfg.sim.coloc_factor = get_or<double>(sim, "coloc_factor", spath, cfg.sim.coloc_factor);
        cfg.sim.ticks = get_or<int>(sim, "ticks", spath, cfg.sim.ticks);
        cfg.sim.capacity = get_or<std::size_t>(sim, "capacity", spath, cfg.sim.capacity);
    } else if (cfg.runner_type == "process") {
        const json& proc = require(runner, "process", "runner");
        const std::string ppath = "runner.process";
        cfg.proc.workload.command =
            as<std::string>(require(proc, "command", ppath), join(ppath, "command"));
        cfg.proc.workload.progress_path =
            as<std::string>(require(proc, "progress_path", ppath), join(ppath, "progress_path"));
        cfg.proc.workload.workdir =
            get_or<std::string>(proc, "workdir", ppath, cfg.proc.workload.workdir);
        cfg.proc.workload.total_work =
            get_or<std::string>(proc, "total_work", ppath, cfg.proc.workload.total_work);
        cfg.proc.workload.timeout_s =
            get_or<double>(proc, "timeout_s", ppath, cfg.proc.workload.timeout_s);
        cfg.proc.workload.grace_s =
            get_or<double>(proc, "grace_s", ppath, cfg.proc.workload.grace_s);
        cfg.proc.capacity = get_or<std::size_t>(proc, "capacity", ppath, cfg.proc.capacity);
        cfg.proc.poll_ms = get_or<int>(proc, "poll_ms", ppath, cfg.proc.poll_ms);
        cfg.proc.pin_cpus = get_or<bool>(proc, "pin_cpus", ppath, cfg.proc.pin_cpus);
    } else {
        throw ConfigError("field 'runner.type' must be 'simulator' or 'process' (got '" +
                          cfg.runner_type + "')");
    }

    if (root.contains("tournament")) {
        const json& t = root.at("tournament");
        const std::string tpath = "tournament";
        TournamentConfig& tc = cfg.tournament;
        tc.P = get_or<int>(t, "P", tpath, tc.P);
        tc.n_r = get_or<std::uint64_t>(t, "n_r", tpath, tc.n_r);
        tc.d = get_or<double>(t, "d", tpath, tc.d);
        tc.min_work_fraction = get_or<double>(t, "min_work_fraction", tpath, tc.min_work_fraction);
        tc.main_bracket_target =
            get_or<int>(t, "main_bracket_target", tpath, tc.main_bracket_target);
        tc.region_consecutive_win_threshold =
            get_or<int>(t, "region_consecutive_win_threshold", tpath, tc.region_consecutive_win_threshold);
        tc.max_regional_rounds =
            get_or<int>(t, "max_regional_rounds", tpath, tc.max_regional_rounds);
        tc.early_termination = get_or<bool>(t, "early_termination", tpath, tc.early_termination);
    }
    cfg.tournament.seed = cfg.seed;
    cfg.tournament.parallelism = cfg.parallelism;

    cfg.method = get_or<std::string>(root, "method", "", cfg.method);
    if (root.contains("baseline")) {
        const json& b = root.at("baseline");
        const std::string bpath = "baseline";
        cfg.baseline.kind = get_or<std::string>(b, "kind", bpath, cfg.baseline.kind);
        cfg.baseline.n_sub = get_or<std::uint64_t>(b, "n_sub", bpath, cfg.baseline.n_sub);
        cfg.baseline.budget = get_or<std::uint64_t>(b, "budget", bpath, cfg.baseline.budget);
        cfg.baseline.sample_budget =
            get_or<std::uint64_t>(b, "sample_budget", bpath, cfg.baseline.sample_budget);
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json root;
    try {
        in >> root;
    } catch (const json::exception& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return from_json(root);
}

void ExperimentConfig::validate() const {
    if (repeats < 1) throw ConfigError("field 'repeats' must be at least 1");
    if (parallelism < 1) throw ConfigError("field 'parallelism' must be at least 1");
    static const std::set<std::string> kMethods{"tournament", "noise_unaware", "exhaustive_noise",
                                               "integrated_random", "integrated_hillclimb"};
    if (!kMethods.contains(method)) {
        std::string valid;
        for (const std::string& m : kMethods) valid += (valid.empty() ? "" : ", ") + m;
        throw ConfigError("field 'method' has unknown value '" + method + "' (valid: " + valid +
                          ")");
    }
    if (baseline.kind != "random" && baseline.kind != "hillclimb")
        throw ConfigError("field 'baseline.kind' must be 'random' or 'hillclimb' (got '" +
                          baseline.kind + "')");
    try {
        tournament.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("field 'tournament' invalid: ") + e.what());
    }
}

nlohmann::json ExperimentConfig::to_json() const {
    json out;
    out["version"] = version;
    out["seed"] = seed;
    out["repeats"] = repeats;
    out["output_dir"] = output_dir;
    out["parallelism"] = parallelism;
    json params_json = json::array();
    for (const ParameterDef& p : params)
        params_json.push_back({{"name", p.name}, {"values", p.values}});
    out["space"] = {{"params", params_json}};
    out["runner"] = {{"type", runner_type}};
    if (runner_type == "simulator") {
        out["runner"]["simulator"] = {
            {"landscape", landscape_json(sim.landscape)},
            {"noise",
             {{"shared_scale", sim.noise.shared_scale},
              {"shared_sigma", sim.noise.shared_sigma},
              {"shared_cap", sim.noise.shared_cap},
              {"idiosyncratic_sigma", sim.noise.idiosyncratic_sigma}}},
            {"coloc_factor", sim.coloc_factor},
            {"ticks", sim.ticks},
            {"capacity", sim.capacity}};
    } else {
        out["runner"]["process"] = {{"command", proc.workload.command},
                                    {"workdir", proc.workload.workdir},
                                    {"progress_path", proc.workload.progress_path},
                                    {"total_work", proc.workload.total_work},
                                    {"timeout_s", proc.workload.timeout_s},
                                    {"grace_s", proc.workload.grace_s},
                                    {"capacity", proc.capacity},
                                    {"poll_ms", proc.poll_ms},
                                    {"pin_cpus", proc.pin_cpus}};
    }
    out["tournament"] = {{"P", tournament.P},
                         {"n_r", tournament.n_r},
                         {"d", tournament.d},
                         {"min_work_fraction", tournament.min_work_fraction},
                         {"main_bracket_target", tournament.main_bracket_target},
                         {"region_consecutive_win_threshold", tournament.region_consecutive_win_threshold},
                         {"max_regional_rounds", tournament.max_regional_rounds},
                         {"early_termination", tournament.early_termination}};
    out["method"] = method;
    out["baseline"] = {{"kind", baseline.kind},
                       {"n_sub", baseline.n_sub},
                       {"budget", baseline.budget},
                       {"sample_budget", baseline.sample_budget}};
    return out;
}

} // namespace arena
