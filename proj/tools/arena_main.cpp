// Command-line front end: run / compare / ablate over a declarative
// experiment config. Exit codes: 0 success, 2 config error, 3 runner error.

#include "arena/config.hpp"
#include "arena/error.hpp"
#include "arena/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int parallelism = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("-c,--config", flags.config_path, "Experiment config file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("-o,--out", flags.out_dir,
                    "Output directory (default: config output_dir; env ARENA_OUT overrides the "
                    "config, the flag overrides both)");
    cmd->add_option("-s,--seed", flags.seed, "Override the config seed")
        ->each([&flags](const std::string&) { flags.seed_set = true; });
    cmd->add_option("-p,--parallelism", flags.parallelism,
                    "Worker threads for regions and global rounds (overrides config)");
}

arena::ExperimentConfig load(const CommonFlags& flags) {
    arena::ExperimentConfig cfg = arena::ExperimentConfig::load_file(flags.config_path);
    if (flags.seed_set) {
        cfg.seed = flags.seed;
        cfg.tournament.seed = flags.seed;
    }
    if (flags.parallelism > 0) {
        cfg.parallelism = flags.parallelism;
        cfg.tournament.parallelism = flags.parallelism;
    }
    return cfg;
}

std::string resolve_out_dir(const CommonFlags& flags, const arena::ExperimentConfig& cfg) {
    if (!flags.out_dir.empty()) return flags.out_dir;
    if (const char* env = std::getenv("ARENA_OUT"); env != nullptr && env[0] != '\0') return env;
    return cfg.output_dir;
}

void print_rows(const arena::CommandArtifacts& artifacts) {
    std::printf("%-24s %8s %12s %10s %10s %12s\n", "label", "repeat", "winner", "gap%", "cov%",
                "core_time");
    for (const arena::MethodRunRow& row : artifacts.rows) {
        std::printf("%-24s %8d %12llu %10.3f %10.3f %12.1f\n", row.method.c_str(), row.repeat,
                    static_cast<unsigned long long>(row.winner), row.gap_pct, row.cov_pct,
                    row.core_time);
    }
    std::printf("reports written to %s\n", artifacts.out_dir.c_str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tournament-based performance tuning for noisy environments"};
    app.require_subcommand(1);

    CommonFlags run_flags, compare_flags, ablate_flags;
    std::vector<std::string> methods, variants;

    CLI::App* run = app.add_subcommand("run", "Run the configured tuning pipeline");
    add_common(run, run_flags);

    CLI::App* compare =
        app.add_subcommand("compare", "Tournament vs baselines at matched core-time budgets");
    add_common(compare, compare_flags);
    compare->add_option("-m,--methods", methods,
                        "Methods to compare (default: tournament, noise_unaware, "
                        "exhaustive_noise, integrated_random)");

    CLI::App* ablate = app.add_subcommand("ablate", "Full design vs structural variants");
    add_common(ablate, ablate_flags);
    ablate->add_option("-v,--variants", variants,
                       "Variant names (default: every known variant)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage problems are config errors
    }

    try {
        if (run->parsed()) {
            arena::ExperimentConfig cfg = load(run_flags);
            print_rows(arena::cmd_run(cfg, resolve_out_dir(run_flags, cfg)));
        } else if (compare->parsed()) {
            arena::ExperimentConfig cfg = load(compare_flags);
            print_rows(arena::cmd_compare(cfg, methods, resolve_out_dir(compare_flags, cfg)));
        } else if (ablate->parsed()) {
            arena::ExperimentConfig cfg = load(ablate_flags);
            if (variants.empty()) variants = arena::known_variants();
            print_rows(arena::cmd_ablate(cfg, variants, resolve_out_dir(ablate_flags, cfg)));
        }
    } catch (const arena::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const arena::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
