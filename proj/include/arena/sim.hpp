#pragma once

#include "arena/engine.hpp"
#include "arena/rng.hpp"
#include "arena/space.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

namespace arena {

enum class LandscapeKind : std::uint8_t { separable_quadratic, random_smooth, table };

std::string landscape_kind_name(LandscapeKind kind);
LandscapeKind landscape_kind_from(const std::string& name);

/// Declarative recipe for a synthetic base-time landscape plus the
/// sensitivity rule that decides how fragile each configuration is under
/// shared interference. Fast configurations default to fragile; a seeded
/// fraction of "robust" configurations stays insensitive at every speed,
/// which is what gives the tournament something worth finding.
struct LandscapeSpec {
    LandscapeKind kind = LandscapeKind::random_smooth;
    std::uint64_t seed = 1;
    double t_min = 100.0;  // fastest attainable base time
    double t_max = 300.0;  // slowest attainable base time
    /// Blend weight of per-configuration hash jitter on top of the smooth
    /// per-dimension profiles (random_smooth only).
    double roughness = 0.3;
    /// Concave exponent applied to the normalized value; < 1 stretches the
    /// neighborhood of the optimum so near-optimal configurations are
    /// clearly separated.
    double shape_exponent = 1.2;
    /// Sensitivity rule: non-robust configs interpolate affinely from
    /// sensitivity_max (fastest) down to sensitivity_min (slowest).
    double sensitivity_min = 0.4;
    double sensitivity_max = 1.6;
    /// Robust configs are chosen by seeded hash with this probability and
    /// get sensitivity robust_base + robust_slope * normalized value, plus a
    /// per-configuration idiosyncratic offset in [-robust_jitter, +robust_jitter]:
    /// susceptibility is only loosely tied to speed, so equally fast candidates
    /// can differ materially in how quiet they are.
    /// Even robust configurations keep a material sensitivity floor: on a
    /// shared machine no configuration measures noise-free.
    double robust_fraction = 0.45;
    double robust_base = 0.15;
    double robust_slope = 0.8;
    double robust_jitter = 0.15;
    /// Explicit base times (kind == table only); size must equal space size.
    std::vector<double> table;

    static LandscapeSpec random_smooth_default(std::uint64_t seed);
    static LandscapeSpec separable_quadratic_default(std::uint64_t seed);
    static LandscapeSpec table_from(std::vector<double> base_times);
};

/// A landscape bound to a concrete search space: every configuration gets a
/// positive noise-free base time and an interference sensitivity. Immutable
/// after construction and safe to share across threads.
class Landscape {
public:
    Landscape(const SearchSpace& space, LandscapeSpec spec);

    const SearchSpace& space() const { return *space_; }
    const LandscapeSpec& spec() const { return spec_; }

    /// Noise-free execution time of a configuration (by linear index).
    double base_time(std::uint64_t linear) const;
    /// Position of the configuration's base time in [0, 1]; 0 = fastest.
    double normalized_value(std::uint64_t linear) const;
    /// Susceptibility to the shared interference level; ≥ 0.
    double sensitivity(std::uint64_t linear) const;
    /// Whether the seeded robustness rule marks this configuration robust.
    bool robust(std::uint64_t linear) const;

    /// For separable quadratic landscapes, the analytic optimum indices.
    const std::vector<std::uint32_t>& quadratic_optimum() const;

    /// Writes "linear_index,base_time" CSV rows (with header).
    void export_table(std::ostream& out) const;

private:
    const SearchSpace* space_;
    LandscapeSpec spec_;
    std::vector<std::vector<double>> profiles_;  // random_smooth per-dim curves
    std::vector<double> weights_;                // random_smooth dim weights
    double weight_sum_ = 0.0;
    std::vector<std::uint32_t> quad_optimum_;    // separable_quadratic
    double table_min_ = 0.0;                     // table normalization
    double table_max_ = 0.0;
};

/// Parses a table exported by Landscape::export_table back into base times.
std::vector<double> import_table(std::istream& in);

/// Per-game stochastic interference. The shared level I_g is drawn once per
/// game and seen identically by every co-located player; the idiosyncratic
/// term is per player.
struct NoiseSpec {
    double shared_scale = 0.6;        // multiplies the log-normal draw; 0 = off
    double shared_sigma = 1.6;        // log-normal sigma of the shared level
    double shared_cap = 4.0;          // truncation of the shared level
    /// Per-player measurement noise; the irreducible scatter any single
    /// observation carries, shared machine or not.
    double idiosyncratic_sigma = 0.10;

    static NoiseSpec none() { return NoiseSpec{0.0, 0.0, 0.0, 0.0}; }
};

/// effective time = base_time × max(0.5, 1 + sensitivity·I_g
///                  + coloc_factor·(group−1) + ε), the simulator's whole
/// story: faster configs exist, but some of them wilt under interference.
class InterferenceModel {
public:
    InterferenceModel(std::shared_ptr<const Landscape> landscape, NoiseSpec noise,
                      double coloc_factor, std::uint64_t seed);

    const Landscape& landscape() const { return *landscape_; }
    const NoiseSpec& noise() const { return noise_; }
    double coloc_factor() const { return coloc_factor_; }
    std::uint64_t seed() const { return seed_; }

    /// Draws the shared interference level for one game.
    double draw_shared(rng::Engine& eng) const;
    /// Draws one player's idiosyncratic multiplier deviation.
    double draw_idiosyncratic(rng::Engine& eng) const;
    /// The deterministic formula, noise levels supplied by the caller.
    double effective_time(std::uint64_t linear, std::size_t group_size, double shared,
                          double idiosyncratic) const;
    /// Effective times for a whole co-located group: one shared draw, one
    /// idiosyncratic draw per player, all derived from (model seed, game uid).
    std::vector<double> effective_times(const std::vector<std::uint64_t>& linears,
                                        std::uint64_t game_uid) const;

private:
    std::shared_ptr<const Landscape> landscape_;
    NoiseSpec noise_;
    double coloc_factor_ = 0.0;
    std::uint64_t seed_ = 0;
};

/// RunnerContract implementation backed by the interference model. Progress
/// is linear in time; sessions poll `ticks` instants per a leader's full run.
class SimRunner final : public Runner {
public:
    SimRunner(std::shared_ptr<const InterferenceModel> model, std::size_t capacity = 64,
              int ticks = 100);

    const InterferenceModel& model() const { return *model_; }
    int ticks() const { return ticks_; }

    std::size_t capacity() const override { return capacity_; }
    bool supports_concurrent_sessions() const override { return true; }
    std::unique_ptr<GameSession> start(const std::vector<const Configuration*>& configs,
                                       const GameContext& ctx) override;

private:
    std::shared_ptr<const InterferenceModel> model_;
    std::size_t capacity_;
    int ticks_;
};

/// Interference-free argmin over the whole space; evaluation-only oracle.
/// Refuses spaces larger than `cap` (exhaustive scan would be unreasonable).
struct Optimum {
    std::uint64_t linear = 0;
    double base_time = 0.0;
};
Optimum true_optimum(const Landscape& landscape, std::uint64_t cap = 10'000'000);

/// Mean effective time and coefficient of variation of one configuration
/// across `repeats` independent games at the given co-location level.
struct Variability {
    double mean = 0.0;
    double cov = 0.0;
};
Variability replay_variability(const InterferenceModel& model, std::uint64_t linear,
                               int repeats, std::size_t coloc = 1,
                               std::uint64_t stream = 0);

} // namespace arena
