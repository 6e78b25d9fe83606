#include "arena/sim.hpp"

#include "arena/error.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

namespace arena {

namespace {

constexpr std::uint64_t kTagProfile = 0xD1u;
constexpr std::uint64_t kTagWeights = 0xD2u;
constexpr std::uint64_t kTagJitter = 0xD3u;
constexpr std::uint64_t kTagRobust = 0xB1u;
constexpr std::uint64_t kTagRobustJitter = 0xB2u;
constexpr std::uint64_t kTagOptimum = 0x0Fu;
constexpr std::uint64_t kTagGame = 0xA11CEu;
constexpr std::uint64_t kTagReplay = 0x4E9Au;

using rng::normal01;
using rng::u01;

/// Uniform in [0, 1) derived from a single mixed hash value.
double hash01(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

void validate_spec(const LandscapeSpec& spec, const SearchSpace& space) {
    if (!(spec.t_min > 0.0)) throw InvalidConfiguration("landscape t_min must be positive");
    if (!(spec.t_max >= spec.t_min))
        throw InvalidConfiguration("landscape t_max must be at least t_min");
    if (spec.roughness < 0.0 || spec.roughness > 1.0)
        throw InvalidConfiguration("landscape roughness must lie in [0, 1]");
    if (!(spec.shape_exponent > 0.0))
        throw InvalidConfiguration("landscape shape_exponent must be positive");
    if (spec.sensitivity_min < 0.0 || spec.sensitivity_max < spec.sensitivity_min)
        throw InvalidConfiguration("sensitivity range must satisfy 0 <= min <= max");
    if (spec.robust_fraction < 0.0 || spec.robust_fraction > 1.0)
        throw InvalidConfiguration("robust_fraction must lie in [0, 1]");
    if (spec.robust_base < 0.0 || spec.robust_slope < 0.0 || spec.robust_jitter < 0.0)
        throw InvalidConfiguration("robust sensitivity parameters must be non-negative");
    if (spec.kind == LandscapeKind::table && spec.table.size() != space.size())
        throw InvalidConfiguration("landscape table has " + std::to_string(spec.table.size()) +
                                   " entries but the space has " + std::to_string(space.size()));
}

} // namespace

std::string landscape_kind_name(LandscapeKind kind) {
    switch (kind) {
    case LandscapeKind::separable_quadratic: return "separable_quadratic";
    case LandscapeKind::random_smooth: return "random_smooth";
    case LandscapeKind::table: return "table";
    }
    return "unknown";
}

LandscapeKind landscape_kind_from(const std::string& name) {
    if (name == "separable_quadratic") return LandscapeKind::separable_quadratic;
    if (name == "random_smooth") return LandscapeKind::random_smooth;
    if (name == "table") return LandscapeKind::table;
    throw InvalidConfiguration("unknown landscape kind: " + name);
}

LandscapeSpec LandscapeSpec::random_smooth_default(std::uint64_t seed) {
    LandscapeSpec spec;
    spec.kind = LandscapeKind::random_smooth;
    spec.seed = seed;
    return spec;
}

LandscapeSpec LandscapeSpec::separable_quadratic_default(std::uint64_t seed) {
    LandscapeSpec spec;
    spec.kind = LandscapeKind::separable_quadratic;
    spec.seed = seed;
    spec.roughness = 0.0;
    return spec;
}

LandscapeSpec LandscapeSpec::table_from(std::vector<double> base_times) {
    LandscapeSpec spec;
    spec.kind = LandscapeKind::table;
    spec.table = std::move(base_times);
    return spec;
}

Landscape::Landscape(const SearchSpace& space, LandscapeSpec spec)
    : space_(&space), spec_(std::move(spec)) {
    validate_spec(spec_, space);
    switch (spec_.kind) {
    case LandscapeKind::random_smooth: {
        profiles_.resize(space.dimension());
        for (std::size_t dim = 0; dim < space.dimension(); ++dim) {
            const std::size_t count = space.param(dim).values.size();
            rng::Engine eng = rng::make_engine(spec_.seed, {kTagProfile, dim});
            std::vector<double> curve(count);
            for (double& v : curve) v = u01(eng);
            // Two passes of a width-3 moving average leave gentle slopes.
            for (int pass = 0; pass < 2; ++pass) {
                std::vector<double> next(count);
                for (std::size_t j = 0; j < count; ++j) {
                    const double lo = curve[j > 0 ? j - 1 : j];
                    const double hi = curve[j + 1 < count ? j + 1 : j];
                    next[j] = (lo + curve[j] + hi) / 3.0;
                }
                curve = std::move(next);
            }
            const auto [mn, mx] = std::minmax_element(curve.begin(), curve.end());
            const double lo = *mn;  // copy before the loop overwrites *mn
            const double range = *mx - lo;
            for (double& v : curve) v = range > 0.0 ? (v - lo) / range : 0.5;
            profiles_[dim] = std::move(curve);
        }
        rng::Engine weng = rng::make_engine(spec_.seed, {kTagWeights});
        weights_.resize(space.dimension());
        for (double& w : weights_) w = 0.5 + u01(weng);
        weight_sum_ = 0.0;
        for (double w : weights_) weight_sum_ += w;
        break;
    }
    case LandscapeKind::separable_quadratic: {
        rng::Engine eng = rng::make_engine(spec_.seed, {kTagOptimum});
        quad_optimum_.resize(space.dimension());
        for (std::size_t dim = 0; dim < space.dimension(); ++dim) {
            const std::size_t count = space.param(dim).values.size();
            quad_optimum_[dim] = static_cast<std::uint32_t>(
                std::min<std::size_t>(count - 1, static_cast<std::size_t>(u01(eng) * count)));
        }
        break;
    }
    case LandscapeKind::table: {
        const auto [mn, mx] = std::minmax_element(spec_.table.begin(), spec_.table.end());
        if (!(*mn > 0.0)) throw InvalidConfiguration("landscape table contains a non-positive time");
        table_min_ = *mn;
        table_max_ = *mx;
        break;
    }
    }
}

double Landscape::normalized_value(std::uint64_t linear) const {
    if (linear >= space_->size())
        throw InvalidConfiguration("linear index " + std::to_string(linear) +
                                   " outside space of size " + std::to_string(space_->size()));
    switch (spec_.kind) {
    case LandscapeKind::random_smooth: {
        Configuration cfg = space_->delinearize(linear);
        double smooth = 0.0;
        for (std::size_t dim = 0; dim < space_->dimension(); ++dim)
            smooth += weights_[dim] * profiles_[dim][cfg.indices[dim]];
        smooth /= weight_sum_;
        const double jitter = hash01(rng::derive(spec_.seed, {kTagJitter, linear}));
        const double u = std::clamp((1.0 - spec_.roughness) * smooth + spec_.roughness * jitter,
                                    0.0, 1.0);
        return std::pow(u, spec_.shape_exponent);
    }
    case LandscapeKind::separable_quadratic: {
        Configuration cfg = space_->delinearize(linear);
        double u = 0.0;
        for (std::size_t dim = 0; dim < space_->dimension(); ++dim) {
            const double span = std::max<std::size_t>(1, space_->param(dim).values.size() - 1);
            const double d = (static_cast<double>(cfg.indices[dim]) -
                              static_cast<double>(quad_optimum_[dim])) /
                             span;
            u += d * d;
        }
        u /= static_cast<double>(space_->dimension());
        return std::pow(u, spec_.shape_exponent);
    }
    case LandscapeKind::table: {
        const double range = table_max_ - table_min_;
        return range > 0.0 ? (spec_.table[linear] - table_min_) / range : 0.0;
    }
    }
    return 0.0;
}

double Landscape::base_time(std::uint64_t linear) const {
    if (spec_.kind == LandscapeKind::table) {
        if (linear >= spec_.table.size())
            throw InvalidConfiguration("linear index " + std::to_string(linear) +
                                       " outside landscape table");
        return spec_.table[linear];
    }
    return spec_.t_min + (spec_.t_max - spec_.t_min) * normalized_value(linear);
}

double Landscape::sensitivity(std::uint64_t linear) const {
    const double norm = normalized_value(linear);
    if (robust(linear)) {
        const double offset =
            (2.0 * hash01(rng::derive(spec_.seed, {kTagRobustJitter, linear})) - 1.0) *
            spec_.robust_jitter;
        return std::max(0.0, spec_.robust_base + spec_.robust_slope * norm + offset);
    }
    return std::max(0.0, spec_.sensitivity_max -
                             (spec_.sensitivity_max - spec_.sensitivity_min) * norm);
}

bool Landscape::robust(std::uint64_t linear) const {
    return hash01(rng::derive(spec_.seed, {kTagRobust, linear})) < spec_.robust_fraction;
}

const std::vector<std::uint32_t>& Landscape::quadratic_optimum() const {
    if (spec_.kind != LandscapeKind::separable_quadratic)
        throw InvalidArgument("quadratic_optimum is defined only for separable_quadratic");
    return quad_optimum_;
}

void Landscape::export_table(std::ostream& out) const {
    out << "linear_index,base_time\n";
    for (std::uint64_t linear = 0; linear < space_->size(); ++linear)
        out << linear << ',' << base_time(linear) << '\n';
}

std::vector<double> import_table(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("linear_index,base_time", 0) != 0)
        throw InvalidConfiguration("landscape table must start with a linear_index,base_time header");
    std::vector<double> times;
    std::uint64_t expected = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw InvalidConfiguration("malformed landscape table row: " + line);
        std::uint64_t linear = 0;
        double value = 0.0;
        try {
            linear = std::stoull(line.substr(0, comma));
            value = std::stod(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw InvalidConfiguration("malformed landscape table row: " + line);
        }
        if (linear != expected)
            throw InvalidConfiguration("landscape table rows out of order at index " +
                                       std::to_string(linear));
        times.push_back(value);
        ++expected;
    }
    if (times.empty()) throw InvalidConfiguration("landscape table has no rows");
    return times;
}

InterferenceModel::InterferenceModel(std::shared_ptr<const Landscape> landscape, NoiseSpec noise,
                                     double coloc_factor, std::uint64_t seed)
    : landscape_(std::move(landscape)), noise_(noise), coloc_factor_(coloc_factor), seed_(seed) {
    if (!landscape_) throw InvalidArgument("interference model needs a landscape");
    if (noise_.shared_scale < 0.0 || noise_.shared_sigma < 0.0 || noise_.shared_cap < 0.0 ||
        noise_.idiosyncratic_sigma < 0.0)
        throw InvalidConfiguration("noise parameters must be non-negative");
    if (coloc_factor_ < 0.0) throw InvalidConfiguration("coloc_factor must be non-negative");
}

double InterferenceModel::draw_shared(rng::Engine& eng) const {
    if (noise_.shared_scale == 0.0) return 0.0;
    const double lognorm =
        noise_.shared_sigma > 0.0 ? std::exp(noise_.shared_sigma * normal01(eng)) : 1.0;
    return std::min(noise_.shared_cap, noise_.shared_scale * lognorm);
}

double InterferenceModel::draw_idiosyncratic(rng::Engine& eng) const {
    if (noise_.idiosyncratic_sigma == 0.0) return 0.0;
    return noise_.idiosyncratic_sigma * normal01(eng);
}

double InterferenceModel::effective_time(std::uint64_t linear, std::size_t group_size,
                                         double shared, double idiosyncratic) const {
    const double base = landscape_->base_time(linear);
    const double mult = 1.0 + landscape_->sensitivity(linear) * shared +
                        coloc_factor_ * static_cast<double>(group_size - 1) + idiosyncratic;
    return base * std::max(0.5, mult);
}

std::vector<double> InterferenceModel::effective_times(const std::vector<std::uint64_t>& linears,
                                                       std::uint64_t game_uid) const {
    rng::Engine eng = rng::make_engine(seed_, {kTagGame, game_uid});
    const double shared = draw_shared(eng);
    std::vector<double> times;
    times.reserve(linears.size());
    for (std::uint64_t linear : linears)
        times.push_back(effective_time(linear, linears.size(), shared, draw_idiosyncratic(eng)));
    return times;
}

namespace {

/// Linear-progress trajectories sampled at `ticks` instants per leader run.
/// Work fractions are computed as (tick/ticks) × (t_fast/t_eff_i), which
/// makes the leader hit exactly 1.0 and keeps scores exact time ratios.
class SimSession final : public GameSession {
public:
    SimSession(std::vector<double> t_eff, int ticks)
        : t_eff_(std::move(t_eff)), ticks_(ticks) {
        t_fast_ = *std::min_element(t_eff_.begin(), t_eff_.end());
        t_slow_ = *std::max_element(t_eff_.begin(), t_eff_.end());
    }

    bool advance() override {
        if (progress() * t_fast_ >= t_slow_) return false;  // everyone done
        ++tick_;
        return true;
    }

    double elapsed() const override { return progress() * t_fast_; }

    double work_fraction(std::size_t player) const override {
        return std::min(1.0, progress() * (t_fast_ / t_eff_[player]));
    }

    bool failed(std::size_t) const override { return false; }
    void stop() override {}

private:
    double progress() const { return static_cast<double>(tick_) / static_cast<double>(ticks_); }

    std::vector<double> t_eff_;
    int ticks_;
    int tick_ = 0;
    double t_fast_ = 0.0;
    double t_slow_ = 0.0;
};

} // namespace

SimRunner::SimRunner(std::shared_ptr<const InterferenceModel> model, std::size_t capacity,
                     int ticks)
    : model_(std::move(model)), capacity_(capacity), ticks_(ticks) {
    if (!model_) throw InvalidArgument("simulator runner needs an interference model");
    if (capacity_ == 0) throw InvalidArgument("runner capacity must be positive");
    if (ticks_ < 1) throw InvalidConfiguration("ticks per game must be at least 1");
}

std::unique_ptr<GameSession> SimRunner::start(const std::vector<const Configuration*>& configs,
                                              const GameContext& ctx) {
    std::vector<std::uint64_t> linears;
    linears.reserve(configs.size());
    for (const Configuration* cfg : configs) linears.push_back(cfg->linear_index);
    return std::make_unique<SimSession>(model_->effective_times(linears, ctx.uid), ticks_);
}

Optimum true_optimum(const Landscape& landscape, std::uint64_t cap) {
    const std::uint64_t size = landscape.space().size();
    if (size > cap)
        throw RefusedEnumeration("space of size " + std::to_string(size) +
                                 " exceeds the enumeration cap " + std::to_string(cap));
    Optimum best{0, landscape.base_time(0)};
    for (std::uint64_t linear = 1; linear < size; ++linear) {
        const double bt = landscape.base_time(linear);
        if (bt < best.base_time) best = Optimum{linear, bt};
    }
    return best;
}

Variability replay_variability(const InterferenceModel& model, std::uint64_t linear, int repeats,
                               std::size_t coloc, std::uint64_t stream) {
    if (repeats < 2) throw InvalidArgument("replay_variability needs at least 2 repeats");
    if (coloc < 1) throw InvalidArgument("co-location level must be at least 1");
    std::vector<std::uint64_t> linears(coloc, linear);
    double sum = 0.0;
    std::vector<double> observed(static_cast<std::size_t>(repeats));
    for (int rep = 0; rep < repeats; ++rep) {
        const std::uint64_t uid = rng::derive(model.seed(), {kTagReplay, stream, linear,
                                                             static_cast<std::uint64_t>(rep)});
        observed[static_cast<std::size_t>(rep)] = model.effective_times(linears, uid).front();
        sum += observed[static_cast<std::size_t>(rep)];
    }
    const double mean = sum / static_cast<double>(repeats);
    double sq = 0.0;
    for (double t : observed) sq += (t - mean) * (t - mean);
    const double stddev = std::sqrt(sq / static_cast<double>(repeats - 1));
    return Variability{mean, mean > 0.0 ? stddev / mean : 0.0};
}

} // namespace arena
