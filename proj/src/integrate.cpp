#include "arena/integrate.hpp"

#include "arena/error.hpp"
#include "arena/rng.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace arena {

namespace {

constexpr std::uint64_t kTagSample = 0x5A4Du;
constexpr std::uint64_t kTagInnerSeed = 0x1777u;
constexpr std::uint64_t kTagDraw = 0xD347u;

/// Uniform draw from [0, n) without std::uniform_int_distribution (whose
/// stream is implementation-defined).
std::uint64_t draw_index(rng::Engine& eng, std::uint64_t n) {
    const auto i = static_cast<std::uint64_t>(rng::u01(eng) * static_cast<double>(n));
    return std::min(i, n - 1);
}

class RandomBaseline final : public BaselineTuner {
public:
    RandomBaseline(std::uint64_t n_sub, std::uint64_t budget, std::uint64_t seed)
        : n_sub_(n_sub), budget_(budget), eng_(rng::make_engine(seed, {kTagDraw, n_sub})) {}

    std::uint64_t propose(const std::vector<Observation>&) override {
        ++issued_;
        // Sparse Fisher–Yates: pick position `drawn_` from the not-yet-drawn
        // tail without materializing the whole permutation.
        if (drawn_ >= n_sub_) return draw_index(eng_, n_sub_);  // replacement after exhaustion
        const std::uint64_t j = drawn_ + draw_index(eng_, n_sub_ - drawn_);
        const std::uint64_t picked = slot(j);
        remap_[j] = slot(drawn_);
        remap_[drawn_] = picked;
        ++drawn_;
        return picked;
    }
    bool done() const override { return issued_ >= budget_; }
    std::uint64_t budget() const override { return budget_; }

private:
    std::uint64_t slot(std::uint64_t i) const {
        const auto it = remap_.find(i);
        return it == remap_.end() ? i : it->second;
    }

    std::uint64_t n_sub_;
    std::uint64_t budget_;
    std::uint64_t issued_ = 0;
    std::uint64_t drawn_ = 0;
    std::unordered_map<std::uint64_t, std::uint64_t> remap_;
    rng::Engine eng_;
};

class HillclimbBaseline final : public BaselineTuner {
public:
    HillclimbBaseline(std::uint64_t n_sub, std::uint64_t budget, std::uint64_t seed)
        : n_sub_(n_sub), budget_(budget), eng_(rng::make_engine(seed, {kTagDraw, n_sub, 1})) {}

    std::uint64_t propose(const std::vector<Observation>& history) override {
        ++issued_;
        std::unordered_set<std::uint64_t> visited;
        for (const Observation& o : history) visited.insert(o.subspace);
        if (history.empty() || visited.size() >= n_sub_) return restart(visited);

        std::size_t best = 0;
        for (std::size_t i = 1; i < history.size(); ++i)
            if (history[i].score < history[best].score) best = i;
        const std::uint64_t center = history[best].subspace;
        std::vector<std::uint64_t> moves;
        if (center > 0 && !visited.count(center - 1)) moves.push_back(center - 1);
        if (center + 1 < n_sub_ && !visited.count(center + 1)) moves.push_back(center + 1);
        if (moves.empty()) return restart(visited);  // local optimum: random restart
        if (moves.size() == 1) return moves.front();
        return moves[draw_index(eng_, moves.size())];
    }
    bool done() const override { return issued_ >= budget_; }
    std::uint64_t budget() const override { return budget_; }

private:
    std::uint64_t restart(const std::unordered_set<std::uint64_t>& visited) {
        if (visited.size() >= n_sub_) return draw_index(eng_, n_sub_);
        for (int attempt = 0; attempt < 64; ++attempt) {
            const std::uint64_t id = draw_index(eng_, n_sub_);
            if (!visited.count(id)) return id;
        }
        for (std::uint64_t id = 0; id < n_sub_; ++id)
            if (!visited.count(id)) return id;
        return 0;
    }

    std::uint64_t n_sub_;
    std::uint64_t budget_;
    std::uint64_t issued_ = 0;
    rng::Engine eng_;
};

} // namespace

std::unique_ptr<BaselineTuner> baseline_random(std::uint64_t n_sub, std::uint64_t budget,
                                               std::uint64_t seed) {
    if (n_sub == 0) throw InvalidArgument("baseline needs at least one subspace");
    if (budget == 0) throw InvalidArgument("baseline budget must be at least 1");
    return std::make_unique<RandomBaseline>(n_sub, budget, seed);
}

std::unique_ptr<BaselineTuner> baseline_hillclimb(std::uint64_t n_sub, std::uint64_t budget,
                                                  std::uint64_t seed) {
    if (n_sub == 0) throw InvalidArgument("baseline needs at least one subspace");
    if (budget == 0) throw InvalidArgument("baseline budget must be at least 1");
    return std::make_unique<HillclimbBaseline>(n_sub, budget, seed);
}

GameResult play_solo_sample(const Configuration& config, Runner& runner, std::uint64_t seed,
                            std::uint64_t stream, std::uint64_t k) {
    Player player;
    player.config = config;
    GameSpec spec;
    spec.players = {&player};
    spec.early_termination = false;
    GameContext ctx;
    ctx.phase = Phase::sample;
    ctx.round = static_cast<int>(k);
    ctx.unit = stream;
    ctx.uid = rng::derive(seed, {kTagSample, stream, k});
    return play_game(spec, runner, ctx);
}

IntegratedReport tune_with_baseline(const SearchSpace& space, std::uint64_t n_sub,
                                    BaselineTuner& baseline, const TournamentConfig& inner_cfg,
                                    Runner& runner) {
    if (n_sub < 2) throw InvalidArgument("integrated tuning needs at least 2 subspaces");
    if (n_sub > space.size())
        throw InvalidArgument("more subspaces than configurations in the space");
    if (baseline.budget() < 1) throw InvalidArgument("baseline budget must be at least 1");
    inner_cfg.validate();

    const RegionPartition subspaces = partition_subspaces(space, n_sub);
    IntegratedReport report;
    std::vector<Observation> history;
    std::unordered_map<std::uint64_t, SubspaceEvaluation> cache;

    while (!baseline.done()) {
        const std::uint64_t id = baseline.propose(history);
        if (id >= n_sub)
            throw InvalidArgument("baseline proposed an out-of-range subspace id");
        ++report.proposals;

        auto hit = cache.find(id);
        if (hit != cache.end()) {
            SubspaceEvaluation repeat = hit->second;
            repeat.cached = true;
            repeat.cost = 0.0;  // cache contract: repeats are free
            history.push_back({id, repeat.representative_score});
            report.evaluations.push_back(std::move(repeat));
            ++report.cache_hits;
            continue;
        }

        const IndexRange range = subspaces.region_range(id);
        TournamentConfig cfg = inner_cfg;
        cfg.seed = rng::derive(inner_cfg.seed, {kTagInnerSeed, id});
        cfg.n_r = std::max<std::uint64_t>(
            2, inner_cfg.n_r * range.size() / std::max<std::uint64_t>(space.size(), 1));

        TournamentReport inner = run_tournament(space, range, cfg, runner);

        SubspaceEvaluation eval;
        eval.subspace = id;
        eval.winner = inner.winner;
        if (inner.final_game) {
            eval.representative_score = inner.final_game->elapsed;
        } else {
            // Degenerate bracket (e.g. single-config subspace): buy one solo
            // full-run observation so the outer tuner still gets a time.
            GameResult sample = play_solo_sample(inner.winner, runner, cfg.seed, id, 0);
            eval.representative_score = sample.elapsed;
            inner.ledger.add(sample);
            inner.games.push_back(std::move(sample));
        }
        eval.cost = inner.ledger.total;

        report.ledger.merge(inner.ledger);
        for (GameResult& g : inner.games) report.games.push_back(std::move(g));
        history.push_back({id, eval.representative_score});
        cache.emplace(id, eval);
        report.evaluations.push_back(std::move(eval));
    }

    if (report.evaluations.empty()) throw InvalidArgument("baseline proposed no subspaces");
    const SubspaceEvaluation* best = &report.evaluations.front();
    for (const SubspaceEvaluation& e : report.evaluations)
        if (e.representative_score < best->representative_score ||
            (e.representative_score == best->representative_score &&
             e.winner.linear_index < best->winner.linear_index))
            best = &e;
    report.winner = best->winner;
    report.winner_linear = best->winner.linear_index;
    return report;
}

NoiseUnawareReport tune_noise_unaware(const SearchSpace& space, std::uint64_t budget,
                                      Runner& runner, std::uint64_t seed,
                                      double core_time_cap) {
    if (budget < 1) throw InvalidArgument("sampling budget must be at least 1");
    if (!(core_time_cap > 0.0)) throw InvalidArgument("core-time cap must be positive");

    NoiseUnawareReport report;
    rng::Engine eng = rng::make_engine(seed, {kTagDraw, 2});
    const std::uint64_t n = space.size();
    std::unordered_map<std::uint64_t, std::uint64_t> remap;
    auto slot = [&](std::uint64_t i) {
        const auto it = remap.find(i);
        return it == remap.end() ? i : it->second;
    };

    budget = std::min(budget, n);
    for (std::uint64_t k = 0; k < budget; ++k) {
        const std::uint64_t j = k + draw_index(eng, n - k);
        const std::uint64_t linear = slot(j);
        remap[j] = slot(k);
        remap[k] = linear;

        GameResult sample = play_solo_sample(space.delinearize(linear), runner, seed, 0, k);
        report.cost += sample.cost;
        report.samples.push_back({linear, sample.elapsed});
        report.games.push_back(std::move(sample));
        if (report.cost >= core_time_cap) break;
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < report.samples.size(); ++i) {
        if (report.samples[i].score < report.samples[best].score ||
            (report.samples[i].score == report.samples[best].score &&
             report.samples[i].subspace < report.samples[best].subspace))
            best = i;
    }
    report.winner_linear = report.samples[best].subspace;
    report.winner = space.delinearize(report.winner_linear);
    return report;
}

} // namespace arena
