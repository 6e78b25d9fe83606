#pragma once

#include "arena/engine.hpp"
#include "arena/space.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace arena {

/// Describes how to launch one player process and observe its progress.
/// Templates may reference `{name}` for any search-space parameter (its
/// chosen value string is substituted), plus the built-ins `{player}`
/// (game slot index) and `{game}` (game uid) for per-player uniqueness.
struct WorkloadTemplate {
    /// Shell command line, run via `/bin/sh -c`.
    std::string command;
    /// Working directory for the process; must exist.
    std::string workdir = ".";
    /// Path of the progress file the workload overwrites. Protocol: UTF-8,
    /// single line, either a decimal fraction in [0,1] or the token `done`,
    /// atomically replaced on update.
    std::string progress_path;
    /// Human-readable declaration of what 100% progress means (requests
    /// served, frames encoded, ...). Recorded in reports, not interpreted.
    std::string total_work = "workload-defined";
    /// Wall-clock ceiling per game; players still running past it fail.
    double timeout_s = 300.0;
    /// How long the progress file may stay absent after launch before the
    /// player is declared failed.
    double grace_s = 5.0;

    /// Rejects unresolved placeholders and duplicate parameter references.
    /// Errors here are configuration errors, caught at load time.
    void validate(const SearchSpace& space) const;
};

/// Runner that co-locates real local processes and reads their progress
/// via the file protocol. One live game at a time; capacity is the number
/// of CPU slots the experiment grants to one game.
class ProcRunner final : public Runner {
public:
    ProcRunner(WorkloadTemplate tpl, const SearchSpace& space, std::size_t capacity = 8,
               int poll_ms = 250, bool pin_cpus = false);

    std::size_t capacity() const override { return capacity_; }
    bool supports_concurrent_sessions() const override { return false; }
    std::unique_ptr<GameSession> start(const std::vector<const Configuration*>& configs,
                                       const GameContext& ctx) override;

    const WorkloadTemplate& workload() const { return tpl_; }

private:
    WorkloadTemplate tpl_;
    const SearchSpace& space_;
    std::size_t capacity_;
    int poll_ms_;
    bool pin_cpus_;
};

/// Expands `{...}` placeholders in a workload template string for one
/// player. Exposed for template validation and tests.
std::string instantiate_template(const std::string& tpl, const SearchSpace& space,
                                 const Configuration& config, std::size_t player_slot,
                                 std::uint64_t game_uid);

} // namespace arena
