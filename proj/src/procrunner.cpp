#include "arena/procrunner.hpp"

#include "arena/error.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <thread>

#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>
#ifdef __linux__
#include <sched.h>
#endif

namespace arena {

namespace {

/// All `{...}` placeholder names appearing in a template string.
std::vector<std::string> placeholder_names(const std::string& tpl) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < tpl.size(); ++i) {
        if (tpl[i] != '{') continue;
        const std::size_t end = tpl.find('}', i + 1);
        if (end == std::string::npos)
            throw InvalidConfiguration("unterminated '{' in workload template: " + tpl);
        names.push_back(tpl.substr(i + 1, end - i - 1));
        i = end;
    }
    return names;
}

bool parse_progress_line(const std::string& line, double& out) {
    std::string trimmed;
    for (char c : line)
        if (!std::isspace(static_cast<unsigned char>(c))) trimmed.push_back(c);
    if (trimmed.empty()) return false;
    if (trimmed == "done") {
        out = 1.0;
        return true;
    }
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(trimmed.c_str(), &end);
    if (errno != 0 || end == nullptr || *end != '\0') return false;
    if (!(value >= 0.0 && value <= 1.0)) return false;
    out = value;
    return true;
}

class ProcSession final : public GameSession {
public:
    ProcSession(const WorkloadTemplate& tpl, const SearchSpace& space,
                const std::vector<const Configuration*>& configs, const GameContext& ctx,
                int poll_ms, bool pin_cpus)
        : timeout_s_(tpl.timeout_s), grace_s_(tpl.grace_s), poll_ms_(poll_ms) {
        players_.resize(configs.size());
        for (std::size_t i = 0; i < configs.size(); ++i) {
            PlayerProc& p = players_[i];
            p.command = instantiate_template(tpl.command, space, *configs[i], i, ctx.uid);
            p.workdir = instantiate_template(tpl.workdir, space, *configs[i], i, ctx.uid);
            p.progress_path =
                instantiate_template(tpl.progress_path, space, *configs[i], i, ctx.uid);
        }
        start_ = std::chrono::steady_clock::now();
        for (std::size_t i = 0; i < players_.size(); ++i) spawn(i, pin_cpus);
    }

    ~ProcSession() override { stop(); }

    bool advance() override {
        std::this_thread::sleep_for(std::chrono::milliseconds(poll_ms_));
        const double now = elapsed();
        bool any_live = false;
        for (PlayerProc& p : players_) {
            if (p.failed || p.fraction >= 1.0) continue;
            reap_if_exited(p);
            poll_progress(p, now);
            if (!p.failed && p.fraction < 1.0) {
                if (p.exited) {
                    // Ran to completion without honoring the protocol (no
                    // `done`, no 1.0): the observation is unusable.
                    warn(p, "exited without completing its progress file");
                    p.failed = true;
                } else if (now > timeout_s_) {
                    warn(p, "timed out");
                    terminate(p);
                    p.failed = true;
                } else {
                    any_live = true;
                }
            }
        }
        return any_live;
    }

    double elapsed() const override {
        const auto dt = std::chrono::steady_clock::now() - start_;
        return std::chrono::duration<double>(dt).count();
    }

    double work_fraction(std::size_t player) const override {
        return players_.at(player).fraction;
    }

    bool failed(std::size_t player) const override { return players_.at(player).failed; }

    void stop() override {
        for (PlayerProc& p : players_)
            if (p.pid > 0 && !p.exited) terminate(p);
    }

private:
    struct PlayerProc {
        std::string command;
        std::string workdir;
        std::string progress_path;
        pid_t pid = -1;
        bool exited = false;
        int exit_status = 0;
        bool failed = false;
        bool file_seen = false;
        bool warned = false;
        double fraction = 0.0;
    };

    void spawn(std::size_t slot, bool pin_cpus) {
        PlayerProc& p = players_[slot];
        std::remove(p.progress_path.c_str());  // stale file from a prior game
        const pid_t pid = fork();
        if (pid < 0) {
            warn(p, std::string("fork failed: ") + std::strerror(errno));
            p.failed = true;
            return;
        }
        if (pid == 0) {
            // Child: own process group so the whole workload tree can be
            // signalled; exec failure surfaces as exit 127.
            setpgid(0, 0);
#ifdef __linux__
            if (pin_cpus) {
                cpu_set_t set;
                CPU_ZERO(&set);
                const long cores = sysconf(_SC_NPROCESSORS_ONLN);
                CPU_SET(static_cast<int>(slot % static_cast<std::size_t>(std::max(1L, cores))),
                        &set);
                sched_setaffinity(0, sizeof(set), &set);
            }
#else
            (void)pin_cpus;
#endif
            if (!p.workdir.empty() && chdir(p.workdir.c_str()) != 0) _exit(126);
            execl("/bin/sh", "sh", "-c", p.command.c_str(), static_cast<char*>(nullptr));
            _exit(127);
        }
        p.pid = pid;
        setpgid(pid, pid);  // parent side too, closing the startup race
    }

    void reap_if_exited(PlayerProc& p) {
        if (p.pid <= 0 || p.exited) return;
        int status = 0;
        const pid_t r = waitpid(p.pid, &status, WNOHANG);
        if (r == p.pid) {
            p.exited = true;
            p.exit_status = status;
            // Final read: the workload may have written `done` just before
            // exiting, between our polls.
            poll_progress(p, elapsed());
            if (WIFEXITED(status) && WEXITSTATUS(status) != 0) {
                warn(p, "exited with status " + std::to_string(WEXITSTATUS(status)));
                p.failed = true;
            } else if (WIFSIGNALED(status)) {
                warn(p, std::string("killed by signal ") + std::to_string(WTERMSIG(status)));
                p.failed = true;
            }
        }
    }

    void poll_progress(PlayerProc& p, double now) {
        std::ifstream in(p.progress_path);
        if (!in) {
            if (!p.file_seen && now > grace_s_ && !p.exited) {
                warn(p, "progress file missing after grace period");
                terminate(p);
                p.failed = true;
            }
            return;  // keep last known value
        }
        p.file_seen = true;
        std::string line;
        std::getline(in, line);
        double value = 0.0;
        if (parse_progress_line(line, value)) {
            p.fraction = std::max(p.fraction, value);  // monotonicity clamp
        } else {
            warn(p, "malformed progress value '" + line + "', keeping last");
        }
    }

    /// SIGTERM, short grace, SIGKILL, then a blocking reap: no orphans.
    void terminate(PlayerProc& p) {
        if (p.pid <= 0 || p.exited) return;
        kill(-p.pid, SIGTERM);
        for (int i = 0; i < 20; ++i) {
            int status = 0;
            if (waitpid(p.pid, &status, WNOHANG) == p.pid) {
                p.exited = true;
                p.exit_status = status;
                return;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(25));
        }
        kill(-p.pid, SIGKILL);
        int status = 0;
        waitpid(p.pid, &status, 0);
        p.exited = true;
        p.exit_status = status;
    }

    void warn(PlayerProc& p, const std::string& message) {
        if (p.warned) return;
        p.warned = true;
        std::fprintf(stderr, "warning: workload '%s': %s\n", p.command.c_str(),
                     message.c_str());
    }

    std::vector<PlayerProc> players_;
    std::chrono::steady_clock::time_point start_;
    double timeout_s_;
    double grace_s_;
    int poll_ms_;
};

} // namespace

std::string instantiate_template(const std::string& tpl, const SearchSpace& space,
                                 const Configuration& config, std::size_t player_slot,
                                 std::uint64_t game_uid) {
    std::string out;
    out.reserve(tpl.size());
    for (std::size_t i = 0; i < tpl.size(); ++i) {
        if (tpl[i] != '{') {
            out.push_back(tpl[i]);
            continue;
        }
        const std::size_t end = tpl.find('}', i + 1);
        if (end == std::string::npos)
            throw InvalidConfiguration("unterminated '{' in workload template: " + tpl);
        const std::string name = tpl.substr(i + 1, end - i - 1);
        i = end;
        if (name == "player") {
            out += std::to_string(player_slot);
            continue;
        }
        if (name == "game") {
            out += std::to_string(game_uid);
            continue;
        }
        bool found = false;
        for (std::size_t d = 0; d < space.dimension(); ++d) {
            if (space.param(d).name != name) continue;
            out += space.param(d).values.at(config.indices.at(d));
            found = true;
            break;
        }
        if (!found)
            throw InvalidConfiguration("workload template references unknown parameter '" +
                                       name + "'");
    }
    return out;
}

void WorkloadTemplate::validate(const SearchSpace& space) const {
    if (command.empty()) throw InvalidConfiguration("workload command template is empty");
    if (progress_path.empty())
        throw InvalidConfiguration("workload progress-file template is empty");
    if (!(timeout_s > 0.0)) throw InvalidConfiguration("workload timeout must be positive");
    if (!(grace_s > 0.0)) throw InvalidConfiguration("workload grace period must be positive");

    auto known = [&](const std::string& name) {
        if (name == "player" || name == "game") return true;
        for (std::size_t d = 0; d < space.dimension(); ++d)
            if (space.param(d).name == name) return true;
        return false;
    };
    for (const std::string* tpl : {&command, &workdir, &progress_path}) {
        for (const std::string& name : placeholder_names(*tpl))
            if (!known(name))
                throw InvalidConfiguration("workload template references unknown parameter '" +
                                           name + "'");
    }
    std::vector<std::string> in_command = placeholder_names(command);
    std::sort(in_command.begin(), in_command.end());
    for (std::size_t i = 1; i < in_command.size(); ++i)
        if (in_command[i] == in_command[i - 1] && in_command[i] != "player" &&
            in_command[i] != "game")
            throw InvalidConfiguration("parameter '" + in_command[i] +
                                       "' appears more than once in the command template");
}

ProcRunner::ProcRunner(WorkloadTemplate tpl, const SearchSpace& space, std::size_t capacity,
                       int poll_ms, bool pin_cpus)
    : tpl_(std::move(tpl)), space_(space), capacity_(capacity), poll_ms_(poll_ms),
      pin_cpus_(pin_cpus) {
    if (capacity_ == 0) throw InvalidConfiguration("process runner capacity must be positive");
    if (poll_ms_ <= 0) throw InvalidConfiguration("poll interval must be positive");
    tpl_.validate(space_);
}

std::unique_ptr<GameSession> ProcRunner::start(const std::vector<const Configuration*>& configs,
                                               const GameContext& ctx) {
    if (configs.empty()) throw RunnerError("process runner: empty game roster");
    if (configs.size() > capacity_)
        throw RunnerError("process runner: roster exceeds CPU slot capacity");
    return std::make_unique<ProcSession>(tpl_, space_, configs, ctx, poll_ms_, pin_cpus_);
}

} // namespace arena
