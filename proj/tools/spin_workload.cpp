// Toy workload for process-runner integration tests: burns CPU (or sleeps)
// in fixed units and reports progress through the file protocol — UTF-8,
// single line, decimal fraction or `done`, atomically replaced.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <string>
#include <thread>

namespace {

volatile double sink = 0.0;  // defeats optimization of the spin loop

void burn_microseconds(long long us) {
    const auto end = std::chrono::steady_clock::now() + std::chrono::microseconds(us);
    while (std::chrono::steady_clock::now() < end) {
        double x = sink;
        for (int i = 0; i < 256; ++i) x += static_cast<double>(i) * 1e-9;
        sink = x;
    }
}

bool write_progress(const std::string& path, const std::string& value) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) return false;
        out << value << '\n';
    }
    return std::rename(tmp.c_str(), path.c_str()) == 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CPU-spin toy workload with file-protocol progress reporting"};
    std::string progress_path;
    long long units = 20;
    long long unit_us = 10000;
    std::string mode = "spin";
    long long fail_at = -1;
    bool no_done = false;

    app.add_option("--progress", progress_path, "Progress file path")->required();
    app.add_option("--units", units, "Work units (progress steps)")->check(CLI::PositiveNumber);
    app.add_option("--unit-us", unit_us, "Microseconds per unit")->check(CLI::PositiveNumber);
    app.add_option("--mode", mode, "spin (burn CPU) or sleep")
        ->check(CLI::IsMember({"spin", "sleep"}));
    app.add_option("--fail-at", fail_at, "Exit 1 after this many units (test hook)");
    app.add_flag("--no-done", no_done, "Never write the final done token (test hook)");

    CLI11_PARSE(app, argc, argv);

    write_progress(progress_path, "0");
    for (long long k = 1; k <= units; ++k) {
        if (mode == "spin")
            burn_microseconds(unit_us);
        else
            std::this_thread::sleep_for(std::chrono::microseconds(unit_us));
        if (fail_at >= 0 && k >= fail_at) return 1;
        if (k == units) {
            // With --no-done the workload finishes its work but never
            // honors the protocol: the file stays below 1.0 forever.
            if (!no_done) write_progress(progress_path, "done");
        } else {
            write_progress(progress_path,
                           std::to_string(static_cast<double>(k) / static_cast<double>(units)));
        }
    }
    return 0;
}
