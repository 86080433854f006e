#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qsweep/config.hpp"

namespace qsweep {

struct RunnerOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed; // overrides config seed
    int threads = 0;                   // 0 = library default
};

// 0 = success, 1 = validation error, 2 = runtime/verification failure
struct RunOutcome {
    int exit_code = 0;
    std::vector<std::string> files;
    std::string message;
};

RunOutcome run_profile(const RunnerOptions& opts);
RunOutcome run_trajectories(const RunnerOptions& opts);
RunOutcome run_sweep_a(const RunnerOptions& opts);
RunOutcome run_duality_table(const RunnerOptions& opts);
RunOutcome run_verify(const RunnerOptions& opts);

RunOutcome run_command(const std::string& command, const RunnerOptions& opts);

} // namespace qsweep
