#pragma once

#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "flowlab/json_io.hpp"
#include "flowlab/report.hpp"

namespace flowlab {

// One analysis job. options holds the op/kind selector and numeric flags (horizon, seed,
// threshold_diverge, lp_limit, eps_trunc, kappa, omega, depth, budget, ...).
struct CommandInput {
    std::string command;  // metric | tail | pipeline | bernoulli | suspend
    Json options = Json::object();
    std::vector<std::filesystem::path> inputs;
};

Report execute(const CommandInput& in);

// Batch file: [[job]] tables with command, inputs, optional out, and option keys. Paths are
// relative to the batch file. Each job with an out directory gets its own report there.
Report run_batch(const std::filesystem::path& jobs_file, const std::string& timestamp);

// 0 ok, 1 input error, 2 analytic bound violated or self-check failed.
int exit_code_for(const std::exception& e);

}  // namespace flowlab
