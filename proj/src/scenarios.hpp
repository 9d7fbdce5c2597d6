#pragma once

#include "config.hpp"
#include "output.hpp"

#include <filesystem>

namespace cqm::app {

/// Runs the configured scenario, writing its tables into `out_dir` (which must exist).
/// Throws NumericalError when the propagation aborts.
RunResult run_scenario(const ExperimentConfig& config, const std::filesystem::path& out_dir);

}  // namespace cqm::app
