#pragma once

// Experiment configuration: JSON file -> validated ExperimentConfig.
// Every problem found is reported with the dotted path of the offending field.

#include "cqm/evolve.hpp"
#include "cqm/states.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cqm::app {

enum class Scenario { run1d, run2d, wigner_compare, takabayasi };

const std::vector<std::pair<Scenario, std::string>>& scenario_names();
std::string to_string(Scenario s);

struct GridConfig {
    long n = 1024;
    std::optional<double> x_min;  // centred on 0 when absent
    double dx = 0.1;

    SpatialGrid1D<double> build() const;
};

struct Tolerances {
    double ks = 0.01;
    double ks_2d = 0.015;
    double takabayasi_l1 = 1.5;
    double wigner_l1 = 1e-6;
    double wigner_min = -0.05;
    double flagged_fraction = 1e-3;
};

struct ExperimentConfig {
    Scenario scenario = Scenario::run1d;
    StateSpec state = Gaussian{};
    Potential potential = FreePotential{};
    GridConfig grid;
    std::optional<GridConfig> grid2;  // run2d only; defaults to `grid`
    double mass = 1.0;
    int epsilon = 1;
    double dt = 0.0025;
    double t_final = 2.0;
    long snapshot_stride = 4;
    double checkpoint_every = 0.25;
    long ensemble_size = 100000;
    std::uint64_t seed = 1;
    long trajectories_written = 1000;  // rows of trajectories.csv / samples2d.csv
    std::filesystem::path output_dir = "cqm-output";
    Tolerances tolerances;
    nlohmann::json source;  // the parsed document, echoed into the summary
};

/// All field-level problems of one config, one message per line.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Environment variable that, when set, replaces the configured output directory.
inline constexpr const char* kOutputDirEnv = "CQM_OUTPUT_DIR";

}  // namespace cqm::app
