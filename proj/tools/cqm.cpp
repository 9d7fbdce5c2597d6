// cqm: run, validate and list experiment scenarios.
//
// Exit codes: 0 all checks passed, 1 some check failed, 2 invalid config or
// usage, 3 numerical abort, 4 I/O failure.

#include "config.hpp"
#include "output.hpp"
#include "scenarios.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>

namespace {

using namespace cqm::app;
namespace fs = std::filesystem;

enum Exit { ok = 0, checks_failed = 1, config_error = 2, numerical_error = 3, io_error = 4 };

int report_config_error(const ConfigError& e) {
    std::cerr << "invalid config:\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << '\n';
    return config_error;
}

int validate(const fs::path& path) {
    try {
        const auto c = load_config(path);
        std::cout << path.string() << ": ok (" << to_string(c.scenario) << ")\n";
        return ok;
    } catch (const ConfigError& e) {
        return report_config_error(e);
    }
}

int run(const fs::path& path) {
    ExperimentConfig c;
    try {
        c = load_config(path);
    } catch (const ConfigError& e) {
        return report_config_error(e);
    }
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) c.output_dir = env;

    std::error_code ec;
    fs::create_directories(c.output_dir, ec);
    if (ec) {
        std::cerr << "cannot create output directory " << c.output_dir << ": " << ec.message() << '\n';
        return io_error;
    }

    const auto start = std::chrono::steady_clock::now();
    RunResult result;
    try {
        result = run_scenario(c, c.output_dir);
    } catch (const cqm::NumericalError& e) {
        std::cerr << "numerical abort at step " << e.step() << ": " << e.what() << '\n';
        return numerical_error;
    } catch (const std::invalid_argument& e) {
        // a module precondition the config checks did not anticipate
        std::cerr << "invalid config: " << e.what() << '\n';
        return config_error;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return io_error;
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const nlohmann::json tol = {{"ks", c.tolerances.ks},
                                {"ks_2d", c.tolerances.ks_2d},
                                {"takabayasi_l1", c.tolerances.takabayasi_l1},
                                {"wigner_l1", c.tolerances.wigner_l1},
                                {"wigner_min", c.tolerances.wigner_min},
                                {"flagged_fraction", c.tolerances.flagged_fraction}};
    try {
        write_summary(c.output_dir / "summary.json", to_string(c.scenario), c.source, tol, result, elapsed);
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return io_error;
    }

    for (const auto& ch : result.checks)
        std::cout << (ch.pass ? "PASS " : "FAIL ") << ch.name << ": " << ch.value << ' ' << ch.relation << ' '
                  << ch.limit << '\n';
    std::cout << (result.passed() ? "all checks passed" : "some checks failed") << " (" << elapsed << " s), output in "
              << c.output_dir.string() << '\n';
    return result.passed() ? ok : checks_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal phase-space simulations: trajectories, momentum maps, Wigner comparison"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    std::string run_path, validate_path;
    auto* run_cmd = app.add_subcommand("run", "Run the scenario described by a config file");
    run_cmd->add_option("config", run_path, "JSON config file")->required();
    run_cmd->footer(std::string("Set ") + kOutputDirEnv + " to override the configured output directory.");
    auto* validate_cmd = app.add_subcommand("validate", "Check a config file without running it");
    validate_cmd->add_option("config", validate_path, "JSON config file")->required();
    auto* list_cmd = app.add_subcommand("list-scenarios", "Print the available scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return config_error;
    }

    if (*list_cmd) {
        for (const auto& [s, name] : scenario_names()) std::cout << name << '\n';
        return ok;
    }
    if (*validate_cmd) return validate(validate_path);
    if (*run_cmd) return run(run_path);
    return config_error;
}
