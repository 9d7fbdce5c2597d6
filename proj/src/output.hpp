#pragma once

// CSV tables and the JSON run summary.

#include "cqm/stats.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace cqm::app {

inline constexpr const char* kVersion = "0.1.0";

/// Row-at-a-time CSV writer. Numbers use the shortest round-trip form, so
/// identical values always produce identical bytes.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    CsvWriter& operator<<(double v);
    CsvWriter& operator<<(long v);
    void end_row();
    void close();

private:
    void separator();

    std::ofstream out_;
    std::filesystem::path path_;
    std::size_t columns_;
    std::size_t in_row_ = 0;
};

/// Writes equal-length columns as one table.
void write_columns(const std::filesystem::path& path, const std::vector<std::string>& header,
                   const std::vector<const RealVector<double>*>& columns);

/// Empirical density of `samples` on the cells centred on `axis` (uniform spacing h).
RealVector<double> histogram(const std::vector<double>& samples, const RealVector<double>& axis, double h);

struct Check {
    std::string name;
    double value;
    double limit;
    std::string relation;  // "<", "<=", ">" or "=="
    bool pass;
};

Check check_below(std::string name, double value, double limit);
Check check_at_most(std::string name, double value, double limit);
Check check_above(std::string name, double value, double limit);

struct RunResult {
    std::vector<ComparisonReport> reports;
    std::vector<Check> checks;
    std::vector<std::string> files;
    nlohmann::json details = nlohmann::json::object();

    bool passed() const;
};

nlohmann::json to_json(const ComparisonReport& r);
nlohmann::json to_json(const Check& c);

void write_summary(const std::filesystem::path& path, const std::string& scenario, const nlohmann::json& config,
                   const nlohmann::json& tolerances, const RunResult& result, double elapsed_seconds);

}  // namespace cqm::app
