#include "output.hpp"

#include <Eigen/Core>

#include <charconv>
#include <chrono>
#include <ctime>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace cqm::app {

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), path_(path), columns_(header.size()) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) {
        // names never need quoting unless they hold a separator or quote
        const bool quote = header[i].find_first_of(",\"\n") != std::string::npos;
        if (i) out_ << ',';
        if (quote) {
            out_ << '"';
            for (char c : header[i]) out_ << (c == '"' ? "\"\"" : std::string(1, c));
            out_ << '"';
        } else {
            out_ << header[i];
        }
    }
    out_ << "\r\n";
}

void CsvWriter::separator() {
    if (in_row_ == columns_) throw std::logic_error("csv: too many fields in a row of " + path_.string());
    if (in_row_++) out_ << ',';
}

CsvWriter& CsvWriter::operator<<(double v) {
    separator();
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("csv: number formatting failed");
    out_.write(buf, end - buf);
    return *this;
}

CsvWriter& CsvWriter::operator<<(long v) {
    separator();
    char buf[24];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("csv: number formatting failed");
    out_.write(buf, end - buf);
    return *this;
}

void CsvWriter::end_row() {
    if (in_row_ != columns_) throw std::logic_error("csv: short row in " + path_.string());
    out_ << "\r\n";
    in_row_ = 0;
}

void CsvWriter::close() {
    out_.close();
    if (!out_) throw std::runtime_error("cannot write " + path_.string());
}

void write_columns(const std::filesystem::path& path, const std::vector<std::string>& header,
                   const std::vector<const RealVector<double>*>& columns) {
    if (header.size() != columns.size()) throw std::logic_error("write_columns: header/column count mismatch");
    CsvWriter w(path, header);
    const Eigen::Index n = columns.empty() ? 0 : columns.front()->size();
    for (const auto* c : columns)
        if (c->size() != n) throw std::logic_error("write_columns: columns differ in length");
    for (Eigen::Index i = 0; i < n; ++i) {
        for (const auto* c : columns) w << (*c)[i];
        w.end_row();
    }
    w.close();
}

RealVector<double> histogram(const std::vector<double>& samples, const RealVector<double>& axis, double h) {
    RealVector<double> out = RealVector<double>::Zero(axis.size());
    if (samples.empty() || axis.size() == 0) return out;
    const double lo = axis[0] - h / 2;
    for (double s : samples) {
        const double k = std::floor((s - lo) / h);
        if (k >= 0 && k < double(axis.size())) out[Eigen::Index(k)] += 1.0;
    }
    return out / (double(samples.size()) * h);
}

Check check_below(std::string name, double value, double limit) {
    return {std::move(name), value, limit, "<", value < limit};
}
Check check_at_most(std::string name, double value, double limit) {
    return {std::move(name), value, limit, "<=", value <= limit};
}
Check check_above(std::string name, double value, double limit) {
    return {std::move(name), value, limit, ">", value > limit};
}

bool RunResult::passed() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

nlohmann::json to_json(const ComparisonReport& r) {
    return {{"name", r.name}, {"ks", r.ks}, {"l1", r.l1}, {"n_samples", r.n_samples}, {"bins", r.bins}};
}

nlohmann::json to_json(const Check& c) {
    return {{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"relation", c.relation}, {"pass", c.pass}};
}

void write_summary(const std::filesystem::path& path, const std::string& scenario, const nlohmann::json& config,
                   const nlohmann::json& tolerances, const RunResult& result, double elapsed_seconds) {
    nlohmann::json doc;
    doc["scenario"] = scenario;
    doc["passed"] = result.passed();
    doc["checks"] = nlohmann::json::array();
    for (const auto& c : result.checks) doc["checks"].push_back(to_json(c));
    doc["reports"] = nlohmann::json::array();
    for (const auto& r : result.reports) doc["reports"].push_back(to_json(r));
    doc["details"] = result.details;
    doc["tolerances"] = tolerances;
    doc["files"] = result.files;
    doc["config"] = config;
    doc["versions"] = {{"cqm", kVersion},
                       {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                     std::to_string(EIGEN_MINOR_VERSION)},
                       {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                             std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                             std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                       {"compiler", __VERSION__}};
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::ostringstream stamp;
    stamp << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
    doc["finished_at"] = stamp.str();
    doc["elapsed_seconds"] = elapsed_seconds;

    std::ofstream out(path, std::ios::binary);
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace cqm::app
