#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pensolve/errors.hpp"
#include "pensolve/scenario.hpp"
#include "pensolve/version.hpp"

namespace pensolve {

/// Minimal CSV emitter: one header, full-precision numeric cells.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
        : out_(path) {
        if (!out_) throw std::runtime_error("cannot open for writing: " + path.string());
        out_ << std::setprecision(17);
        for (std::size_t i = 0; i < header.size(); ++i)
            out_ << (i ? "," : "") << header[i];
        out_ << "\n";
    }

    void row(const std::vector<double>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << j.dump(2) << "\n";
}

/// Every CLI run drops a manifest next to its artifacts: the resolved
/// scenario, every effective flag, outputs and timing. A run is replayable
/// from its manifest alone.
class Manifest {
public:
    Manifest(std::string command, const Scenario& scenario)
        : start_(std::chrono::steady_clock::now()) {
        j_["version"] = version_string();
        j_["command"] = std::move(command);
        j_["scenario"] = scenario_to_json(scenario);
        j_["flags"] = nlohmann::json::object();
        j_["outputs"] = nlohmann::json::array();
    }

    template <typename T>
    void flag(const std::string& name, const T& value) {
        j_["flags"][name] = value;
    }

    void output(const std::filesystem::path& p) { j_["outputs"].push_back(p.filename().string()); }

    void write(const std::filesystem::path& dir) {
        const auto elapsed = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - start_)
                                 .count();
        j_["wall_seconds"] = elapsed;
        write_json(dir / "manifest.json", j_);
    }

    const nlohmann::json& json() const { return j_; }

private:
    nlohmann::json j_;
    std::chrono::steady_clock::time_point start_;
};

} // namespace pensolve
