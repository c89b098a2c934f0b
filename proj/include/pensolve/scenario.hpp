#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "pensolve/model.hpp"

namespace pensolve {

/// A named parameter set plus optional reference threshold figures carried
/// alongside the calibration (write-ups circulating a calibration sometimes
/// quote derived thresholds that do not match direct recomputation; both are
/// reported side by side, never reconciled).
struct Scenario {
    std::string name;
    ModelParams params;
    std::optional<double> reference_threshold_d;
    std::optional<double> reference_threshold_mu_s;
};

/// Second pillar of the Slovak pension system: S&P500 stocks, one-year
/// BRIBOR bonds, 9% gross salary transfer with a 1% management fee, 40-year
/// horizon, risk aversion 10.
inline Scenario slovak_scenario() {
    Scenario sc;
    sc.name = "slovak";
    sc.params.mu_s = 0.1028;
    sc.params.sigma_s = 0.1690;
    sc.params.mu_b = 0.0516;
    sc.params.sigma_b = 0.00882;
    sc.params.rho = -0.1151;
    sc.params.beta = 0.05;
    sc.params.eps_gross = 0.09;
    sc.params.kappa = 0.01;
    sc.params.d = 10.0;
    sc.params.T = 40.0;
    sc.params.theta_lo = 0.0;
    sc.params.theta_hi = 1.0;
    sc.reference_threshold_d = 306.0;
    sc.reference_threshold_mu_s = 3.19;
    return sc;
}

/// Bulgarian funded pillar: same market data, 14% transfer, no fee.
inline Scenario bulgarian_scenario() {
    Scenario sc = slovak_scenario();
    sc.name = "bulgarian";
    sc.params.eps_gross = 0.14;
    sc.params.kappa = 0.0;
    return sc;
}

namespace scenario_detail {

/// Rates may be given as numbers (0.1028) or strings with a percent suffix
/// ("10.28%").
inline double parse_rate(const nlohmann::json& v, const std::string& key) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
        std::size_t start = 0;
        while (start < s.size() && (s[start] == ' ' || s[start] == '\t')) ++start;
        s = s.substr(start);
        double scale = 1.0;
        if (!s.empty() && s.back() == '%') {
            scale = 0.01;
            s.pop_back();
        }
        try {
            std::size_t used = 0;
            const double x = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument("trailing characters");
            return x * scale;
        } catch (const std::exception&) {
            throw std::invalid_argument("scenario key '" + key + "': cannot parse '" +
                                        v.get<std::string>() + "' as a rate");
        }
    }
    throw std::invalid_argument("scenario key '" + key + "': expected number or string");
}

} // namespace scenario_detail

inline Scenario scenario_from_json(const nlohmann::json& j, std::string name_hint = {}) {
    static const std::set<std::string> known = {
        "name",  "mu_s",      "mu_b",     "sigma_s",  "sigma_b",
        "rho",   "beta",      "eps_gross", "kappa",    "d",
        "T",     "theta_lo",  "theta_hi",  "reference_thresholds"};
    for (const auto& item : j.items())
        if (!known.count(item.key()))
            throw std::invalid_argument("scenario: unknown key '" + item.key() + "'");

    Scenario sc;
    sc.name = j.value("name", name_hint);
    auto need = [&](const char* key) -> const nlohmann::json& {
        if (!j.contains(key))
            throw std::invalid_argument(std::string("scenario: missing key '") + key + "'");
        return j.at(key);
    };
    sc.params.mu_s = scenario_detail::parse_rate(need("mu_s"), "mu_s");
    sc.params.mu_b = scenario_detail::parse_rate(need("mu_b"), "mu_b");
    sc.params.sigma_s = scenario_detail::parse_rate(need("sigma_s"), "sigma_s");
    sc.params.sigma_b = scenario_detail::parse_rate(need("sigma_b"), "sigma_b");
    sc.params.rho = scenario_detail::parse_rate(need("rho"), "rho");
    sc.params.beta = scenario_detail::parse_rate(need("beta"), "beta");
    sc.params.eps_gross = scenario_detail::parse_rate(need("eps_gross"), "eps_gross");
    sc.params.kappa = scenario_detail::parse_rate(need("kappa"), "kappa");
    sc.params.d = scenario_detail::parse_rate(need("d"), "d");
    sc.params.T = scenario_detail::parse_rate(need("T"), "T");
    if (j.contains("theta_lo"))
        sc.params.theta_lo = scenario_detail::parse_rate(j.at("theta_lo"), "theta_lo");
    if (j.contains("theta_hi"))
        sc.params.theta_hi = scenario_detail::parse_rate(j.at("theta_hi"), "theta_hi");
    if (j.contains("reference_thresholds")) {
        const auto& rt = j.at("reference_thresholds");
        if (rt.contains("d")) sc.reference_threshold_d = rt.at("d").get<double>();
        if (rt.contains("mu_s")) sc.reference_threshold_mu_s = rt.at("mu_s").get<double>();
    }
    sc.params.validate();
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("scenario: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("scenario '" + path + "': " + e.what());
    }
    // default the name to the file stem
    std::string stem = path;
    if (const auto slash = stem.find_last_of("/\\"); slash != std::string::npos)
        stem = stem.substr(slash + 1);
    if (const auto dot = stem.find_last_of('.'); dot != std::string::npos)
        stem = stem.substr(0, dot);
    return scenario_from_json(j, stem);
}

inline nlohmann::json scenario_to_json(const Scenario& sc) {
    nlohmann::json j;
    j["name"] = sc.name;
    j["mu_s"] = sc.params.mu_s;
    j["mu_b"] = sc.params.mu_b;
    j["sigma_s"] = sc.params.sigma_s;
    j["sigma_b"] = sc.params.sigma_b;
    j["rho"] = sc.params.rho;
    j["beta"] = sc.params.beta;
    j["eps_gross"] = sc.params.eps_gross;
    j["kappa"] = sc.params.kappa;
    j["d"] = sc.params.d;
    j["T"] = sc.params.T;
    j["theta_lo"] = sc.params.theta_lo;
    j["theta_hi"] = sc.params.theta_hi;
    if (sc.reference_threshold_d || sc.reference_threshold_mu_s) {
        nlohmann::json rt;
        if (sc.reference_threshold_d) rt["d"] = *sc.reference_threshold_d;
        if (sc.reference_threshold_mu_s) rt["mu_s"] = *sc.reference_threshold_mu_s;
        j["reference_thresholds"] = rt;
    }
    return j;
}

} // namespace pensolve
