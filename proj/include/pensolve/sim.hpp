#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "pensolve/dp.hpp"
#include "pensolve/model.hpp"
#include "pensolve/numerics.hpp"
#include "pensolve/policy.hpp"

namespace pensolve {

/// A policy usable on simulated paths: clipped stock proportion at (t, y),
/// plus a fallback counter incremented whenever the underlying source was
/// invalid and a neighbouring value had to stand in.
struct PathPolicy {
    std::string name;
    std::function<double(double t, double y)> theta;
    std::shared_ptr<std::size_t> fallbacks = std::make_shared<std::size_t>(0);
};

/// Closed-form first-order policy, clipped to the admissible set.
inline PathPolicy path_policy_first_order(const DerivedCoefficients& k, double eps,
                                          double clip_lo, double clip_hi) {
    PathPolicy p;
    p.name = "first-order";
    p.theta = [k, eps, clip_lo, clip_hi](double t, double y) {
        return clip(theta_first_order(k, eps, t, y), clip_lo, clip_hi);
    };
    return p;
}

/// Constant no-contribution optimum, clipped.
inline PathPolicy path_policy_merton(const DerivedCoefficients& k, double clip_lo,
                                     double clip_hi) {
    PathPolicy p;
    p.name = "merton";
    p.theta = [k, clip_lo, clip_hi](double, double) {
        return clip(theta_merton(k), clip_lo, clip_hi);
    };
    return p;
}

/// Samples a policy surface with nearest-node lookup in (t, log y). Invalid
/// cells fall back to the nearest valid cell in the same time row (counted).
inline PathPolicy path_policy_from_surface(const PolicySurface& surf) {
    auto counter = std::make_shared<std::size_t>(0);
    PathPolicy p;
    p.name = surf.source.empty() ? "surface" : surf.source;
    p.fallbacks = counter;
    p.theta = [surf, counter](double t, double y) {
        const auto& tg = surf.t_grid;
        const auto& yg = surf.y_grid;
        std::size_t it = 0;
        double best = std::abs(tg[0] - t);
        for (std::size_t i = 1; i < tg.size(); ++i) {
            const double dist = std::abs(tg[i] - t);
            if (dist < best) { best = dist; it = i; }
        }
        const double ly = std::log(std::max(y, 1e-300));
        std::size_t iy = 0;
        double besty = std::abs(std::log(yg[0]) - ly);
        for (std::size_t i = 1; i < yg.size(); ++i) {
            const double dist = std::abs(std::log(yg[i]) - ly);
            if (dist < besty) { besty = dist; iy = i; }
        }
        if (!surf.valid[it][iy]) {
            ++*counter;
            for (std::size_t off = 1; off < yg.size(); ++off) {
                if (iy >= off && surf.valid[it][iy - off]) { iy -= off; break; }
                if (iy + off < yg.size() && surf.valid[it][iy + off]) { iy += off; break; }
            }
        }
        return surf.theta_clipped[it][iy];
    };
    return p;
}

struct SimOptions {
    std::size_t n_paths = 10000;
    std::uint64_t seed = 1;
    double tau = 1.0; ///< deposit period in years; yearly by default
};

/// Per-year ensemble summary. Wealth is recorded at integer years 1..T;
/// y(1) = eps exactly on every path (the first deposit is deterministic).
struct EnsembleStats {
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    double tau = 1.0;
    std::vector<int> t;
    std::vector<double> mean, stdev, q05, q50, q95;
    std::size_t policy_fallbacks = 0;

    double terminal_mean() const { return mean.back(); }
    double terminal_se() const {
        return stdev.back() / std::sqrt(static_cast<double>(n_paths));
    }
};

namespace sim_detail {

/// Advances one path from t = 0 (zero balance) to T, writing wealth at
/// integer years into `yearly`. The zero-balance first step is
/// deterministic (no draw, the policy is irrelevant there), so y at the
/// first deposit equals eps*tau exactly.
template <typename PolicyT>
inline void run_path(const ModelParams& p, const PolicyT& policy, double eps,
                     double tau, NormalStream& stream, std::vector<double>& yearly) {
    const int T = static_cast<int>(std::lround(p.T));
    const auto steps = static_cast<std::size_t>(std::lround(p.T / tau));
    double y = 0.0;
    std::size_t next_year = 1;
    for (std::size_t kstep = 0; kstep < steps; ++kstep) {
        const double t = tau * static_cast<double>(kstep);
        if (y == 0.0) {
            y = eps * tau;
        } else {
            const double theta = policy(t, y);
            const double z = stream.next_normal();
            y = dp_transition(p, WealthKernel::lognormal, theta, y, z, eps, tau);
        }
        const double t_next = tau * static_cast<double>(kstep + 1);
        if (next_year <= static_cast<std::size_t>(T) &&
            t_next >= static_cast<double>(next_year) - 1e-9) {
            yearly[next_year - 1] = y;
            ++next_year;
        }
    }
}

} // namespace sim_detail

/// Monte-Carlo ensemble under a given policy. Deterministic for a given
/// (seed, n_paths, tau): every path owns the substream derived from its
/// index, so enlarging the ensemble extends it without reshuffling.
inline EnsembleStats simulate_paths(const ModelParams& p, const PathPolicy& policy,
                                    SimOptions opt = {},
                                    std::vector<double>* terminal_out = nullptr) {
    p.validate();
    if (opt.n_paths < 1) throw std::invalid_argument("simulate_paths: need n_paths >= 1");
    if (!(opt.tau > 0.0 && opt.tau <= p.T))
        throw std::invalid_argument("simulate_paths: tau must lie in (0, T]");
    const double steps_per_year = 1.0 / opt.tau;
    if (std::abs(steps_per_year - std::lround(steps_per_year)) > 1e-9)
        throw std::invalid_argument("simulate_paths: 1/tau must be an integer");

    const int T = static_cast<int>(std::lround(p.T));
    const double eps = p.eps_net();

    std::vector<std::vector<double>> yearly(opt.n_paths, std::vector<double>(T, 0.0));
    for (std::size_t path = 0; path < opt.n_paths; ++path) {
        NormalStream stream(opt.seed, path);
        sim_detail::run_path(p, policy.theta, eps, opt.tau, stream, yearly[path]);
    }

    EnsembleStats st;
    st.n_paths = opt.n_paths;
    st.seed = opt.seed;
    st.tau = opt.tau;
    st.policy_fallbacks = *policy.fallbacks;
    std::vector<double> column(opt.n_paths);
    for (int year = 1; year <= T; ++year) {
        for (std::size_t path = 0; path < opt.n_paths; ++path)
            column[path] = yearly[path][year - 1];
        st.t.push_back(year);
        st.mean.push_back(mean_of(column));
        st.stdev.push_back(stddev_of(column));
        st.q05.push_back(quantile(column, 0.05));
        st.q50.push_back(quantile(column, 0.50));
        st.q95.push_back(quantile(column, 0.95));
    }
    if (terminal_out) {
        terminal_out->resize(opt.n_paths);
        for (std::size_t path = 0; path < opt.n_paths; ++path)
            (*terminal_out)[path] = yearly[path][T - 1];
    }
    return st;
}

/// Shared-noise comparison of several policies: every policy sees the same
/// per-path draws, so identical policies produce exactly zero differences
/// and paired differences carry far less Monte-Carlo noise than independent
/// runs.
struct PolicyComparison {
    std::vector<EnsembleStats> stats;
    std::vector<std::vector<double>> terminal; ///< per-policy terminal wealth
    struct Pair {
        std::size_t i = 0, j = 0;
        double mean_diff = 0.0; ///< E[y_T(i)] - E[y_T(j)]
        double se_diff = 0.0;   ///< paired standard error
    };
    std::vector<Pair> pairs;
};

inline PolicyComparison compare_policies(const ModelParams& p,
                                         const std::vector<PathPolicy>& policies,
                                         SimOptions opt = {}) {
    if (policies.size() < 2)
        throw std::invalid_argument("compare_policies: need at least two policies");
    PolicyComparison cmp;
    cmp.terminal.resize(policies.size());
    for (std::size_t i = 0; i < policies.size(); ++i)
        cmp.stats.push_back(simulate_paths(p, policies[i], opt, &cmp.terminal[i]));

    for (std::size_t i = 0; i < policies.size(); ++i) {
        for (std::size_t j = i + 1; j < policies.size(); ++j) {
            std::vector<double> diff(opt.n_paths);
            for (std::size_t q = 0; q < opt.n_paths; ++q)
                diff[q] = cmp.terminal[i][q] - cmp.terminal[j][q];
            PolicyComparison::Pair pr;
            pr.i = i;
            pr.j = j;
            pr.mean_diff = mean_of(diff);
            pr.se_diff = stddev_of(diff) / std::sqrt(static_cast<double>(opt.n_paths));
            cmp.pairs.push_back(pr);
        }
    }
    return cmp;
}

} // namespace pensolve
