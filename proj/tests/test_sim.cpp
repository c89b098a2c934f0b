#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pensolve/scenario.hpp"
#include "pensolve/sim.hpp"

using namespace pensolve;

namespace {
ModelParams slovak_eps(double eps) {
    ModelParams p = slovak_scenario().params;
    p.eps_override = eps;
    return p;
}
} // namespace

TEST_CASE("first deposit is deterministic on every path", "[sim]") {
    const ModelParams p = slovak_eps(0.09);
    const auto k = derive_coefficients(p);
    SimOptions opt;
    opt.n_paths = 500;
    const auto st = simulate_paths(p, path_policy_first_order(k, 0.09, 0.0, 1.0), opt);
    CHECK(st.t.front() == 1);
    CHECK(st.mean.front() == Catch::Approx(0.09).margin(1e-15));
    CHECK(st.stdev.front() == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("drift-neutral zero-noise accumulation is linear", "[sim]") {
    ModelParams p = slovak_eps(0.09);
    p.mu_s = p.mu_b = p.beta;
    p.sigma_s = p.sigma_b = 1e-10;
    p.rho = 0.0;
    PathPolicy constant;
    constant.name = "half";
    constant.theta = [](double, double) { return 0.5; };
    SimOptions opt;
    opt.n_paths = 50;
    const auto st = simulate_paths(p, constant, opt);
    for (int year = 1; year <= 40; ++year) {
        CHECK(st.mean[year - 1] == Catch::Approx(0.09 * year).margin(1e-7));
        CHECK(st.stdev[year - 1] <= 1e-7);
    }
}

TEST_CASE("wealth never falls below one deposit", "[sim][property]") {
    const ModelParams p = slovak_eps(0.09);
    const auto k = derive_coefficients(p);
    SimOptions opt;
    opt.n_paths = 400;
    opt.seed = 9;
    const auto st = simulate_paths(p, path_policy_first_order(k, 0.09, 0.0, 1.0), opt);
    for (double q : st.q05) CHECK(q >= 0.09 * (1.0 - 1e-12));
}

TEST_CASE("seed determinism, seed sensitivity", "[sim]") {
    const ModelParams p = slovak_eps(0.09);
    const auto k = derive_coefficients(p);
    const auto policy = path_policy_first_order(k, 0.09, 0.0, 1.0);
    SimOptions opt;
    opt.n_paths = 300;
    opt.seed = 42;
    const auto a = simulate_paths(p, policy, opt);
    const auto b = simulate_paths(p, policy, opt);
    REQUIRE(a.mean.size() == b.mean.size());
    for (std::size_t i = 0; i < a.mean.size(); ++i) {
        CHECK(a.mean[i] == b.mean[i]); // bit identical
        CHECK(a.stdev[i] == b.stdev[i]);
        CHECK(a.q50[i] == b.q50[i]);
    }
    opt.seed = 43;
    const auto c = simulate_paths(p, policy, opt);
    CHECK(a.mean.back() != c.mean.back());
}

TEST_CASE("growing the ensemble extends it without reshuffling", "[sim]") {
    const ModelParams p = slovak_eps(0.09);
    const auto k = derive_coefficients(p);
    const auto policy = path_policy_first_order(k, 0.09, 0.0, 1.0);
    SimOptions small;
    small.n_paths = 100;
    SimOptions large;
    large.n_paths = 200;
    std::vector<double> term_small, term_large;
    simulate_paths(p, policy, small, &term_small);
    simulate_paths(p, policy, large, &term_large);
    for (std::size_t i = 0; i < term_small.size(); ++i)
        CHECK(term_small[i] == term_large[i]);
}

TEST_CASE("terminal wealth lands near the reference fan", "[sim]") {
    const ModelParams p = slovak_eps(0.09);
    const auto k = derive_coefficients(p);
    SimOptions opt;
    opt.n_paths = 2000;
    const auto st = simulate_paths(p, path_policy_first_order(k, 0.09, 0.0, 1.0), opt);
    CHECK(st.terminal_mean() > 4.6);
    CHECK(st.terminal_mean() < 5.8);
    CHECK(st.q05.back() < st.q50.back());
    CHECK(st.q50.back() < st.q95.back());
}

TEST_CASE("identical policies compare to exactly zero", "[sim]") {
    const ModelParams p = slovak_eps(0.09);
    const auto k = derive_coefficients(p);
    SimOptions opt;
    opt.n_paths = 500;
    const auto cmp = compare_policies(
        p,
        {path_policy_first_order(k, 0.09, 0.0, 1.0),
         path_policy_first_order(k, 0.09, 0.0, 1.0)},
        opt);
    REQUIRE(cmp.pairs.size() == 1);
    CHECK(cmp.pairs[0].mean_diff == 0.0);
    CHECK(cmp.pairs[0].se_diff == 0.0);
}

TEST_CASE("paired comparison is consistent across seeds", "[sim][oracle]") {
    const ModelParams p = slovak_eps(0.09);
    const auto k = derive_coefficients(p);
    auto run = [&](std::uint64_t seed) {
        SimOptions opt;
        opt.n_paths = 4000;
        opt.seed = seed;
        return compare_policies(p,
                                {path_policy_merton(k, 0.0, 1.0),
                                 path_policy_first_order(k, 0.09, 0.0, 1.0)},
                                opt);
    };
    const auto c1 = run(1), c2 = run(77);
    const auto& p1 = c1.pairs[0];
    const auto& p2 = c2.pairs[0];
    // a rerun with fresh noise must land inside the combined confidence band
    CHECK(std::abs(p1.mean_diff - p2.mean_diff) <= 4.0 * (p1.se_diff + p2.se_diff));
}

TEST_CASE("clipping only alters paths that visit the clipped region",
          "[sim][oracle]") {
    const ModelParams p = slovak_eps(0.09);
    const auto k = derive_coefficients(p);
    const double eps = 0.09;
    const int T = 40;
    for (std::size_t path = 0; path < 200; ++path) {
        // replicate the path recurrence with shared draws for both policies
        double y_clip = 0.0, y_raw = 0.0;
        bool clip_active = false;
        NormalStream s1(5, path), s2(5, path);
        for (int step = 0; step < T; ++step) {
            const double t = static_cast<double>(step);
            if (y_clip == 0.0) {
                y_clip = eps;
            } else {
                const double raw = theta_first_order(k, eps, t, y_clip);
                if (raw > 1.0) clip_active = true;
                y_clip = dp_transition(p, WealthKernel::lognormal,
                                       clip(raw, 0.0, 1.0), y_clip,
                                       s1.next_normal(), eps, 1.0);
            }
            if (y_raw == 0.0) {
                y_raw = eps;
            } else {
                y_raw = dp_transition(p, WealthKernel::lognormal,
                                      theta_first_order(k, eps, t, y_raw), y_raw,
                                      s2.next_normal(), eps, 1.0);
            }
        }
        if (!clip_active) {
            CHECK(y_clip == y_raw); // untouched paths coincide bitwise
        } else {
            CHECK(y_clip != y_raw);
        }
    }
}

TEST_CASE("surface-backed policy falls back near invalid cells and counts it",
          "[sim]") {
    const auto k = derive_coefficients(slovak_eps(0.09));
    const auto sol = SeriesSolution::build(k, 1);
    std::vector<double> t_grid, y_grid;
    for (int i = 0; i <= 40; ++i) t_grid.push_back(i);
    for (int i = 0; i <= 60; ++i) y_grid.push_back(0.02 * std::pow(2500.0, i / 60.0));
    const auto surf = build_policy_surface(theta_source_series(sol, 0.09), t_grid,
                                           y_grid, 0.0, 1.0, "series-1");
    REQUIRE(surf.invalid_count > 0);
    const auto policy = path_policy_from_surface(surf);
    ModelParams p = slovak_eps(0.09);
    SimOptions opt;
    opt.n_paths = 300;
    const auto st = simulate_paths(p, policy, opt);
    CHECK(st.policy_fallbacks > 0);
    CHECK(st.terminal_mean() > 1.0);
}
