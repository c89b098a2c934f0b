#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pensolve/bounds.hpp"
#include "pensolve/dp.hpp"
#include "pensolve/model.hpp"
#include "pensolve/pde.hpp"
#include "pensolve/policy.hpp"
#include "pensolve/report.hpp"
#include "pensolve/scenario.hpp"
#include "pensolve/series.hpp"
#include "pensolve/sim.hpp"
#include "pensolve/verify.hpp"

namespace pensolve::cli {

namespace fs = std::filesystem;

/// Exit-code contract: 0 success, 1 usage, 2 numeric failure, 3 invariant
/// violation.
enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_numeric = 2, exit_invariant = 3 };

namespace detail {

struct CommonArgs {
    std::string scenario_path;
    std::string out_dir = "out";
    std::optional<double> eps_override;
    std::optional<double> d_override;
    std::string clip = "0,1";
};

inline void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("scenario", args.scenario_path,
                    "scenario file (or the built-in names 'slovak'/'bulgarian')")
        ->required();
    cmd->add_option("--out", args.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--eps", args.eps_override,
                    "override the net contribution rate (default (1-kappa)*eps_gross)");
    cmd->add_option("--d", args.d_override, "override the risk-aversion coefficient");
    cmd->add_option("--clip", args.clip, "admissible set as 'lo,hi'")
        ->capture_default_str();
}

inline Scenario resolve_scenario(const CommonArgs& args) {
    Scenario sc;
    if (args.scenario_path == "slovak")
        sc = slovak_scenario();
    else if (args.scenario_path == "bulgarian")
        sc = bulgarian_scenario();
    else
        sc = load_scenario(args.scenario_path);
    if (args.eps_override) sc.params.eps_override = *args.eps_override;
    if (args.d_override) sc.params.d = *args.d_override;
    const auto comma = args.clip.find(',');
    if (comma == std::string::npos)
        throw std::invalid_argument("--clip expects 'lo,hi'");
    sc.params.theta_lo = std::stod(args.clip.substr(0, comma));
    sc.params.theta_hi = std::stod(args.clip.substr(comma + 1));
    sc.params.validate();
    return sc;
}

inline fs::path prepare_out(const CommonArgs& args) {
    fs::path dir(args.out_dir);
    fs::create_directories(dir);
    return dir;
}

inline nlohmann::json coeffs_json(const DerivedCoefficients& k) {
    nlohmann::json j;
    j["a"] = k.a;
    j["b"] = k.b;
    j["delta_mu"] = k.delta_mu;
    j["alpha"] = k.alpha;
    j["c"] = k.c;
    j["gamma"] = k.gamma;
    j["delta"] = k.delta;
    j["eps_net"] = k.eps_net;
    j["psi0"] = k.psi0();
    j["hypothesis"]["holds"] = k.hypothesis.holds();
    j["hypothesis"]["b_positive"] = k.hypothesis.b_positive;
    j["hypothesis"]["a_above_b"] = k.hypothesis.a_above_b;
    j["hypothesis"]["delta_mu_positive"] = k.hypothesis.dmu_positive;
    if (!k.hypothesis.holds()) j["hypothesis"]["failure"] = k.hypothesis.failure();
    j["merton"] = theta_merton(k);
    if (k.hypothesis.holds()) {
        j["risk_aversion_threshold"] = risk_aversion_threshold(k);
        const auto rep = orientation_report(k);
        j["bound_orientation"] = rep.summary;
    }
    return j;
}

inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return g;
}

inline std::vector<double> lin_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    return g;
}

// ---------------- commands ----------------

inline int cmd_coeffs(const CommonArgs& args) {
    const Scenario sc = resolve_scenario(args);
    const auto dir = prepare_out(args);
    Manifest man("coeffs", sc);
    const auto k = derive_coefficients(sc.params);
    auto j = coeffs_json(k);
    j["scenario"] = sc.name;
    write_json(dir / "coeffs.json", j);
    man.output(dir / "coeffs.json");
    man.write(dir);
    std::cout << j.dump(2) << "\n";
    return exit_ok;
}

inline int cmd_series(const CommonArgs& args, int order, std::size_t s_steps) {
    const Scenario sc = resolve_scenario(args);
    const auto dir = prepare_out(args);
    Manifest man("series", sc);
    man.flag("order", order);
    man.flag("s_steps", s_steps);
    const auto k = derive_coefficients(sc.params);
    SeriesBuildOptions opt;
    opt.s_steps = s_steps;
    const auto sol = SeriesSolution::build(k, order, opt);

    std::vector<std::string> header = {"s"};
    for (int n = 0; n <= order; ++n) header.push_back("phi_" + std::to_string(n));
    for (int n = 0; n <= order; ++n) header.push_back("omega_" + std::to_string(n));
    CsvWriter csv(dir / "series.csv", header);
    const auto& s = sol.s_grid();
    for (std::size_t j = 0; j < s.size(); ++j) {
        std::vector<double> row = {s[j]};
        for (int n = 0; n <= order; ++n) row.push_back(sol.phi_table(n)[j]);
        for (int n = 0; n <= order; ++n) row.push_back(sol.omega_table(n)[j]);
        csv.row(row);
    }
    man.output(dir / "series.csv");
    man.write(dir);
    std::cout << "series tables written (order " << order << ", " << s.size()
              << " nodes)\n";
    return exit_ok;
}

inline int cmd_bounds(const CommonArgs& args) {
    const Scenario sc = resolve_scenario(args);
    const auto dir = prepare_out(args);
    Manifest man("bounds", sc);
    const auto k = derive_coefficients(sc.params);
    const double eps = sc.params.eps_net();
    man.flag("eps_net", eps);

    CsvWriter csv(dir / "bounds.csv",
                  {"t", "y", "psi_lower", "psi_upper", "value_lower", "value_upper",
                   "theta_lo", "theta_hi", "theta_delta_branch"});
    for (double t : lin_grid(0.0, k.T, 41)) {
        for (double y : log_grid(0.05, 50.0, 61)) {
            const auto pe = psi_envelope(k, eps, k.T - t, std::log(y));
            const auto ve = value_envelope(k, eps, t, y);
            const auto br = theta_bracket(k, eps, t, y);
            csv.row({t, y, pe.lower, pe.upper, ve.lower, ve.upper, br.lo(), br.hi(),
                     br.lower});
        }
    }
    man.output(dir / "bounds.csv");
    man.write(dir);
    std::cout << "envelope surfaces written\n";
    return exit_ok;
}

inline int cmd_policy(const CommonArgs& args, const std::string& backend, int order) {
    const Scenario sc = resolve_scenario(args);
    const auto dir = prepare_out(args);
    Manifest man("policy", sc);
    man.flag("backend", backend);
    man.flag("order", order);
    const auto k = derive_coefficients(sc.params);
    const double eps = sc.params.eps_net();
    man.flag("eps_net", eps);

    ThetaSource source;
    if (backend == "first-order") {
        source = theta_source_first_order(k, eps);
    } else if (backend == "series") {
        source = theta_source_series(SeriesSolution::build(k, order), eps);
    } else if (backend == "pde") {
        PdeOptions popt;
        auto grid = std::make_shared<FdGrid>(solve_pde(k, eps, popt));
        if (!grid->completed)
            throw NumericError("pde backend did not complete: " + grid->diagnostics);
        source = theta_source_from_psi(k, [grid](double s, double x) {
            const double v = grid->at(s, x);
            return PsiValue{v, 0.0, v > 0.0};
        });
    } else {
        throw std::invalid_argument("unknown backend '" + backend +
                                    "' (use first-order, series or pde)");
    }

    const auto surf = build_policy_surface(source, lin_grid(0.0, k.T, 81),
                                           log_grid(0.02, 50.0, 81),
                                           sc.params.theta_lo, sc.params.theta_hi,
                                           backend);
    CsvWriter csv(dir / "policy.csv", {"t", "y", "theta_raw", "theta_clipped", "valid"});
    for (std::size_t it = 0; it < surf.t_grid.size(); ++it)
        for (std::size_t iy = 0; iy < surf.y_grid.size(); ++iy)
            csv.row({surf.t_grid[it], surf.y_grid[iy], surf.theta_raw[it][iy],
                     surf.theta_clipped[it][iy], surf.valid[it][iy] ? 1.0 : 0.0});
    man.flag("invalid_cells", surf.invalid_count);
    man.output(dir / "policy.csv");
    man.write(dir);
    std::cout << "policy surface written (backend " << backend << ", invalid cells "
              << surf.invalid_count << ")\n";
    return exit_ok;
}

inline int cmd_dp(const CommonArgs& args, const std::string& kernel_name) {
    const Scenario sc = resolve_scenario(args);
    const auto dir = prepare_out(args);
    Manifest man("dp", sc);
    man.flag("kernel", kernel_name);
    DpOptions opt;
    if (kernel_name == "arithmetic")
        opt.kernel = WealthKernel::arithmetic;
    else if (kernel_name != "lognormal")
        throw std::invalid_argument("unknown kernel '" + kernel_name + "'");

    const auto vg = solve_bellman(sc.params, opt);
    CsvWriter pol(dir / "dp_policy.csv", {"t", "y", "theta_star"});
    for (int t = 1; t < vg.T; ++t)
        for (std::size_t i = 0; i < vg.y_grid.size(); ++i)
            pol.row({static_cast<double>(t), vg.y_grid[i], vg.theta_star[t][i]});
    CsvWriter val(dir / "dp_value.csv", {"t", "y", "W"});
    for (int t = 1; t <= vg.T; ++t)
        for (std::size_t i = 0; i < vg.y_grid.size(); ++i)
            val.row({static_cast<double>(t), vg.y_grid[i], vg.W[t][i]});
    man.output(dir / "dp_policy.csv");
    man.output(dir / "dp_value.csv");
    man.write(dir);
    std::cout << "dynamic program solved (" << kernel_name << " kernel)\n";
    return exit_ok;
}

inline int cmd_pde(const CommonArgs& args, const std::string& grid_spec,
                   std::size_t stride) {
    const Scenario sc = resolve_scenario(args);
    const auto dir = prepare_out(args);
    Manifest man("pde", sc);
    const auto k = derive_coefficients(sc.params);
    const double eps = sc.params.eps_net();
    man.flag("eps_net", eps);
    man.flag("grid", grid_spec);
    man.flag("stride", stride);

    PdeOptions opt;
    if (!grid_spec.empty()) {
        const auto comma = grid_spec.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("--grid expects 'nx,ns'");
        opt.nx = std::stoul(grid_spec.substr(0, comma));
        opt.ns = std::stoul(grid_spec.substr(comma + 1));
    }
    const auto g = solve_pde(k, eps, opt);

    nlohmann::json meta;
    meta["completed"] = g.completed;
    meta["richardson_error"] = g.richardson_error;
    meta["rejected_steps"] = g.rejected_steps;
    if (!g.completed) meta["diagnostics"] = g.diagnostics;
    write_json(dir / "pde_meta.json", meta);
    man.output(dir / "pde_meta.json");

    CsvWriter csv(dir / "pde.csv", {"s", "x", "psi"});
    for (std::size_t lvl = 0; lvl < g.psi.size(); lvl += stride)
        for (std::size_t i = 0; i < g.x.size(); ++i)
            csv.row({g.s_levels[lvl], g.x[i], g.psi[lvl][i]});
    man.output(dir / "pde.csv");
    man.write(dir);

    if (!g.completed) {
        std::cerr << "pde march incomplete: " << g.diagnostics << "\n";
        return exit_numeric;
    }
    std::cout << "pde solved; richardson error estimate " << g.richardson_error << "\n";
    return exit_ok;
}

inline int cmd_sim(const CommonArgs& args, std::size_t paths, std::uint64_t seed,
                   double tau, const std::string& policy_name) {
    const Scenario sc = resolve_scenario(args);
    const auto dir = prepare_out(args);
    Manifest man("sim", sc);
    man.flag("paths", paths);
    man.flag("seed", seed);
    man.flag("tau", tau);
    man.flag("policy", policy_name);
    const auto k = derive_coefficients(sc.params);
    const double eps = sc.params.eps_net();
    man.flag("eps_net", eps);

    PathPolicy policy;
    if (policy_name == "first-order")
        policy = path_policy_first_order(k, eps, sc.params.theta_lo, sc.params.theta_hi);
    else if (policy_name == "merton")
        policy = path_policy_merton(k, sc.params.theta_lo, sc.params.theta_hi);
    else
        throw std::invalid_argument("unknown policy '" + policy_name + "'");

    SimOptions opt;
    opt.n_paths = paths;
    opt.seed = seed;
    opt.tau = tau;
    const auto st = simulate_paths(sc.params, policy, opt);

    CsvWriter csv(dir / "fan.csv", {"t", "mean", "std", "q05", "q50", "q95"});
    for (std::size_t i = 0; i < st.t.size(); ++i)
        csv.row({static_cast<double>(st.t[i]), st.mean[i], st.stdev[i], st.q05[i],
                 st.q50[i], st.q95[i]});
    man.flag("policy_fallbacks", st.policy_fallbacks);
    man.output(dir / "fan.csv");
    man.write(dir);
    std::cout << "E(y_T) = " << st.terminal_mean() << " +- " << st.terminal_se()
              << " (" << paths << " paths)\n";
    return exit_ok;
}

inline int cmd_compare(const CommonArgs& args, const std::string& kernel_name,
                       bool mc_mode, std::size_t paths, std::uint64_t seed) {
    const Scenario sc = resolve_scenario(args);
    const auto dir = prepare_out(args);
    Manifest man("compare", sc);
    man.flag("kernel", kernel_name);
    man.flag("mc", mc_mode);
    const auto k = derive_coefficients(sc.params);
    const double eps = sc.params.eps_net();
    man.flag("eps_net", eps);

    if (mc_mode) {
        man.flag("paths", paths);
        man.flag("seed", seed);
        SimOptions opt;
        opt.n_paths = paths;
        opt.seed = seed;
        const auto cmp = compare_policies(
            sc.params,
            {path_policy_merton(k, sc.params.theta_lo, sc.params.theta_hi),
             path_policy_first_order(k, eps, sc.params.theta_lo, sc.params.theta_hi)},
            opt);
        nlohmann::json j;
        j["policies"] = {"merton", "first-order"};
        j["terminal_means"] = {cmp.stats[0].terminal_mean(), cmp.stats[1].terminal_mean()};
        j["mean_diff"] = cmp.pairs[0].mean_diff;
        j["se_diff"] = cmp.pairs[0].se_diff;
        write_json(dir / "compare_mc.json", j);
        man.output(dir / "compare_mc.json");
        man.write(dir);
        std::cout << j.dump(2) << "\n";
        return exit_ok;
    }

    DpOptions opt;
    opt.kernel = (kernel_name == "lognormal") ? WealthKernel::lognormal
                                              : WealthKernel::arithmetic;
    const auto vg = solve_bellman(sc.params, opt);
    CsvWriter csv(dir / "compare.csv", {"t", "y", "theta_dp", "theta_continuous", "gap"});
    double gap = 0.0;
    int at_t = 0;
    double at_y = 0.0;
    for (int t = 1; t < vg.T; ++t)
        for (std::size_t i = 0; i < vg.y_grid.size(); ++i) {
            const double y = vg.y_grid[i];
            if (y < 0.05 || y > 10.0) continue;
            const double cont = clip(theta_first_order(k, eps, t, y),
                                     sc.params.theta_lo, sc.params.theta_hi);
            const double g = std::abs(vg.theta_star[t][i] - cont);
            csv.row({static_cast<double>(t), y, vg.theta_star[t][i], cont, g});
            if (g > gap) {
                gap = g;
                at_t = t;
                at_y = y;
            }
        }
    nlohmann::json j;
    j["max_gap"] = gap;
    j["at_t"] = at_t;
    j["at_y"] = at_y;
    j["kernel"] = kernel_name;
    write_json(dir / "compare.json", j);
    man.output(dir / "compare.csv");
    man.output(dir / "compare.json");
    man.write(dir);
    std::cout << "max |theta_dp - theta_continuous| = " << gap << " at t=" << at_t
              << ", y=" << at_y << "\n";
    return exit_ok;
}

inline int cmd_sensitivity(const CommonArgs& args) {
    const Scenario sc = resolve_scenario(args);
    const auto dir = prepare_out(args);
    Manifest man("sensitivity", sc);
    const auto k = derive_coefficients(sc.params);
    const double eps = sc.params.eps_net();
    man.flag("eps_net", eps);

    nlohmann::json j;
    for (auto which : {SensitivityParam::d, SensitivityParam::mu_s}) {
        const auto rep = sensitivity_precondition(k, which);
        nlohmann::json pj;
        pj["threshold"] = rep.threshold;
        pj["compared_value"] = rep.compared_value;
        pj["satisfied"] = rep.satisfied;
        const auto quoted = (which == SensitivityParam::d) ? sc.reference_threshold_d
                                                           : sc.reference_threshold_mu_s;
        if (quoted) {
            pj["reference_quoted"] = *quoted;
            pj["matches_recomputation"] =
                std::abs(*quoted - rep.threshold) <= 0.05 * rep.threshold;
        }
        j["preconditions"][to_string(which)] = pj;
    }
    for (auto which : {SensitivityParam::eps, SensitivityParam::kappa,
                       SensitivityParam::d, SensitivityParam::mu_s,
                       SensitivityParam::beta, SensitivityParam::t, SensitivityParam::y}) {
        nlohmann::json rows = nlohmann::json::array();
        for (double t : {0.0, 10.0, 20.0, 30.0, 39.0})
            for (double y : {0.2, 1.0, 5.0}) {
                const auto r = sensitivity(k, eps, t, y, which, sc.params.eps_gross);
                rows.push_back({{"t", t}, {"y", y}, {"value", r.value},
                                {"sign_guarantee", r.sign_guarantee}});
            }
        j["derivatives"][to_string(which)] = rows;
    }
    write_json(dir / "sensitivity.json", j);
    man.output(dir / "sensitivity.json");
    man.write(dir);
    std::cout << j["preconditions"].dump(2) << "\n";
    return exit_ok;
}

inline int cmd_verify(const std::string& out_dir) {
    fs::path dir(out_dir);
    fs::create_directories(dir);
    Manifest man("verify", slovak_scenario());
    const auto results = run_acceptance_criteria();
    bool all = true;
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : results) {
        all = all && r.pass;
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << "criterion " << r.id << ": "
                  << r.name << " — " << r.detail << " (" << r.seconds << " s)\n";
        j.push_back({{"id", r.id},
                     {"name", r.name},
                     {"pass", r.pass},
                     {"detail", r.detail},
                     {"seconds", r.seconds}});
    }
    write_json(dir / "verify.json", j);
    man.output(dir / "verify.json");
    man.write(dir);
    std::cout << (all ? "all criteria passed\n" : "CRITERIA FAILED\n");
    return all ? exit_ok : exit_invariant;
}

} // namespace detail

/// Entry point shared by the binary and the tests.
inline int run(std::vector<std::string> args) {
    CLI::App app{"pensolve: optimal stock-to-bond allocation toolkit for "
                 "pension-savings accumulation"};
    app.require_subcommand(1);

    detail::CommonArgs coeffs_a, series_a, bounds_a, policy_a, dp_a, pde_a, sim_a,
        compare_a, sens_a;

    auto* c_coeffs = app.add_subcommand("coeffs", "derived coefficients and hypothesis verdict");
    detail::add_common(c_coeffs, coeffs_a);

    auto* c_series = app.add_subcommand("series", "asymptotic series tables");
    detail::add_common(c_series, series_a);
    int order = 3;
    std::size_t s_steps = 2001;
    c_series->add_option("--order", order, "truncation order")->capture_default_str();
    c_series->add_option("--s-steps", s_steps, "time-grid nodes")->capture_default_str();

    auto* c_bounds = app.add_subcommand("bounds", "closed-form envelopes");
    detail::add_common(c_bounds, bounds_a);

    auto* c_policy = app.add_subcommand("policy", "policy surface");
    detail::add_common(c_policy, policy_a);
    std::string backend = "first-order";
    int p_order = 3;
    c_policy->add_option("--backend", backend, "first-order | series | pde")
        ->capture_default_str();
    c_policy->add_option("--order", p_order, "series order for the series backend")
        ->capture_default_str();

    auto* c_dp = app.add_subcommand("dp", "yearly Bellman dynamic program");
    detail::add_common(c_dp, dp_a);
    std::string kernel = "lognormal";
    c_dp->add_option("--kernel", kernel, "lognormal | arithmetic")->capture_default_str();

    auto* c_pde = app.add_subcommand("pde", "finite-difference march");
    detail::add_common(c_pde, pde_a);
    std::string grid_spec;
    std::size_t stride = 100;
    c_pde->add_option("--grid", grid_spec, "spatial,temporal resolution as 'nx,ns'");
    c_pde->add_option("--stride", stride, "dump every k-th time level")
        ->capture_default_str();

    auto* c_sim = app.add_subcommand("sim", "Monte-Carlo wealth fan");
    detail::add_common(c_sim, sim_a);
    std::size_t paths = 10000;
    std::uint64_t seed = 1;
    double tau = 1.0;
    std::string sim_policy = "first-order";
    c_sim->add_option("--paths", paths, "number of paths")->capture_default_str();
    c_sim->add_option("--seed", seed, "ensemble seed")->capture_default_str();
    c_sim->add_option("--tau", tau, "deposit period in years")->capture_default_str();
    c_sim->add_option("--policy", sim_policy, "first-order | merton")
        ->capture_default_str();

    auto* c_compare = app.add_subcommand("compare", "discrete vs continuous policies");
    detail::add_common(c_compare, compare_a);
    std::string cmp_kernel = "arithmetic";
    bool flag_dp = false, flag_cont = false, flag_mc = false;
    std::size_t cmp_paths = 10000;
    std::uint64_t cmp_seed = 1;
    c_compare->add_flag("--dp", flag_dp, "include the dynamic-program policy");
    c_compare->add_flag("--continuous", flag_cont, "include the continuous policy");
    c_compare->add_flag("--mc", flag_mc, "shared-noise Monte-Carlo policy comparison");
    c_compare->add_option("--kernel", cmp_kernel, "dp kernel: arithmetic | lognormal")
        ->capture_default_str();
    c_compare->add_option("--paths", cmp_paths, "paths for --mc")->capture_default_str();
    c_compare->add_option("--seed", cmp_seed, "seed for --mc")->capture_default_str();

    auto* c_sens = app.add_subcommand("sensitivity", "closed-form sensitivity report");
    detail::add_common(c_sens, sens_a);

    auto* c_verify = app.add_subcommand("verify", "run the full cross-oracle checklist");
    std::string verify_out = "out";
    c_verify->add_option("--out", verify_out, "output directory")->capture_default_str();

    std::vector<const char*> argv;
    argv.push_back("pensolve");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (c_coeffs->parsed()) return detail::cmd_coeffs(coeffs_a);
        if (c_series->parsed()) return detail::cmd_series(series_a, order, s_steps);
        if (c_bounds->parsed()) return detail::cmd_bounds(bounds_a);
        if (c_policy->parsed()) return detail::cmd_policy(policy_a, backend, p_order);
        if (c_dp->parsed()) return detail::cmd_dp(dp_a, kernel);
        if (c_pde->parsed()) return detail::cmd_pde(pde_a, grid_spec, stride);
        if (c_sim->parsed()) return detail::cmd_sim(sim_a, paths, seed, tau, sim_policy);
        if (c_compare->parsed())
            return detail::cmd_compare(compare_a, cmp_kernel, flag_mc, cmp_paths, cmp_seed);
        if (c_sens->parsed()) return detail::cmd_sensitivity(sens_a);
        if (c_verify->parsed()) return detail::cmd_verify(verify_out);
    } catch (const StructuralHypothesisError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_invariant;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numeric;
    }
    return exit_usage;
}

} // namespace pensolve::cli
