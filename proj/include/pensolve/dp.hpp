#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "pensolve/interpolate.hpp"
#include "pensolve/model.hpp"
#include "pensolve/quadrature.hpp"

namespace pensolve {

/// Portfolio return moments for a stock proportion theta.
inline double portfolio_mean(const ModelParams& p, double theta) {
    return theta * p.mu_s + (1.0 - theta) * p.mu_b;
}

inline double portfolio_variance(const ModelParams& p, double theta) {
    const double s = theta * p.sigma_s;
    const double b = (1.0 - theta) * p.sigma_b;
    return s * s + b * b + 2.0 * s * b * p.rho;
}

/// One-period wealth kernels.
///
/// `lognormal` is the continuous-model transition
///   y exp[(mu(theta) - beta - sigma^2(theta)/2) tau + sigma(theta) z sqrt(tau)] + eps tau,
/// valid for any tau > 0. `arithmetic` is the yearly discrete recurrence
///   eps + y (1 + mu(theta) + sigma(theta) z) / (1 + beta),
/// which the original yearly model uses; it admits negative wealth in the
/// far tail, so consumers must treat nonpositive outcomes as ruin.
enum class WealthKernel { lognormal, arithmetic };

inline double dp_transition(const ModelParams& p, WealthKernel kernel, double theta,
                            double y, double z, double eps, double tau) {
    if (!(y >= 0.0)) throw std::domain_error("dp_transition: wealth must be >= 0");
    if (!(tau > 0.0)) throw std::domain_error("dp_transition: tau must be > 0");
    const double mu = portfolio_mean(p, theta);
    const double s2 = portfolio_variance(p, theta);
    if (kernel == WealthKernel::lognormal) {
        return y * std::exp((mu - p.beta - 0.5 * s2) * tau + std::sqrt(s2 * tau) * z) +
               eps * tau;
    }
    if (tau != 1.0)
        throw std::invalid_argument("dp_transition: arithmetic kernel is yearly (tau = 1)");
    return eps + y * (1.0 + mu + std::sqrt(s2) * z) / (1.0 + p.beta);
}

namespace dp_detail {

constexpr double kWealthFloor = 1e-12; // nonpositive outcomes evaluate here

/// Value-function interpolation in transformed coordinates. For d > 1 the
/// values are huge negative powers of y, so ln(-W) against ln(y) is nearly
/// linear and shape-preserving interpolation there is both accurate and
/// overflow-safe; beyond the grid the transform is continued linearly, which
/// reproduces the terminal-utility power asymptote.
class ValueInterp {
public:
    ValueInterp(const std::vector<double>& log_y, const std::vector<double>& W,
                const UtilitySpec& u)
        : form_(u.form) {
        std::vector<double> h(W.size());
        for (std::size_t i = 0; i < W.size(); ++i) h[i] = transform(W[i]);
        pchip_ = Pchip(log_y, std::move(h));
    }

    double operator()(double y) const {
        const double yw = std::max(y, kWealthFloor);
        const double xi = std::log(yw);
        double h;
        if (xi < pchip_.front_x())
            h = pchip_.front_y() + pchip_.front_slope() * (xi - pchip_.front_x());
        else if (xi > pchip_.back_x())
            h = pchip_.back_y() + pchip_.back_slope() * (xi - pchip_.back_x());
        else
            h = pchip_(xi);
        return back_transform(h);
    }

private:
    double transform(double W) const {
        switch (form_) {
            case UtilitySpec::Form::power_negative:
                if (!(W < 0.0))
                    throw std::logic_error("ValueInterp: expected negative values for d > 1");
                return std::log(-W);
            case UtilitySpec::Form::power_positive:
                if (!(W > 0.0))
                    throw std::logic_error("ValueInterp: expected positive values for d < 1");
                return std::log(W);
            case UtilitySpec::Form::log: return W;
        }
        return W;
    }

    double back_transform(double h) const {
        switch (form_) {
            case UtilitySpec::Form::power_negative: return -std::exp(std::min(h, 700.0));
            case UtilitySpec::Form::power_positive: return std::exp(std::min(h, 700.0));
            case UtilitySpec::Form::log: return h;
        }
        return h;
    }

    UtilitySpec::Form form_;
    Pchip pchip_;
};

} // namespace dp_detail

/// Gauss-Hermite expectation of an interpolable next-period value function.
inline double expected_value(const std::function<double(double)>& W_next,
                             const ModelParams& p, WealthKernel kernel, double theta,
                             double y, double eps, const GaussHermite& gh) {
    const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
    double acc = 0.0;
    for (std::size_t i = 0; i < gh.t.size(); ++i) {
        const double z = std::sqrt(2.0) * gh.t[i];
        acc += gh.w[i] * W_next(dp_transition(p, kernel, theta, y, z, eps, 1.0));
    }
    return acc * inv_sqrt_pi;
}

struct DpOptions {
    std::size_t ny = 400;
    double y_min = 0.01, y_max = 50.0; ///< log-spaced wealth grid (yearly salaries)
    int quad_nodes = 32;
    int theta_points = 101;          ///< uniform scan of the admissible set
    double theta_refine_tol = 1e-4;  ///< golden-section bracket width
    WealthKernel kernel = WealthKernel::lognormal;
};

/// Backward-induction solution of the yearly Bellman recursion. Rows are
/// indexed by integer year t; W rows 1..T are populated (W(T, .) = U exactly)
/// and theta rows 1..T-1.
struct ValueGrid {
    std::vector<double> y_grid;
    std::vector<std::vector<double>> W;          ///< [t][iy], t = 1..T
    std::vector<std::vector<double>> theta_star; ///< [t][iy], t = 1..T-1
    int T = 0;
    int quad_nodes = 0;
    WealthKernel kernel = WealthKernel::lognormal;
    double theta_lo = 0.0, theta_hi = 1.0;
};

inline ValueGrid solve_bellman(const ModelParams& p, DpOptions opt = {}) {
    p.validate();
    if (opt.quad_nodes < 8)
        throw std::invalid_argument("solve_bellman: quad_nodes must be >= 8");
    if (opt.theta_points < 3)
        throw std::invalid_argument("solve_bellman: theta_points must be >= 3");
    const int T = static_cast<int>(std::lround(p.T));
    if (T < 2 || std::abs(p.T - T) > 1e-12)
        throw std::invalid_argument("solve_bellman: T must be an integer year count >= 2");

    const double eps = p.eps_net();
    const UtilitySpec u = UtilitySpec::crra(p.d);
    const GaussHermite gh(static_cast<std::size_t>(opt.quad_nodes));

    ValueGrid vg;
    vg.T = T;
    vg.quad_nodes = opt.quad_nodes;
    vg.kernel = opt.kernel;
    vg.theta_lo = p.theta_lo;
    vg.theta_hi = p.theta_hi;
    vg.y_grid.resize(opt.ny);
    std::vector<double> log_y(opt.ny);
    for (std::size_t i = 0; i < opt.ny; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(opt.ny - 1);
        log_y[i] = std::log(opt.y_min) + f * (std::log(opt.y_max) - std::log(opt.y_min));
        vg.y_grid[i] = std::exp(log_y[i]);
    }

    vg.W.assign(T + 1, {});
    vg.theta_star.assign(T, {});
    vg.W[T].resize(opt.ny);
    for (std::size_t i = 0; i < opt.ny; ++i) vg.W[T][i] = utility(u, vg.y_grid[i]);

    // multiplicative return factors are y-independent: precompute per (theta, z)
    const int n_th = opt.theta_points;
    std::vector<double> thetas(n_th);
    for (int j = 0; j < n_th; ++j)
        thetas[j] = p.theta_lo + (p.theta_hi - p.theta_lo) * j / double(n_th - 1);

    std::vector<double> zs(gh.t.size());
    for (std::size_t iz = 0; iz < gh.t.size(); ++iz) zs[iz] = std::sqrt(2.0) * gh.t[iz];
    const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);

    std::vector<std::vector<double>> growth(n_th, std::vector<double>(zs.size()));
    for (int j = 0; j < n_th; ++j) {
        const double mu = portfolio_mean(p, thetas[j]);
        const double s2 = portfolio_variance(p, thetas[j]);
        for (std::size_t iz = 0; iz < zs.size(); ++iz) {
            growth[j][iz] = (opt.kernel == WealthKernel::lognormal)
                                ? std::exp(mu - p.beta - 0.5 * s2 + std::sqrt(s2) * zs[iz])
                                : (1.0 + mu + std::sqrt(s2) * zs[iz]) / (1.0 + p.beta);
        }
    }

    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;

    for (int t = T - 1; t >= 1; --t) {
        const dp_detail::ValueInterp interp(log_y, vg.W[t + 1], u);
        vg.W[t].resize(opt.ny);
        vg.theta_star[t].resize(opt.ny);

        auto ev_growth = [&](const std::vector<double>& gr, double y) {
            double acc = 0.0;
            for (std::size_t iz = 0; iz < zs.size(); ++iz)
                acc += gh.w[iz] * interp(eps + y * gr[iz]);
            return acc * inv_sqrt_pi;
        };
        auto ev_theta = [&](double theta, double y) {
            const double mu = portfolio_mean(p, theta);
            const double s2 = portfolio_variance(p, theta);
            double acc = 0.0;
            for (std::size_t iz = 0; iz < zs.size(); ++iz) {
                const double gr = (opt.kernel == WealthKernel::lognormal)
                                      ? std::exp(mu - p.beta - 0.5 * s2 +
                                                 std::sqrt(s2) * zs[iz])
                                      : (1.0 + mu + std::sqrt(s2) * zs[iz]) / (1.0 + p.beta);
                acc += gh.w[iz] * interp(eps + y * gr);
            }
            return acc * inv_sqrt_pi;
        };

        for (std::size_t iy = 0; iy < opt.ny; ++iy) {
            const double y = vg.y_grid[iy];
            int best = 0;
            double best_val = -std::numeric_limits<double>::infinity();
            for (int j = 0; j < n_th; ++j) {
                const double v = ev_growth(growth[j], y);
                if (v > best_val) {
                    best_val = v;
                    best = j;
                }
            }
            // golden-section pass inside the bracketing grid cells
            double a = thetas[std::max(best - 1, 0)];
            double b = thetas[std::min(best + 1, n_th - 1)];
            double x1 = b - golden * (b - a), x2 = a + golden * (b - a);
            double f1 = ev_theta(x1, y), f2 = ev_theta(x2, y);
            while (b - a > opt.theta_refine_tol) {
                if (f1 < f2) {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + golden * (b - a);
                    f2 = ev_theta(x2, y);
                } else {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - golden * (b - a);
                    f1 = ev_theta(x1, y);
                }
            }
            const double th_star = 0.5 * (a + b);
            const double v_star = ev_theta(th_star, y);
            if (v_star >= best_val) {
                vg.theta_star[t][iy] = th_star;
                vg.W[t][iy] = v_star;
            } else {
                vg.theta_star[t][iy] = thetas[best];
                vg.W[t][iy] = best_val;
            }
        }
    }
    return vg;
}

/// Solves the program twice with nested admissible sets and reports the
/// worst violation of W_small <= W_large over all populated nodes. Enlarging
/// the admissible set can only improve the value function, so the violation
/// should not exceed interpolation noise.
struct SuperoptimalityVerdict {
    double max_violation_abs = 0.0;
    double max_violation_rel = 0.0; ///< scaled by |W_large| (values span ~34 decades)
    int at_t = 0;
    double at_y = 0.0;
};

inline SuperoptimalityVerdict superoptimality_check(const ModelParams& p,
                                                    DpOptions opt, double u_small,
                                                    double u_large) {
    if (!(u_small <= u_large))
        throw std::invalid_argument("superoptimality_check: u_small must be <= u_large");
    ModelParams ps = p;
    ps.theta_hi = u_small;
    ModelParams pl = p;
    pl.theta_hi = u_large;
    // keep the theta scan spacing comparable across the two admissible sets
    DpOptions opt_large = opt;
    opt_large.theta_points = 1 + static_cast<int>(std::lround(
        (opt.theta_points - 1) * (u_large - p.theta_lo) / (u_small - p.theta_lo)));
    const ValueGrid small = solve_bellman(ps, opt);
    const ValueGrid large = solve_bellman(pl, opt_large);

    SuperoptimalityVerdict v;
    for (int t = 1; t <= small.T; ++t) {
        for (std::size_t iy = 0; iy < small.y_grid.size(); ++iy) {
            const double gap = small.W[t][iy] - large.W[t][iy];
            const double rel = gap / std::max(std::abs(large.W[t][iy]), 1e-300);
            v.max_violation_abs = std::max(v.max_violation_abs, gap);
            if (rel > v.max_violation_rel) {
                v.max_violation_rel = rel;
                v.at_t = t;
                v.at_y = small.y_grid[iy];
            }
        }
    }
    return v;
}

} // namespace pensolve
