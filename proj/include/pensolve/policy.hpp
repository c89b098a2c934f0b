#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pensolve/bounds.hpp"
#include "pensolve/model.hpp"
#include "pensolve/numerics.hpp"
#include "pensolve/series.hpp"

namespace pensolve {

/// Optimal stock proportion from a psi value: b/a + gamma delta_mu / (a psi).
/// Strictly decreasing in psi.
inline double theta_from_psi(const DerivedCoefficients& k, double psi) {
    if (!(psi > 0.0))
        throw InvalidPsiError("theta_from_psi: psi must be > 0, got " + std::to_string(psi));
    return k.b / k.a + k.gamma * k.delta_mu / (k.a * psi);
}

/// The (t, y)-independent optimum for a saver with no future contributions:
/// b/a + delta_mu/(a d).
inline double theta_merton(const DerivedCoefficients& k) {
    return k.b / k.a + k.delta_mu / (k.a * k.d);
}

/// First-order closed form,
///   b/a + (delta_mu/(a d)) [1 + (eps/y) (1 - e^{-delta (T-t)})/delta].
/// Identical to the delta branch of theta_bracket.
inline double theta_first_order(const DerivedCoefficients& k, double eps, double t,
                                double y) {
    if (!(y > 0.0)) throw std::domain_error("theta_first_order: wealth must be > 0");
    return k.b / k.a +
           k.delta_mu / (k.a * k.d) * (1.0 + varsigma(k.delta, eps, k.T - t) / y);
}

enum class SensitivityParam { eps, kappa, d, mu_s, beta, t, y };

inline const char* to_string(SensitivityParam p) {
    switch (p) {
        case SensitivityParam::eps: return "eps";
        case SensitivityParam::kappa: return "kappa";
        case SensitivityParam::d: return "d";
        case SensitivityParam::mu_s: return "mu_s";
        case SensitivityParam::beta: return "beta";
        case SensitivityParam::t: return "t";
        case SensitivityParam::y: return "y";
    }
    return "?";
}

inline SensitivityParam sensitivity_param_from_string(const std::string& s) {
    if (s == "eps") return SensitivityParam::eps;
    if (s == "kappa") return SensitivityParam::kappa;
    if (s == "d") return SensitivityParam::d;
    if (s == "mu_s") return SensitivityParam::mu_s;
    if (s == "beta") return SensitivityParam::beta;
    if (s == "t") return SensitivityParam::t;
    if (s == "y") return SensitivityParam::y;
    throw std::invalid_argument("unknown sensitivity parameter: " + s);
}

/// Auxiliary time profiles of the d-, mu_s- and beta-sensitivities. Each
/// satisfies omega(0) = 0; their derivatives have the simple forms checked
/// by the finite-difference tests.
///
/// omega_beta is the shared kernel [(1-e^{-delta s})/delta - s e^{-delta s}]
/// / delta; the other two are g(delta, s) - const * omega_beta(s), which is
/// how they are evaluated so that delta near 0 stays exact.
inline double omega_beta(const DerivedCoefficients& k, double s) {
    // omega'(s) = s e^{-delta s}
    const double u = k.delta * s;
    if (std::abs(u) < 1e-4)
        return s * s * (0.5 - u / 3.0 + u * u / 8.0 - u * u * u / 30.0);
    return (stable_expm_ratio(k.delta, s) - s * std::exp(-u)) / k.delta;
}

inline double omega_d(const DerivedCoefficients& k, double s) {
    // omega'(s) = (1 - s d c^2) e^{-delta s}
    return stable_expm_ratio(k.delta, s) - k.d * k.c2() * omega_beta(k, s);
}

inline double omega_mu_s(const DerivedCoefficients& k, double s) {
    // omega'(s) = (1 - s delta_mu b/a) e^{-delta s}
    return stable_expm_ratio(k.delta, s) -
           (k.delta_mu * k.b / k.a) * omega_beta(k, s);
}

struct SensitivityResult {
    double value = 0.0;
    /// Whether the sign-guarantee precondition for this parameter holds
    /// (always true for parameters with an unconditional sign).
    bool sign_guarantee = true;
};

/// Closed-form partial derivative of the first-order policy with respect to
/// the chosen parameter, evaluated at (t, y). `eps_gross` and `kappa` are
/// only needed for the kappa derivative (eps = (1-kappa) eps_gross).
inline SensitivityResult sensitivity(const DerivedCoefficients& k, double eps,
                                     double t, double y, SensitivityParam which,
                                     double eps_gross = 0.0) {
    if (!(y > 0.0)) throw std::domain_error("sensitivity: wealth must be > 0");
    if (!(t < k.T) && which != SensitivityParam::y)
        throw std::domain_error("sensitivity: stated for t < T");
    const double s = k.T - t;
    const double g = stable_expm_ratio(k.delta, s);
    const double excess = k.delta_mu / (k.a * k.d);
    SensitivityResult out;
    switch (which) {
        case SensitivityParam::eps:
            out.value = excess * g / y;
            break;
        case SensitivityParam::kappa:
            out.value = -eps_gross * excess * g / y;
            break;
        case SensitivityParam::d:
            out.value = -(k.delta_mu / (k.a * k.d * k.d)) *
                        (1.0 + (eps / y) * omega_d(k, s));
            out.sign_guarantee = k.d <= 1.0 / (k.c2() * k.T);
            break;
        case SensitivityParam::mu_s:
            out.value = (1.0 / (k.a * k.d)) * (1.0 + (eps / y) * omega_mu_s(k, s));
            out.sign_guarantee = k.delta_mu < k.a / (k.b * k.T);
            break;
        case SensitivityParam::beta:
            out.value = excess * (eps / y) * omega_beta(k, s);
            break;
        case SensitivityParam::t:
            out.value = -excess * (eps / y) * std::exp(-k.delta * s);
            break;
        case SensitivityParam::y:
            out.value = -excess * (eps / (y * y)) * g;
            break;
    }
    return out;
}

/// Threshold of the sign-guarantee precondition for the d- and mu_s-
/// sensitivities. `quoted` carries a reference value supplied by the
/// scenario (calibration write-ups circulate their own figures, which do not
/// always match direct recomputation; both are reported, never reconciled).
struct PreconditionReport {
    double threshold = 0.0;      ///< recomputed from the coefficients
    double compared_value = 0.0; ///< the quantity the threshold bounds
    bool satisfied = false;
    std::optional<double> quoted;
};

inline PreconditionReport sensitivity_precondition(const DerivedCoefficients& k,
                                                   SensitivityParam which) {
    k.require_hypothesis("sensitivity_precondition");
    PreconditionReport rep;
    switch (which) {
        case SensitivityParam::d:
            rep.threshold = 1.0 / (k.c2() * k.T); // d must stay below this
            rep.compared_value = k.d;
            rep.satisfied = k.d <= rep.threshold;
            return rep;
        case SensitivityParam::mu_s:
            rep.threshold = k.a / (k.b * k.T); // delta_mu must stay below this
            rep.compared_value = k.delta_mu;
            rep.satisfied = k.delta_mu < rep.threshold;
            return rep;
        default:
            throw std::invalid_argument(
                "sensitivity_precondition: only d and mu_s carry preconditions");
    }
}

/// theta evaluator: returns the unclipped policy value at (t, y), or nullopt
/// where the backing psi source is invalid.
using ThetaSource = std::function<std::optional<double>(double t, double y)>;

inline ThetaSource theta_source_first_order(const DerivedCoefficients& k, double eps) {
    return [k, eps](double t, double y) -> std::optional<double> {
        return theta_first_order(k, eps, t, y);
    };
}

/// Adapts any psi backend (series, finite differences, envelope midpoint).
inline ThetaSource theta_source_from_psi(
    const DerivedCoefficients& k,
    std::function<PsiValue(double s, double x)> psi_source) {
    return [k, psi = std::move(psi_source)](double t, double y) -> std::optional<double> {
        const PsiValue v = psi(k.T - t, std::log(y));
        if (!v.valid) return std::nullopt;
        return theta_from_psi(k, v.value);
    };
}

inline ThetaSource theta_source_series(SeriesSolution sol, double eps) {
    auto shared = std::make_shared<SeriesSolution>(std::move(sol));
    const DerivedCoefficients k = shared->coeffs();
    return [k, shared, eps](double t, double y) -> std::optional<double> {
        const PsiValue v = shared->eval({k.T - t, std::log(y)}, eps);
        if (!v.valid) return std::nullopt;
        return theta_from_psi(k, v.value);
    };
}

/// Policy sampled on a (t, y) grid, raw and clipped to the admissible set.
struct PolicySurface {
    std::vector<double> t_grid;
    std::vector<double> y_grid;
    std::vector<std::vector<double>> theta_raw;     ///< [it][iy]; NaN where invalid
    std::vector<std::vector<double>> theta_clipped; ///< min{u, max{l, raw}}
    std::vector<std::vector<bool>> valid;
    double clip_lo = 0.0, clip_hi = 1.0;
    std::string source;

    /// Fractions of interior grid edges with decreasing raw theta.
    double frac_decreasing_t = 0.0;
    double frac_decreasing_y = 0.0;
    std::size_t invalid_count = 0;
};

inline double clip(double x, double lo, double hi) {
    return std::min(hi, std::max(lo, x));
}

inline PolicySurface build_policy_surface(const ThetaSource& source,
                                          const std::vector<double>& t_grid,
                                          const std::vector<double>& y_grid,
                                          double clip_lo, double clip_hi,
                                          std::string source_name = {}) {
    if (t_grid.empty() || y_grid.empty())
        throw std::invalid_argument("build_policy_surface: empty grid");
    for (std::size_t i = 0; i + 1 < t_grid.size(); ++i)
        if (!(t_grid[i + 1] > t_grid[i]))
            throw std::invalid_argument("build_policy_surface: t grid must increase");
    for (std::size_t i = 0; i + 1 < y_grid.size(); ++i)
        if (!(y_grid[i + 1] > y_grid[i]))
            throw std::invalid_argument("build_policy_surface: y grid must increase");

    PolicySurface surf;
    surf.t_grid = t_grid;
    surf.y_grid = y_grid;
    surf.clip_lo = clip_lo;
    surf.clip_hi = clip_hi;
    surf.source = std::move(source_name);
    const std::size_t nt = t_grid.size(), ny = y_grid.size();
    surf.theta_raw.assign(nt, std::vector<double>(ny, std::nan("")));
    surf.theta_clipped.assign(nt, std::vector<double>(ny, std::nan("")));
    surf.valid.assign(nt, std::vector<bool>(ny, false));

    for (std::size_t it = 0; it < nt; ++it) {
        for (std::size_t iy = 0; iy < ny; ++iy) {
            const auto th = source(t_grid[it], y_grid[iy]);
            if (!th) {
                ++surf.invalid_count;
                continue;
            }
            surf.theta_raw[it][iy] = *th;
            surf.theta_clipped[it][iy] = clip(*th, clip_lo, clip_hi);
            surf.valid[it][iy] = true;
        }
    }

    // monotonicity diagnostics on the raw surface
    std::size_t dec_t = 0, tot_t = 0, dec_y = 0, tot_y = 0;
    for (std::size_t it = 0; it < nt; ++it)
        for (std::size_t iy = 0; iy < ny; ++iy) {
            if (it + 1 < nt && surf.valid[it][iy] && surf.valid[it + 1][iy]) {
                ++tot_t;
                if (surf.theta_raw[it + 1][iy] < surf.theta_raw[it][iy]) ++dec_t;
            }
            if (iy + 1 < ny && surf.valid[it][iy] && surf.valid[it][iy + 1]) {
                ++tot_y;
                if (surf.theta_raw[it][iy + 1] < surf.theta_raw[it][iy]) ++dec_y;
            }
        }
    surf.frac_decreasing_t = tot_t ? static_cast<double>(dec_t) / tot_t : 0.0;
    surf.frac_decreasing_y = tot_y ? static_cast<double>(dec_y) / tot_y : 0.0;
    return surf;
}

} // namespace pensolve
