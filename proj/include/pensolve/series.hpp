#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "pensolve/interpolate.hpp"
#include "pensolve/model.hpp"
#include "pensolve/numerics.hpp"
#include "pensolve/quadrature.hpp"

namespace pensolve {

/// Query point for the transformed solution: s = time to maturity (yr),
/// x = ln(wealth in yearly salaries).
struct PsiQuery {
    double s = 0.0;
    double x = 0.0;
};

/// A psi evaluation together with the magnitude of the last retained series
/// term (truncation indicator). A nonpositive value is flagged invalid
/// rather than clamped: the policy formula divides by psi, and a sign flip
/// means the truncated expansion left its region of validity.
struct PsiValue {
    double value = 0.0;
    double last_term = 0.0;
    bool valid = false;
};

namespace series_detail {

/// Decay/growth constant of the n-th mode equation:
/// K_n = (c^2/2) [ n(n-1)(1 + 1/phi0^2) - 2 n alpha / c^2 + 2 n d ].
inline double mode_constant(const DerivedCoefficients& k, int n) {
    const double p0 = k.psi0();
    return 0.5 * k.c2() * (n * (n - 1.0) * (1.0 + 1.0 / (p0 * p0))) - n * k.delta;
}

} // namespace series_detail

/// First-order time profile: Phi_1(s) = d gamma (e^{-delta s} - 1)/delta,
/// evaluated through the stable ratio so delta near 0 is exact. Nonpositive
/// for all s >= 0.
inline double phi1_closed_form(const DerivedCoefficients& k, double s) {
    return -k.d * k.gamma * stable_expm_ratio(k.delta, s);
}

namespace series_detail {

struct Xi2Coeffs {
    double P, Q, R; // xi_2(z) = P e^{-2 delta z} + Q e^{-delta z} + R
};

inline Xi2Coeffs xi2_coeffs(const DerivedCoefficients& k) {
    const double p0 = k.psi0();
    const double C1 = k.c2() * (1.0 / k.gamma - 1.0 / (p0 * p0 * p0));
    const double A = k.d * k.gamma / k.delta;
    const double P = C1 * A * A;
    return {P, -2.0 * (P + A), P + 2.0 * A};
}

inline double xi2(const DerivedCoefficients& k, double z) {
    const double p1 = phi1_closed_form(k, z);
    const double p0 = k.psi0();
    return k.c2() * (1.0 / k.gamma - 1.0 / (p0 * p0 * p0)) * p1 * p1 - 2.0 * p1;
}

} // namespace series_detail

/// Second-order profile by the exponential antiderivative:
/// Phi_2(s) = e^{K2 s} [ P r(2 delta + K2, s) + Q r(delta + K2, s) + R r(K2, s) ]
/// with r the stable ratio. Exact up to roundoff.
inline double phi2_analytic(const DerivedCoefficients& k, double s) {
    const auto [P, Q, R] = series_detail::xi2_coeffs(k);
    const double K2 = series_detail::mode_constant(k, 2);
    return std::exp(K2 * s) * (P * stable_expm_ratio(2.0 * k.delta + K2, s) +
                               Q * stable_expm_ratio(k.delta + K2, s) +
                               R * stable_expm_ratio(K2, s));
}

/// Second-order profile by adaptive quadrature of the variation-of-constants
/// integral. Throws NumericError when the tolerance cannot be met.
inline double phi2_quadrature(const DerivedCoefficients& k, double s,
                              double quad_tol = 1e-10) {
    if (s == 0.0) return 0.0;
    const double K2 = series_detail::mode_constant(k, 2);
    return adaptive_simpson(
        [&](double z) { return series_detail::xi2(k, z) * std::exp(K2 * (s - z)); },
        0.0, s, quad_tol);
}

/// The second-order profile with both evaluation paths cross-checked.
/// Returns the analytic value; throws NumericError if the two disagree
/// beyond the combined tolerance.
inline double psi2_closed_form(const DerivedCoefficients& k, double s,
                               double quad_tol = 1e-10) {
    const double analytic = phi2_analytic(k, s);
    const double quad = phi2_quadrature(k, s, quad_tol);
    const double scale = std::max({std::abs(analytic), std::abs(quad), 1.0});
    if (std::abs(analytic - quad) > 1e-9 * scale)
        throw NumericError("psi2_closed_form: analytic and quadrature paths disagree: " +
                           std::to_string(analytic) + " vs " + std::to_string(quad));
    return analytic;
}

struct SeriesBuildOptions {
    std::size_t s_steps = 2001; ///< nodes of the uniform s tabulation on [0, T]
    int closed_form_max = 2;    ///< orders built from closed forms (rest by recurrence)
};

/// Truncated expansion psi(s, x) = sum_n eps^n Phi_n(s) e^{-n x}.
///
/// The time profiles Phi_n and the reciprocal profiles Omega_n are tabulated
/// on a uniform s-grid and interpolated with cubic splines. Profiles do not
/// depend on the contribution rate; eps enters only at evaluation time, so
/// one build serves any eps.
class SeriesSolution {
public:
    static SeriesSolution build(const DerivedCoefficients& k, int order,
                                SeriesBuildOptions opt = {}) {
        if (order < 0) throw std::invalid_argument("SeriesSolution: order must be >= 0");
        if (opt.s_steps < 4) throw std::invalid_argument("SeriesSolution: s_steps must be >= 4");
        SeriesSolution sol;
        sol.coeffs_ = k;
        sol.order_ = order;
        const std::size_t ns = opt.s_steps;
        sol.s_.resize(ns);
        for (std::size_t j = 0; j < ns; ++j)
            sol.s_[j] = k.T * static_cast<double>(j) / static_cast<double>(ns - 1);

        const double p0 = k.psi0();
        sol.phi_.push_back(std::vector<double>(ns, p0));
        sol.omega_.push_back(std::vector<double>(ns, 1.0 / p0));

        for (int n = 1; n <= order; ++n) {
            std::vector<double> vals(ns, 0.0);
            if (n <= opt.closed_form_max && n == 1) {
                for (std::size_t j = 0; j < ns; ++j)
                    vals[j] = phi1_closed_form(k, sol.s_[j]);
            } else if (n <= opt.closed_form_max && n == 2) {
                for (std::size_t j = 0; j < ns; ++j)
                    vals[j] = phi2_analytic(k, sol.s_[j]);
            } else {
                vals = sol.tabulate_recurrence(n);
            }
            sol.phi_.push_back(std::move(vals));

            // Omega_n = -(1/Phi_0) sum_{k=0}^{n-1} Omega_k Phi_{n-k}, pointwise
            std::vector<double> om(ns, 0.0);
            for (std::size_t j = 0; j < ns; ++j) {
                double acc = 0.0;
                for (int kk = 0; kk < n; ++kk)
                    acc += sol.omega_[kk][j] * sol.phi_[n - kk][j];
                om[j] = -acc / p0;
            }
            sol.omega_.push_back(std::move(om));

            sol.phi_spline_.push_back(CubicSpline(sol.s_, sol.phi_[n]));
            sol.omega_spline_.push_back(CubicSpline(sol.s_, sol.omega_[n]));
        }
        return sol;
    }

    int order() const { return order_; }
    const DerivedCoefficients& coeffs() const { return coeffs_; }
    const std::vector<double>& s_grid() const { return s_; }
    const std::vector<double>& phi_table(int n) const { return phi_.at(n); }
    const std::vector<double>& omega_table(int n) const { return omega_.at(n); }

    /// Interpolated Phi_n(s); order 0 is the constant gamma*d.
    double phi(int n, double s) const {
        if (n == 0) return coeffs_.psi0();
        return phi_spline_.at(n - 1)(s);
    }

    /// Interpolated Omega_n(s); order 0 is the constant 1/(gamma*d).
    double omega(int n, double s) const {
        if (n == 0) return 1.0 / coeffs_.psi0();
        return omega_spline_.at(n - 1)(s);
    }

    /// Right-hand side driver xi_n(z) of the n-th mode equation, built from
    /// the convolution of lower-order profiles.
    double xi(int n, double z) const {
        const double p0 = coeffs_.psi0();
        double conv_po = 0.0, conv_pp = 0.0;
        for (int kk = 1; kk < n; ++kk) {
            conv_po += phi(n - kk, z) * omega(kk, z);
            conv_pp += phi(n - kk, z) * phi(kk, z);
        }
        return 0.5 * coeffs_.c2() * n * (n - 1.0) / p0 * conv_po -
               n * phi(n - 1, z) +
               0.5 * coeffs_.c2() * n / coeffs_.gamma * conv_pp;
    }

    double mode_constant(int n) const { return series_detail::mode_constant(coeffs_, n); }

    /// sum_{n<=N} eps^n Phi_n(s) e^{-n x}, with the last term reported as a
    /// truncation indicator and nonpositive results flagged invalid.
    PsiValue eval(PsiQuery q, double eps) const {
        if (!(q.s >= 0.0 && q.s <= coeffs_.T))
            throw std::domain_error("SeriesSolution::eval: s outside [0, T]");
        if (!(eps >= 0.0)) throw std::domain_error("SeriesSolution::eval: eps must be >= 0");
        const double em = std::exp(-q.x);
        double total = 0.0, term = coeffs_.psi0(), weight = 1.0;
        for (int n = 0; n <= order_; ++n) {
            if (n > 0) {
                weight *= eps * em;
                term = phi(n, q.s) * weight;
            }
            total += term;
        }
        PsiValue out;
        out.value = total;
        out.last_term = std::abs(order_ == 0 ? coeffs_.psi0() : term);
        out.valid = total > 0.0;
        return out;
    }

private:
    /// Variation-of-constants tabulation, advanced panel by panel:
    /// Phi_n(s_{j+1}) = e^{K_n ds} Phi_n(s_j) + int_{s_j}^{s_{j+1}} xi_n(z)
    /// e^{K_n (s_{j+1} - z)} dz with a 16-point Gauss-Legendre panel.
    std::vector<double> tabulate_recurrence(int n) const {
        const double Kn = series_detail::mode_constant(coeffs_, n);
        const std::size_t ns = s_.size();
        std::vector<double> vals(ns, 0.0);
        for (std::size_t j = 1; j < ns; ++j) {
            const double z0 = s_[j - 1], z1 = s_[j];
            const double panel = GaussLegendre16::integrate(
                [&](double z) { return xi(n, z) * std::exp(Kn * (z1 - z)); }, z0, z1);
            vals[j] = vals[j - 1] * std::exp(Kn * (z1 - z0)) + panel;
        }
        return vals;
    }

    DerivedCoefficients coeffs_;
    int order_ = 0;
    std::vector<double> s_;
    std::vector<std::vector<double>> phi_, omega_;
    std::vector<CubicSpline> phi_spline_, omega_spline_; // orders 1..N
};

} // namespace pensolve
