#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "pensolve/model.hpp"
#include "pensolve/numerics.hpp"

namespace pensolve {

/// The two decay rates generating the comparison functions. The source
/// theorem labels them lambda-underbar = alpha + c^2 and lambda-bar =
/// alpha - d c^2; note that the underbar rate is always the LARGER one
/// (their difference is (d+1)c^2 > 0), so the varsigma built from it is the
/// SMALLER function. See orientation_report for which branch ends up as
/// which side of each envelope.
struct BoundRates {
    double lambda_lower = 0.0; ///< alpha + c^2   (labelled lambda-underbar)
    double lambda_upper = 0.0; ///< alpha - d c^2 (labelled lambda-bar, = delta)
};

inline BoundRates bound_rates(const DerivedCoefficients& k) {
    return {k.alpha + k.c2(), k.alpha - k.d * k.c2()};
}

/// varsigma(s) = eps (1 - exp(-lambda s)) / lambda: the unique solution of
/// varsigma' = eps - lambda varsigma, varsigma(0) = 0. Nonnegative and
/// nondecreasing for every real lambda when eps, s >= 0.
inline double varsigma(double lambda, double eps, double s) {
    return eps * stable_expm_ratio(lambda, s);
}

struct Envelope {
    double lower = 0.0;
    double upper = 0.0;
};

/// Two-sided bound on psi(s, x): gamma*d / (1 + varsigma(s) e^{-x}) with the
/// two varsigma branches. Returned numerically oriented (lower <= upper):
/// the slower rate delta = alpha - d c^2 produces the larger varsigma and
/// hence the lower psi bound.
inline Envelope psi_envelope(const DerivedCoefficients& k, double eps, double s,
                             double x) {
    k.require_hypothesis("psi_envelope");
    const BoundRates r = bound_rates(k);
    const double ex = std::exp(-x);
    const double from_slow = k.psi0() / (1.0 + varsigma(r.lambda_upper, eps, s) * ex);
    const double from_fast = k.psi0() / (1.0 + varsigma(r.lambda_lower, eps, s) * ex);
    return {std::min(from_slow, from_fast), std::max(from_slow, from_fast)};
}

/// Two-sided bound on the intermediate utility V(t, y) for the power utility
/// (d > 1): -(y + varsigma(T-t))^{1-d} with the two branches, numerically
/// oriented.
inline Envelope value_envelope(const DerivedCoefficients& k, double eps, double t,
                               double y) {
    k.require_hypothesis("value_envelope");
    if (!(y > 0.0)) throw std::domain_error("value_envelope: wealth must be > 0");
    if (!(k.d > 1.0))
        throw std::invalid_argument("value_envelope: stated for the power form d > 1");
    const BoundRates r = bound_rates(k);
    const double s = k.T - t;
    const double v1 = -std::pow(y + varsigma(r.lambda_upper, eps, s), 1.0 - k.d);
    const double v2 = -std::pow(y + varsigma(r.lambda_lower, eps, s), 1.0 - k.d);
    return {std::min(v1, v2), std::max(v1, v2)};
}

/// Bracket for the optimal stock proportion,
///   b/a + (delta_mu/(a d)) (1 + varsigma(T-t)/y)
/// with the two varsigma branches. Field names follow the source theorem's
/// pairing: `lower` carries the lambda-bar (= delta) branch — the one the
/// first-order policy reproduces exactly — and `upper` the lambda-underbar
/// branch. Numerically the delta branch is the larger end (see
/// orientation_report); use lo()/hi() for the ordered pair.
struct ThetaBracket {
    double lower = 0.0; ///< delta branch; identical to theta_first_order
    double upper = 0.0; ///< alpha + c^2 branch

    double lo() const { return std::min(lower, upper); }
    double hi() const { return std::max(lower, upper); }
};

inline ThetaBracket theta_bracket(const DerivedCoefficients& k, double eps,
                                  double t, double y) {
    k.require_hypothesis("theta_bracket");
    if (!(y > 0.0)) throw std::domain_error("theta_bracket: wealth must be > 0");
    const BoundRates r = bound_rates(k);
    const double s = k.T - t;
    const double base = k.b / k.a;
    const double excess = k.delta_mu / (k.a * k.d);
    return {base + excess * (1.0 + varsigma(r.lambda_upper, eps, s) / y),
            base + excess * (1.0 + varsigma(r.lambda_lower, eps, s) / y)};
}

/// Which branch the data supports on which side of the psi envelope. The
/// source theorem's lambda labels pair the branches the other way around;
/// this report records the orientation actually observed, which downstream
/// checks (finite-difference containment) validate.
struct OrientationReport {
    double rate_psi_lower = 0.0;   ///< rate generating the lower psi bound
    double rate_psi_upper = 0.0;   ///< rate generating the upper psi bound
    bool labels_swapped = false;   ///< true: theorem labels invert the numeric order
    std::string summary;
};

inline OrientationReport orientation_report(const DerivedCoefficients& k) {
    k.require_hypothesis("orientation_report");
    const BoundRates r = bound_rates(k);
    // varsigma is decreasing in lambda, psi_bound decreasing in varsigma:
    // the smaller rate yields the lower psi bound.
    OrientationReport rep;
    rep.rate_psi_lower = std::min(r.lambda_upper, r.lambda_lower);
    rep.rate_psi_upper = std::max(r.lambda_upper, r.lambda_lower);
    rep.labels_swapped = r.lambda_upper < r.lambda_lower; // always true: difference (d+1)c^2
    rep.summary =
        "psi lower bound generated by rate " + std::to_string(rep.rate_psi_lower) +
        " (= alpha - d c^2), upper by rate " + std::to_string(rep.rate_psi_upper) +
        " (= alpha + c^2); the first-order policy coincides with the delta-branch "
        "end of the theta bracket, numerically its upper end";
    return rep;
}

} // namespace pensolve
