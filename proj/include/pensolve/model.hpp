#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "pensolve/errors.hpp"

namespace pensolve {

/// Calibrated market and saver inputs. All rates are plain yearly fractions
/// (0.1028, not 10.28%); horizons are in years; wealth is measured in
/// multiples of the current yearly salary.
struct ModelParams {
    double mu_s = 0.0;     ///< mean yearly stock return
    double mu_b = 0.0;     ///< mean yearly bond return
    double sigma_s = 0.0;  ///< stock volatility (per sqrt(yr))
    double sigma_b = 0.0;  ///< bond volatility (per sqrt(yr))
    double rho = 0.0;      ///< stock-bond correlation, in [-1, 1]
    double beta = 0.0;     ///< wage growth rate
    double eps_gross = 0.0;///< gross contribution rate (fraction of salary / yr)
    double kappa = 0.0;    ///< management fee rate, in [0, 1)
    double d = 0.0;        ///< relative risk aversion, > 0
    double T = 0.0;        ///< saving horizon in years
    double theta_lo = 0.0; ///< admissible stock proportion, lower end
    double theta_hi = 1.0; ///< admissible stock proportion, upper end

    /// When set, overrides the net contribution rate (1-kappa)*eps_gross.
    std::optional<double> eps_override;

    double eps_net() const {
        return eps_override ? *eps_override : (1.0 - kappa) * eps_gross;
    }

    /// Throws std::invalid_argument naming the offending field.
    void validate() const {
        if (!(sigma_s > 0.0)) throw std::invalid_argument("sigma_s must be > 0");
        if (!(sigma_b > 0.0)) throw std::invalid_argument("sigma_b must be > 0");
        if (!(rho >= -1.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [-1,1]");
        if (!(T > 0.0)) throw std::invalid_argument("T must be > 0");
        if (!(theta_lo >= 0.0 && theta_lo < theta_hi))
            throw std::invalid_argument("theta_lo/theta_hi must satisfy 0 <= lo < hi");
        if (!(eps_gross >= 0.0)) throw std::invalid_argument("eps_gross must be >= 0");
        if (!(kappa >= 0.0 && kappa < 1.0)) throw std::invalid_argument("kappa must lie in [0,1)");
        if (!(d > 0.0)) throw std::invalid_argument("d must be > 0");
        if (eps_override && !(*eps_override >= 0.0))
            throw std::invalid_argument("eps override must be >= 0");
    }
};

/// Verdict of the structural market hypothesis: b > 0, a > b, delta_mu > 0.
/// A failed verdict is reported, not thrown; operations whose theorems rely
/// on the hypothesis refuse to run on failure.
struct HypothesisVerdict {
    bool b_positive = false;
    bool a_above_b = false;
    bool dmu_positive = false;

    bool holds() const { return b_positive && a_above_b && dmu_positive; }

    std::string failure() const {
        if (holds()) return {};
        std::string out;
        if (!b_positive) out += "b <= 0 (requires sigma_b - rho*sigma_s > 0); ";
        if (!a_above_b) out += "a <= b (requires sigma_s - rho*sigma_b > 0); ";
        if (!dmu_positive) out += "delta_mu <= 0 (requires mu_s > mu_b); ";
        return out;
    }
};

/// Everything downstream of the raw inputs: variance spreads, the fee-netted
/// contribution rate, and the reduced-equation constants.
struct DerivedCoefficients {
    double a = 0.0;        ///< sigma_s^2 + sigma_b^2 - 2 rho sigma_s sigma_b
    double b = 0.0;        ///< sigma_b (sigma_b - rho sigma_s)
    double delta_mu = 0.0; ///< mu_s - mu_b
    double alpha = 0.0;    ///< mu_b - beta + (b/a) delta_mu
    double c = 0.0;        ///< sigma_b sigma_s sqrt((1-rho^2)/a)
    double gamma = 0.0;    ///< c sqrt(a) / delta_mu
    double delta = 0.0;    ///< alpha - d c^2
    double eps_net = 0.0;  ///< (1-kappa) eps_gross, or the override
    HypothesisVerdict hypothesis;

    // carried from the inputs; nearly every downstream formula needs them
    double d = 0.0;
    double T = 0.0;

    double c2() const { return c * c; }
    double psi0() const { return gamma * d; } ///< gamma*d, the zeroth-order psi

    void require_hypothesis(const char* who) const {
        if (!hypothesis.holds())
            throw StructuralHypothesisError(std::string(who) +
                                            ": structural hypothesis failed: " +
                                            hypothesis.failure());
    }
};

/// Pure, deterministic. Hypothesis failure is recorded in the verdict.
inline DerivedCoefficients derive_coefficients(const ModelParams& p) {
    p.validate();
    DerivedCoefficients k;
    k.a = p.sigma_s * p.sigma_s + p.sigma_b * p.sigma_b -
          2.0 * p.rho * p.sigma_s * p.sigma_b;
    k.b = p.sigma_b * (p.sigma_b - p.rho * p.sigma_s);
    k.delta_mu = p.mu_s - p.mu_b;
    k.alpha = p.mu_b - p.beta + (k.b / k.a) * k.delta_mu;
    k.c = p.sigma_b * p.sigma_s * std::sqrt((1.0 - p.rho * p.rho) / k.a);
    k.gamma = k.c * std::sqrt(k.a) / k.delta_mu;
    k.delta = k.alpha - p.d * k.c * k.c;
    k.eps_net = p.eps_net();
    k.hypothesis.b_positive = k.b > 0.0;
    k.hypothesis.a_above_b = k.a > k.b;
    k.hypothesis.dmu_positive = k.delta_mu > 0.0;
    k.d = p.d;
    k.T = p.T;
    return k;
}

/// Risk-aversion level above which the terminal optimal stock proportion is
/// guaranteed not to exceed 1: delta_mu / (a - b).
inline double risk_aversion_threshold(const DerivedCoefficients& k) {
    k.require_hypothesis("risk_aversion_threshold");
    return k.delta_mu / (k.a - k.b);
}

/// CRRA utility family, indexed by the relative risk aversion d.
struct UtilitySpec {
    enum class Form { power_negative, log, power_positive };
    double d = 0.0;
    Form form = Form::power_negative;

    static UtilitySpec crra(double d) {
        if (!(d > 0.0)) throw std::invalid_argument("UtilitySpec: d must be > 0");
        UtilitySpec u;
        u.d = d;
        u.form = d > 1.0 ? Form::power_negative
                         : (d == 1.0 ? Form::log : Form::power_positive);
        return u;
    }
};

/// U(y): -y^(1-d) for d>1, ln y for d=1, y^(1-d) for d<1. Strictly
/// increasing and strictly concave for y > 0.
inline double utility(const UtilitySpec& u, double y) {
    if (!(y > 0.0)) throw std::domain_error("utility: wealth must be > 0");
    switch (u.form) {
        case UtilitySpec::Form::log: return std::log(y);
        case UtilitySpec::Form::power_negative: return -std::pow(y, 1.0 - u.d);
        case UtilitySpec::Form::power_positive: return std::pow(y, 1.0 - u.d);
    }
    return 0.0; // unreachable
}

/// Initial condition of the transformed equation, -gamma U''(e^x)/U'(e^x) e^x.
/// For the CRRA family -y U''(y)/U'(y) == d identically, so the value is
/// gamma*d for every x.
inline double initial_psi(const UtilitySpec& u, const DerivedCoefficients& k,
                          double /*x*/) {
    return k.gamma * u.d;
}

} // namespace pensolve
