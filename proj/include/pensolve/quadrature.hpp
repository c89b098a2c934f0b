#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "pensolve/errors.hpp"

namespace pensolve {

/// 16-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre16 {
    static constexpr std::array<double, 16> nodes = {
        -0.98940093499164994, -0.9445750230732326,  -0.86563120238783176,
        -0.755404408355003,   -0.61787624440264377, -0.45801677765722737,
        -0.28160355077925892, -0.095012509837637454, 0.095012509837637454,
         0.28160355077925892,  0.45801677765722737,  0.61787624440264377,
         0.755404408355003,    0.86563120238783176,  0.9445750230732326,
         0.98940093499164994};
    static constexpr std::array<double, 16> weights = {
        0.027152459411754037, 0.062253523938647706, 0.095158511682492591,
        0.12462897125553403,  0.14959598881657676,  0.16915651939500262,
        0.18260341504492361,  0.18945061045506859,  0.18945061045506859,
        0.18260341504492361,  0.16915651939500262,  0.14959598881657676,
        0.12462897125553403,  0.095158511682492591, 0.062253523938647706,
        0.027152459411754037};

    /// Integrates f over [a, b] with a single panel.
    template <typename F>
    static double integrate(F&& f, double a, double b) {
        const double h = 0.5 * (b - a);
        const double m = 0.5 * (a + b);
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            acc += weights[i] * f(m + h * nodes[i]);
        return h * acc;
    }
};

/// Gauss-Hermite rule for the weight exp(-t^2) on the real line, computed by
/// Newton iteration on the Hermite recurrence. For an expectation against a
/// standard normal use z_i = sqrt(2)*t_i and weights w_i / sqrt(pi).
struct GaussHermite {
    std::vector<double> t;
    std::vector<double> w;

    explicit GaussHermite(std::size_t n) : t(n), w(n) {
        if (n < 1) throw std::invalid_argument("GaussHermite: n must be >= 1");
        const double eps = 3e-14;
        const std::size_t m = (n + 1) / 2;
        double z = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            // initial guesses (standard asymptotic seeds)
            if (i == 0)
                z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
            else if (i == 1)
                z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
            else if (i == 2)
                z = 1.86 * z - 0.86 * t[0];
            else if (i == 3)
                z = 1.91 * z - 0.91 * t[1];
            else
                z = 2.0 * z - t[i - 2];

            double pp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                // orthonormal Hermite recurrence
                double p1 = std::pow(M_PI, -0.25);
                double p2 = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    const double p3 = p2;
                    p2 = p1;
                    p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
                         std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
                }
                pp = std::sqrt(2.0 * n) * p2;
                const double z1 = z;
                z = z1 - p1 / pp;
                if (std::abs(z - z1) <= eps) break;
            }
            t[i] = z;
            t[n - 1 - i] = -z;
            w[i] = 2.0 / (pp * pp);
            w[n - 1 - i] = w[i];
        }
        // store ascending
        std::reverse(t.begin(), t.end());
    }

    /// E[f(Z)] for Z ~ N(0,1).
    template <typename F>
    double normal_expectation(F&& f) const {
        const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
        double acc = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i)
            acc += w[i] * f(std::sqrt(2.0) * t[i]);
        return acc * inv_sqrt_pi;
    }
};

/// Adaptive Simpson quadrature. Throws NumericError if the tolerance cannot
/// be met within the recursion budget; the message carries the achieved
/// estimate.
inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol, int max_depth = 40) {
    struct Impl {
        const std::function<double(double)>& f;
        int max_depth;
        bool failed = false;
        double worst = 0.0;
        double recurse(double a, double m, double b, double fa, double fm, double fb,
                       double whole, double tol, int depth) {
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            const double err = left + right - whole;
            if (std::abs(err) <= 15.0 * tol) return left + right + err / 15.0;
            if (depth >= max_depth) {
                failed = true;
                worst = std::max(worst, std::abs(err) / 15.0);
                return left + right;
            }
            return recurse(a, lm, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
                   recurse(m, rm, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
        }
    };
    Impl impl{f, max_depth};
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double result = impl.recurse(a, m, b, fa, fm, fb, whole, tol, 0);
    if (impl.failed)
        throw NumericError("adaptive_simpson: tolerance " + std::to_string(tol) +
                           " not met; achieved about " + std::to_string(impl.worst));
    return result;
}

} // namespace pensolve
