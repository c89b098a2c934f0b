#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "pensolve/numerics.hpp"

namespace pensolve {

namespace detail {
inline std::size_t locate(const std::vector<double>& xs, double x) {
    // index of the interval [xs[i], xs[i+1]] containing x, clamped to ends
    if (x <= xs.front()) return 0;
    if (x >= xs[xs.size() - 2]) return xs.size() - 2;
    std::size_t lo = 0, hi = xs.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (xs[mid] <= x ? lo : hi) = mid;
    }
    return lo;
}
} // namespace detail

/// Not-a-knot cubic spline. Outside the knot range the boundary cubic is
/// extended; callers that need a different extrapolation handle it themselves.
class CubicSpline {
public:
    CubicSpline() = default;

    CubicSpline(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n != y_.size() || n < 4)
            throw std::invalid_argument("CubicSpline: need >= 4 matching knots");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i + 1] > x_[i]))
                throw std::invalid_argument("CubicSpline: knots must increase");

        std::vector<double> h(n - 1), d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            d[i] = (y_[i + 1] - y_[i]) / h[i];
        }

        // tridiagonal system for interior second derivatives M_1..M_{n-2};
        // the not-a-knot ends are substituted into the first and last rows
        const std::size_t m = n - 2;
        std::vector<double> lo(m), di(m), up(m), rhs(m);
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t i = k + 1;
            lo[k] = h[i - 1];
            di[k] = 2.0 * (h[i - 1] + h[i]);
            up[k] = h[i];
            rhs[k] = 6.0 * (d[i] - d[i - 1]);
        }
        di[0] += h[0] + h[0] * h[0] / h[1];
        up[0] -= h[0] * h[0] / h[1];
        di[m - 1] += h[n - 2] + h[n - 2] * h[n - 2] / h[n - 3];
        lo[m - 1] -= h[n - 2] * h[n - 2] / h[n - 3];

        solve_tridiagonal(lo, di, up, rhs);

        M_.assign(n, 0.0);
        for (std::size_t k = 0; k < m; ++k) M_[k + 1] = rhs[k];
        M_[0] = M_[1] * (1.0 + h[0] / h[1]) - M_[2] * (h[0] / h[1]);
        M_[n - 1] = M_[n - 2] * (1.0 + h[n - 2] / h[n - 3]) - M_[n - 3] * (h[n - 2] / h[n - 3]);
    }

    double operator()(double x) const {
        const std::size_t i = detail::locate(x_, x);
        const double h = x_[i + 1] - x_[i];
        const double t = x - x_[i];
        const double c1 = (y_[i + 1] - y_[i]) / h - h * (2.0 * M_[i] + M_[i + 1]) / 6.0;
        return y_[i] + t * (c1 + t * (M_[i] / 2.0 + t * (M_[i + 1] - M_[i]) / (6.0 * h)));
    }

    double derivative(double x) const {
        const std::size_t i = detail::locate(x_, x);
        const double h = x_[i + 1] - x_[i];
        const double t = x - x_[i];
        const double c1 = (y_[i + 1] - y_[i]) / h - h * (2.0 * M_[i] + M_[i + 1]) / 6.0;
        return c1 + t * (M_[i] + t * (M_[i + 1] - M_[i]) / (2.0 * h));
    }

    const std::vector<double>& knots() const { return x_; }

private:
    std::vector<double> x_, y_, M_;
};

/// Monotone piecewise-cubic interpolation (Fritsch-Carlson slopes). Shape
/// preserving: never overshoots monotone data, which is what the value
/// function interpolation in the dynamic program needs.
class Pchip {
public:
    Pchip() = default;

    Pchip(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n != y_.size() || n < 2)
            throw std::invalid_argument("Pchip: need >= 2 matching knots");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i + 1] > x_[i]))
                throw std::invalid_argument("Pchip: knots must increase");

        slope_.assign(n, 0.0);
        if (n == 2) {
            slope_[0] = slope_[1] = (y_[1] - y_[0]) / (x_[1] - x_[0]);
            return;
        }
        std::vector<double> h(n - 1), del(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            del[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (del[i - 1] * del[i] > 0.0) {
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                slope_[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
            }
        }
        slope_[0] = edge_slope(h[0], h[1], del[0], del[1]);
        slope_[n - 1] = edge_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    }

    double operator()(double x) const {
        const std::size_t i = detail::locate(x_, x);
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        const double h10 = t3 - 2.0 * t2 + t;
        const double h01 = -2.0 * t3 + 3.0 * t2;
        const double h11 = t3 - t2;
        return h00 * y_[i] + h10 * h * slope_[i] + h01 * y_[i + 1] + h11 * h * slope_[i + 1];
    }

    double front_x() const { return x_.front(); }
    double back_x() const { return x_.back(); }
    double front_y() const { return y_.front(); }
    double back_y() const { return y_.back(); }
    double front_slope() const { return slope_.front(); }
    double back_slope() const { return slope_.back(); }

private:
    static double edge_slope(double h0, double h1, double del0, double del1) {
        double s = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
        if (s * del0 <= 0.0) return 0.0;
        if (del0 * del1 < 0.0 && std::abs(s) > 3.0 * std::abs(del0)) return 3.0 * del0;
        return s;
    }

    std::vector<double> x_, y_, slope_;
};

} // namespace pensolve
