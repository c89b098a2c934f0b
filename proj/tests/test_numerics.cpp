#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "pensolve/interpolate.hpp"
#include "pensolve/numerics.hpp"
#include "pensolve/quadrature.hpp"

using namespace pensolve;

TEST_CASE("stable_expm_ratio limits and values", "[numerics]") {
    CHECK(stable_expm_ratio(0.0, 7.0) == Catch::Approx(7.0).epsilon(1e-15));
    CHECK(stable_expm_ratio(1.0, 1.0) ==
          Catch::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
    // negative rate stays positive: (1 - e)/(-0.5)
    CHECK(stable_expm_ratio(-0.5, 2.0) ==
          Catch::Approx((1.0 - std::exp(1.0)) / -0.5).epsilon(1e-14));
    CHECK(stable_expm_ratio(-3.0, 5.0) > 0.0);

    // continuity across the series/expm1 switch
    const double s = 13.0;
    for (double lam : {1e-7, 1e-6, 1e-5, 9.9e-5, 1.01e-4, 1e-3}) {
        const double direct = -std::expm1(-lam * s) / lam;
        CHECK(stable_expm_ratio(lam, s) == Catch::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("stable_expm_ratio is nonnegative and decreasing in lambda", "[numerics]") {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> lam_dist(-2.0, 2.0);
    std::uniform_real_distribution<double> s_dist(0.0, 50.0);
    for (int i = 0; i < 200; ++i) {
        const double s = s_dist(gen);
        double l1 = lam_dist(gen), l2 = lam_dist(gen);
        if (l1 > l2) std::swap(l1, l2);
        const double r1 = stable_expm_ratio(l1, s);
        const double r2 = stable_expm_ratio(l2, s);
        CHECK(r1 >= 0.0);
        CHECK(r2 >= 0.0);
        CHECK(r1 >= r2 - 1e-12 * std::max(1.0, std::abs(r1)));
    }
}

TEST_CASE("tridiagonal solver matches a dense reference", "[numerics]") {
    // small system with known solution: A x = b, A = tridiag(-1, 4, -1)
    const std::size_t n = 6;
    std::vector<double> lo(n, -1.0), di(n, 4.0), up(n, -1.0);
    std::vector<double> x_ref = {1.0, -2.0, 3.0, 0.5, -1.5, 2.5};
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
        b[i] = 4.0 * x_ref[i];
        if (i > 0) b[i] -= x_ref[i - 1];
        if (i + 1 < n) b[i] -= x_ref[i + 1];
    }
    solve_tridiagonal(lo, di, up, b);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(b[i] == Catch::Approx(x_ref[i]).epsilon(1e-13));
}

TEST_CASE("inverse normal CDF reference values", "[numerics]") {
    // reference values computed with an independent high-precision library
    const std::vector<std::pair<double, double>> table = {
        {1e-12, -7.0344838253011313},  {1e-06, -4.7534243088228987},
        {0.01, -2.3263478740408408},   {0.3, -0.52440051270804089},
        {0.5, 0.0},                    {0.75, 0.67448975019608171},
        {0.975, 1.959963984540054},    {0.999999999, 5.9978070196016366}};
    for (const auto& [p, z] : table)
        CHECK(inverse_normal_cdf(p) == Catch::Approx(z).margin(2e-14));
    CHECK_THROWS_AS(inverse_normal_cdf(-0.1), std::domain_error);
    CHECK_THROWS_AS(inverse_normal_cdf(1.5), std::domain_error);
}

TEST_CASE("normal stream is deterministic and substreamed", "[numerics]") {
    NormalStream a(123, 0), b(123, 0), c(123, 1);
    bool same = true, different = false;
    for (int i = 0; i < 100; ++i) {
        const double xa = a.next_normal();
        const double xb = b.next_normal();
        const double xc = c.next_normal();
        same = same && (xa == xb);
        different = different || (xa != xc);
    }
    CHECK(same);
    CHECK(different);
}

TEST_CASE("quantile interpolates order statistics", "[numerics]") {
    std::vector<double> v = {4.0, 1.0, 3.0, 2.0};
    CHECK(quantile(v, 0.0) == Catch::Approx(1.0));
    CHECK(quantile(v, 1.0) == Catch::Approx(4.0));
    CHECK(quantile(v, 0.5) == Catch::Approx(2.5));
    CHECK(quantile(v, 1.0 / 3.0) == Catch::Approx(2.0));
}

TEST_CASE("Gauss-Legendre 16 integrates polynomials of degree 31", "[quadrature]") {
    // exact for degree <= 31; x^30 over [0,1] = 1/31
    const double val = GaussLegendre16::integrate(
        [](double x) { return std::pow(x, 30); }, 0.0, 1.0);
    CHECK(val == Catch::Approx(1.0 / 31.0).epsilon(1e-13));
    const double weight_sum =
        GaussLegendre16::integrate([](double) { return 1.0; }, -1.0, 1.0);
    CHECK(weight_sum == Catch::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("Gauss-Hermite nodes match reference and integrate moments",
          "[quadrature]") {
    const GaussHermite gh(32);
    REQUIRE(gh.t.size() == 32);
    // reference endpoint values of the 32-point rule
    CHECK(gh.t.front() == Catch::Approx(-7.125813909830728).epsilon(1e-12));
    CHECK(gh.t.back() == Catch::Approx(7.125813909830728).epsilon(1e-12));
    CHECK(gh.w.front() == Catch::Approx(7.3106764273840957e-23).epsilon(1e-9));

    // normal moments: E[1]=1, E[Z^2]=1, E[Z^4]=3, E[Z^6]=15
    CHECK(gh.normal_expectation([](double) { return 1.0; }) ==
          Catch::Approx(1.0).epsilon(1e-14));
    CHECK(gh.normal_expectation([](double z) { return z * z; }) ==
          Catch::Approx(1.0).epsilon(1e-13));
    CHECK(gh.normal_expectation([](double z) { return std::pow(z, 4); }) ==
          Catch::Approx(3.0).epsilon(1e-13));
    CHECK(gh.normal_expectation([](double z) { return std::pow(z, 6); }) ==
          Catch::Approx(15.0).epsilon(1e-12));
    // lognormal mean: E[e^{sZ}] = e^{s^2/2}
    const double s = 0.169;
    CHECK(gh.normal_expectation([&](double z) { return std::exp(s * z); }) ==
          Catch::Approx(std::exp(0.5 * s * s)).epsilon(1e-12));
}

TEST_CASE("adaptive Simpson meets tolerance and reports failure", "[quadrature]") {
    const double val =
        adaptive_simpson([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12);
    CHECK(val == Catch::Approx(2.0).epsilon(1e-11));
    CHECK_THROWS_AS(adaptive_simpson([](double x) { return std::sqrt(std::abs(x)); },
                                     -1.0, 1.0, 1e-15, 4),
                    NumericError);
}

TEST_CASE("cubic spline reproduces cubics exactly and interpolates smoothly",
          "[interpolate]") {
    auto f = [](double x) { return 2.0 + x * (0.5 + x * (-1.25 + 0.75 * x)); };
    std::vector<double> xs, ys;
    for (int i = 0; i <= 10; ++i) {
        xs.push_back(0.3 * i);
        ys.push_back(f(0.3 * i));
    }
    const CubicSpline sp(xs, ys);
    for (double x = 0.0; x <= 3.0; x += 0.017)
        CHECK(sp(x) == Catch::Approx(f(x)).margin(1e-12));
    // derivative of the cubic
    auto df = [](double x) { return 0.5 + x * (-2.5 + 2.25 * x); };
    for (double x = 0.1; x <= 2.9; x += 0.13)
        CHECK(sp.derivative(x) == Catch::Approx(df(x)).margin(1e-11));
}

TEST_CASE("cubic spline converges at fourth order on smooth data", "[interpolate]") {
    auto build_err = [](std::size_t n) {
        std::vector<double> xs(n), ys(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n - 1);
            ys[i] = std::sin(xs[i]);
        }
        const CubicSpline sp(xs, ys);
        double worst = 0.0;
        for (double x = 0.0; x <= 2.0 * M_PI; x += 0.001)
            worst = std::max(worst, std::abs(sp(x) - std::sin(x)));
        return worst;
    };
    const double e1 = build_err(33), e2 = build_err(65);
    CHECK(e1 / e2 > 10.0); // ~16x for a fourth-order method
}

TEST_CASE("pchip preserves monotone data", "[interpolate]") {
    std::vector<double> xs = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<double> ys = {0.0, 0.1, 0.2, 5.0, 5.1, 5.2}; // steep middle jump
    const Pchip p(xs, ys);
    double prev = p(0.0);
    for (double x = 0.01; x <= 5.0; x += 0.01) {
        const double cur = p(x);
        CHECK(cur >= prev - 1e-12);
        prev = cur;
    }
    // interpolates the knots
    for (std::size_t i = 0; i < xs.size(); ++i)
        CHECK(p(xs[i]) == Catch::Approx(ys[i]).margin(1e-14));
}
