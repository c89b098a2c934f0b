#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pensolve/bounds.hpp"
#include "pensolve/policy.hpp"
#include "pensolve/scenario.hpp"

using namespace pensolve;

namespace {
const DerivedCoefficients& slovak_coeffs() {
    static DerivedCoefficients k = derive_coefficients(slovak_scenario().params);
    return k;
}
} // namespace

TEST_CASE("varsigma basics", "[bounds]") {
    const auto k = slovak_coeffs();
    const auto r = bound_rates(k);
    CHECK(varsigma(r.lambda_upper, 0.09, 0.0) == 0.0);
    CHECK(varsigma(r.lambda_lower, 0.0, 25.0) == 0.0);
    CHECK(r.lambda_lower - r.lambda_upper ==
          Catch::Approx((k.d + 1.0) * k.c2()).epsilon(1e-12));
    // nondecreasing in s
    double prev = 0.0;
    for (double s = 0.0; s <= k.T; s += 0.5) {
        const double v = varsigma(r.lambda_upper, 0.09, s);
        CHECK(v >= prev - 1e-15);
        prev = v;
    }
}

TEST_CASE("varsigma solves its linear ODE (finite-difference residual)",
          "[bounds][oracle]") {
    const auto k = slovak_coeffs();
    const double eps = 0.09;
    const double A = 2.0 * k.alpha / k.c2();
    const double B = 2.0 / k.c2();
    const double C = 1.0 / k.gamma;
    const double h = 1e-4;

    // slow branch: -v' = (c^2/2) ((A - 2 C gamma d) v - eps B)
    const double lam_slow = k.alpha - k.d * k.c2();
    // fast branch: -v' = (c^2/2) ((2 + A) v - eps B)
    const double lam_fast = k.alpha + k.c2();

    for (double s = h; s <= k.T - h; s += k.T / 37.0) {
        {
            const double v = varsigma(lam_slow, eps, s);
            const double dv = (varsigma(lam_slow, eps, s + h) -
                               varsigma(lam_slow, eps, s - h)) / (2.0 * h);
            const double rhs = -0.5 * k.c2() * ((A - 2.0 * C * k.gamma * k.d) * v - eps * B);
            CHECK(dv == Catch::Approx(rhs).margin(1e-6));
        }
        {
            const double v = varsigma(lam_fast, eps, s);
            const double dv = (varsigma(lam_fast, eps, s + h) -
                               varsigma(lam_fast, eps, s - h)) / (2.0 * h);
            const double rhs = -0.5 * k.c2() * ((2.0 + A) * v - eps * B);
            CHECK(dv == Catch::Approx(rhs).margin(1e-6));
        }
    }
}

TEST_CASE("psi envelope collapses at s=0 and x->inf", "[bounds]") {
    const auto k = slovak_coeffs();
    const double gd = k.psi0();
    const auto at0 = psi_envelope(k, 0.09, 0.0, 0.3);
    CHECK(at0.lower == Catch::Approx(gd).epsilon(1e-14));
    CHECK(at0.upper == Catch::Approx(gd).epsilon(1e-14));

    const auto far = psi_envelope(k, 0.09, 40.0, 30.0);
    CHECK(far.lower == Catch::Approx(gd).epsilon(1e-9));
    CHECK(far.upper == Catch::Approx(gd).epsilon(1e-9));

    const auto mid = psi_envelope(k, 0.09, 40.0, 0.0);
    CHECK(mid.lower > 0.0);
    CHECK(mid.upper <= gd);
    CHECK(mid.lower <= mid.upper);
}

TEST_CASE("psi envelope is ordered everywhere sampled", "[bounds][property]") {
    const auto k = slovak_coeffs();
    for (double s = 0.0; s <= k.T; s += 2.5)
        for (double x = -6.0; x <= 8.0; x += 0.7) {
            const auto e = psi_envelope(k, 0.09, s, x);
            CHECK(e.lower <= e.upper);
            CHECK(e.lower > 0.0);
        }
}

TEST_CASE("value envelope basics", "[bounds]") {
    const auto k = slovak_coeffs();
    const auto u = UtilitySpec::crra(k.d);

    const auto terminal = value_envelope(k, 0.09, k.T, 2.0);
    CHECK(terminal.lower == Catch::Approx(utility(u, 2.0)).epsilon(1e-14));
    CHECK(terminal.upper == Catch::Approx(utility(u, 2.0)).epsilon(1e-14));

    const auto no_contrib = value_envelope(k, 0.0, 10.0, 2.0);
    CHECK(no_contrib.lower == Catch::Approx(utility(u, 2.0)).epsilon(1e-14));
    CHECK(no_contrib.upper == Catch::Approx(utility(u, 2.0)).epsilon(1e-14));

    const auto early = value_envelope(k, 0.09, 0.0, 1.0);
    CHECK(early.lower < early.upper);
    CHECK(early.upper < 0.0);
    CHECK(early.lower > -1.0); // future contributions raise utility above U(1) = -1

    CHECK_THROWS_AS(value_envelope(k, 0.09, 0.0, -1.0), std::domain_error);
    auto k1 = k;
    k1.d = 1.0;
    CHECK_THROWS_AS(value_envelope(k1, 0.09, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("theta bracket collapse and nonnegativity", "[bounds]") {
    const auto k = slovak_coeffs();
    const double merton = k.b / k.a + k.delta_mu / (k.a * k.d);

    const auto at_T = theta_bracket(k, 0.09, k.T, 1.0);
    CHECK(at_T.lower == Catch::Approx(merton).epsilon(1e-14));
    CHECK(at_T.upper == Catch::Approx(merton).epsilon(1e-14));
    CHECK(merton == Catch::Approx(0.185265759912).margin(1e-10));
    // d = 10 exceeds the 1.78 threshold, so the terminal value stays below 1
    CHECK(at_T.lower <= 1.0);

    const auto no_contrib = theta_bracket(k, 0.0, 3.0, 0.5);
    CHECK(no_contrib.lower == Catch::Approx(merton).epsilon(1e-14));
    CHECK(no_contrib.upper == Catch::Approx(merton).epsilon(1e-14));

    const auto rich = theta_bracket(k, 0.09, 3.0, 1e9);
    CHECK(rich.lo() == Catch::Approx(merton).margin(1e-8));
    CHECK(rich.hi() == Catch::Approx(merton).margin(1e-8));

    for (double t = 0.0; t <= k.T; t += 4.0)
        for (double y : {0.05, 0.3, 1.0, 5.0, 40.0}) {
            const auto br = theta_bracket(k, 0.09, t, y);
            CHECK(br.lo() >= 0.0);
        }
}

TEST_CASE("bracket width shrinks toward maturity and with wealth",
          "[bounds][property]") {
    const auto k = slovak_coeffs();
    double prev_width = 1e300;
    for (double t = 0.0; t <= k.T; t += 2.0) {
        const auto br = theta_bracket(k, 0.09, t, 1.0);
        const double width = br.hi() - br.lo();
        CHECK(width <= prev_width + 1e-15);
        prev_width = width;
    }
    prev_width = 1e300;
    for (double y = 0.1; y <= 100.0; y *= 2.0) {
        const auto br = theta_bracket(k, 0.09, 5.0, y);
        const double width = br.hi() - br.lo();
        CHECK(width <= prev_width + 1e-15);
        prev_width = width;
    }
}

TEST_CASE("first-order policy equals the delta branch of the bracket",
          "[bounds][policy]") {
    const auto k = slovak_coeffs();
    for (double t = 0.0; t <= k.T; t += 1.7)
        for (double y : {0.09, 0.5, 1.3, 4.0, 20.0}) {
            const auto br = theta_bracket(k, 0.0891, t, y);
            const double fo = theta_first_order(k, 0.0891, t, y);
            CHECK(fo == Catch::Approx(br.lower).margin(1e-14));
        }
}

TEST_CASE("orientation report flags the inverted labels", "[bounds]") {
    const auto rep = orientation_report(slovak_coeffs());
    CHECK(rep.labels_swapped);
    CHECK(rep.rate_psi_lower < rep.rate_psi_upper);
    const auto k = slovak_coeffs();
    CHECK(rep.rate_psi_lower == Catch::Approx(k.alpha - k.d * k.c2()));
    CHECK(rep.rate_psi_upper == Catch::Approx(k.alpha + k.c2()));
}

TEST_CASE("bounds refuse to run when the hypothesis fails", "[bounds]") {
    ModelParams p = slovak_scenario().params;
    p.mu_s = p.mu_b - 0.01;
    const auto k = derive_coefficients(p);
    CHECK_THROWS_AS(psi_envelope(k, 0.09, 1.0, 0.0), StructuralHypothesisError);
    CHECK_THROWS_AS(theta_bracket(k, 0.09, 1.0, 1.0), StructuralHypothesisError);
}
