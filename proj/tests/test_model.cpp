#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "pensolve/model.hpp"
#include "pensolve/scenario.hpp"

using namespace pensolve;

namespace {
const ModelParams& slovak() {
    static ModelParams p = slovak_scenario().params;
    return p;
}
} // namespace

TEST_CASE("derived coefficients on the Slovak calibration", "[model]") {
    const auto k = derive_coefficients(slovak());
    CHECK(k.delta_mu == Catch::Approx(0.0512).margin(1e-12));
    // direct arithmetic from the definitions, computed independently
    CHECK(k.a == Catch::Approx(0.028981923916).margin(1e-12));
    CHECK(k.b == Catch::Approx(0.000249358158).margin(1e-12));
    CHECK(k.alpha == Catch::Approx(0.00204052070962).margin(1e-12));
    CHECK(k.c == Catch::Approx(0.00869752506923).margin(1e-12));
    CHECK(k.gamma == Catch::Approx(0.0289194037262).margin(1e-12));
    CHECK(k.delta == Catch::Approx(0.00128405128632).margin(1e-12));
    CHECK(k.eps_net == Catch::Approx(0.0891).margin(1e-15));
    CHECK(k.hypothesis.holds());
    CHECK(k.d == 10.0);
    CHECK(k.T == 40.0);
}

TEST_CASE("symmetric volatilities collapse the spreads", "[model]") {
    ModelParams p = slovak();
    p.rho = 0.0;
    p.sigma_b = p.sigma_s;
    const auto k = derive_coefficients(p);
    const double s2 = p.sigma_s * p.sigma_s;
    CHECK(k.a == Catch::Approx(2.0 * s2).epsilon(1e-14));
    CHECK(k.b == Catch::Approx(s2).epsilon(1e-14));
    CHECK(k.a > k.b);
}

TEST_CASE("hypothesis failure is a verdict, not an error", "[model]") {
    ModelParams p = slovak();
    p.mu_s = p.mu_b - 0.01; // stock underperforms: delta_mu < 0
    const auto k = derive_coefficients(p);
    CHECK_FALSE(k.hypothesis.holds());
    CHECK(k.hypothesis.failure().find("mu_s") != std::string::npos);
    CHECK_THROWS_AS(risk_aversion_threshold(k), StructuralHypothesisError);
}

TEST_CASE("a - b equals sigma_s (sigma_s - rho sigma_b)", "[model][property]") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> vol(0.001, 0.5), corr(-1.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        ModelParams p = slovak();
        p.sigma_s = vol(gen);
        p.sigma_b = vol(gen);
        p.rho = corr(gen);
        const auto k = derive_coefficients(p);
        const double rhs = p.sigma_s * (p.sigma_s - p.rho * p.sigma_b);
        CHECK(k.a - k.b == Catch::Approx(rhs).margin(1e-15));
    }
}

TEST_CASE("risk-aversion threshold values", "[model]") {
    CHECK(risk_aversion_threshold(derive_coefficients(slovak())) ==
          Catch::Approx(1.78).margin(0.01)); // known figure for this calibration
    CHECK(risk_aversion_threshold(derive_coefficients(slovak())) ==
          Catch::Approx(1.78195015479).margin(1e-9)); // direct arithmetic

    // hand-arithmetic case: 0.04 / (0.0425 - 0.0025) = 1
    ModelParams p = slovak();
    p.sigma_s = 0.2;
    p.sigma_b = 0.05;
    p.rho = 0.0;
    p.mu_s = p.mu_b + 0.04;
    CHECK(risk_aversion_threshold(derive_coefficients(p)) ==
          Catch::Approx(1.0).epsilon(1e-12));

    // exploding variance spread drives the threshold to zero
    p.sigma_s = 5.0;
    CHECK(risk_aversion_threshold(derive_coefficients(p)) < 2e-3);
}

TEST_CASE("utility of the three CRRA forms", "[model]") {
    CHECK(utility(UtilitySpec::crra(10.0), 1.0) == Catch::Approx(-1.0));
    CHECK(utility(UtilitySpec::crra(1.0), std::exp(1.0)) == Catch::Approx(1.0));
    CHECK(utility(UtilitySpec::crra(10.0), 2.0) ==
          Catch::Approx(-0.001953125).epsilon(1e-15));
    CHECK(utility(UtilitySpec::crra(0.5), 4.0) == Catch::Approx(2.0));
    CHECK_THROWS_AS(utility(UtilitySpec::crra(10.0), 0.0), std::domain_error);
    CHECK_THROWS_AS(utility(UtilitySpec::crra(1.0), -2.0), std::domain_error);
}

TEST_CASE("utility is strictly increasing and midpoint concave", "[model][property]") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> wealth(0.01, 20.0);
    for (double d : {0.5, 1.0, 4.0, 10.0}) {
        const auto u = UtilitySpec::crra(d);
        for (int i = 0; i < 200; ++i) {
            double y1 = wealth(gen), y2 = wealth(gen), y3 = wealth(gen);
            if (y1 > y2) std::swap(y1, y2);
            if (y2 > y3) std::swap(y2, y3);
            if (y1 > y2) std::swap(y1, y2);
            if (y1 == y2 || y2 == y3) continue;
            CHECK(utility(u, y1) < utility(u, y2));
            CHECK(utility(u, y2) < utility(u, y3));
            const double mid = 0.5 * (y1 + y3);
            CHECK(utility(u, mid) >=
                  0.5 * (utility(u, y1) + utility(u, y3)) - 1e-12);
        }
    }
}

TEST_CASE("initial psi is gamma*d for every x", "[model]") {
    const auto k = derive_coefficients(slovak());
    const auto u = UtilitySpec::crra(10.0);
    const double expected = k.gamma * 10.0;
    for (double x : {-8.0, -3.0, -1.0, 0.0, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0})
        CHECK(initial_psi(u, k, x) ==
              Catch::Approx(expected).epsilon(1e-14));
    CHECK(initial_psi(UtilitySpec::crra(1.0), k, 0.7) ==
          Catch::Approx(k.gamma).epsilon(1e-14));
}

TEST_CASE("derive_coefficients is pure", "[model]") {
    const auto k1 = derive_coefficients(slovak());
    const auto k2 = derive_coefficients(slovak());
    CHECK(k1.a == k2.a);
    CHECK(k1.gamma == k2.gamma);
    CHECK(k1.delta == k2.delta);
}

TEST_CASE("parameter validation names the offending field", "[model]") {
    ModelParams p = slovak();
    p.sigma_s = 0.0;
    CHECK_THROWS_WITH(p.validate(), Catch::Matchers::ContainsSubstring("sigma_s"));
    p = slovak();
    p.rho = 1.5;
    CHECK_THROWS_WITH(p.validate(), Catch::Matchers::ContainsSubstring("rho"));
    p = slovak();
    p.kappa = 1.0;
    CHECK_THROWS_WITH(p.validate(), Catch::Matchers::ContainsSubstring("kappa"));
    p = slovak();
    p.theta_lo = 0.8;
    p.theta_hi = 0.5;
    CHECK_THROWS_WITH(p.validate(), Catch::Matchers::ContainsSubstring("theta_lo"));
}

TEST_CASE("net contribution rate and override", "[model]") {
    ModelParams p = slovak();
    CHECK(p.eps_net() == Catch::Approx(0.0891));
    p.eps_override = 0.09;
    CHECK(p.eps_net() == Catch::Approx(0.09));
}
