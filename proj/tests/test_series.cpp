#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pensolve/scenario.hpp"
#include "pensolve/series.hpp"

using namespace pensolve;

namespace {
const DerivedCoefficients& slovak_coeffs() {
    static DerivedCoefficients k = derive_coefficients(slovak_scenario().params);
    return k;
}
} // namespace

TEST_CASE("phi1 closed form: initial value, sign, zero-delta limit", "[series]") {
    const auto k = slovak_coeffs();
    CHECK(phi1_closed_form(k, 0.0) == 0.0);
    for (double s = 0.0; s <= k.T; s += 1.3) CHECK(phi1_closed_form(k, s) <= 0.0);

    DerivedCoefficients flat = k;
    flat.delta = 0.0;
    CHECK(phi1_closed_form(flat, 7.0) ==
          Catch::Approx(-flat.d * flat.gamma * 7.0).epsilon(1e-14));

    // frozen value, cross-checked against an independent arithmetic oracle
    CHECK(phi1_closed_form(k, 40.0) ==
          Catch::Approx(-11.275710942860).margin(1e-9));
}

TEST_CASE("phi2: dual evaluation paths agree", "[series][oracle]") {
    const auto k = slovak_coeffs();
    CHECK(phi2_analytic(k, 0.0) == Catch::Approx(0.0).margin(1e-14));
    CHECK(phi2_quadrature(k, 0.0) == 0.0);
    CHECK(series_detail::xi2(k, 0.0) == Catch::Approx(0.0).margin(1e-14));

    for (double s : {0.5, 3.0, 11.0, 25.0, 40.0}) {
        const double a = phi2_analytic(k, s);
        const double q = phi2_quadrature(k, s, 1e-12);
        CHECK(a == Catch::Approx(q).epsilon(1e-10));
        CHECK(std::isfinite(a));
        CHECK_NOTHROW(psi2_closed_form(k, s));
    }
    CHECK(phi2_analytic(k, 40.0) == Catch::Approx(444.503906950178).margin(1e-6));
}

TEST_CASE("build_series order 0 is the constant profile", "[series]") {
    const auto sol = SeriesSolution::build(slovak_coeffs(), 0);
    CHECK(sol.order() == 0);
    for (double s = 0.0; s <= 40.0; s += 5.0)
        CHECK(sol.phi(0, s) == Catch::Approx(slovak_coeffs().psi0()).epsilon(1e-15));
    const auto v = sol.eval({17.0, -2.0}, 0.09);
    CHECK(v.value == Catch::Approx(slovak_coeffs().psi0()).epsilon(1e-15));
}

TEST_CASE("tabulated phi1 matches the closed form at the nodes", "[series]") {
    const auto k = slovak_coeffs();
    const auto sol = SeriesSolution::build(k, 1);
    const auto& grid = sol.s_grid();
    for (std::size_t j = 0; j < grid.size(); j += 37)
        CHECK(sol.phi_table(1)[j] ==
              Catch::Approx(phi1_closed_form(k, grid[j])).margin(1e-12));
}

TEST_CASE("recurrence-built low orders reproduce the closed forms",
          "[series][oracle]") {
    const auto k = slovak_coeffs();
    SeriesBuildOptions opt;
    opt.closed_form_max = 0; // force the recurrence path for n = 1, 2
    const auto sol = SeriesSolution::build(k, 2, opt);
    const auto& grid = sol.s_grid();
    double worst1 = 0.0, worst2 = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        worst1 = std::max(worst1,
                          std::abs(sol.phi_table(1)[j] - phi1_closed_form(k, grid[j])));
        worst2 = std::max(worst2,
                          std::abs(sol.phi_table(2)[j] - phi2_analytic(k, grid[j])));
    }
    CHECK(worst1 <= 1e-8);
    CHECK(worst2 <= 1e-8);
}

TEST_CASE("each tabulated profile satisfies its mode equation", "[series][oracle]") {
    const auto k = slovak_coeffs();
    const auto sol = SeriesSolution::build(k, 3);
    const auto& s = sol.s_grid();
    const double ds = s[1] - s[0];

    for (int n = 1; n <= 3; ++n) {
        const auto& phi = sol.phi_table(n);
        const double Kn = sol.mode_constant(n);
        double worst = 0.0;
        for (std::size_t j = 2; j + 2 < s.size(); ++j) {
            // five-point central derivative of the tabulated profile
            const double dphi = (-phi[j + 2] + 8.0 * phi[j + 1] - 8.0 * phi[j - 1] +
                                 phi[j - 2]) / (12.0 * ds);
            const double resid = dphi - (Kn * phi[j] + sol.xi(n, s[j]));
            worst = std::max(worst, std::abs(resid));
        }
        INFO("order " << n);
        CHECK(worst <= 1e-6);
    }
}

TEST_CASE("reciprocal profiles cancel order by order", "[series][property]") {
    const auto k = slovak_coeffs();
    const auto sol = SeriesSolution::build(k, 4);
    const auto& s = sol.s_grid();
    // coefficient of order n in (sum Omega_k) (sum Phi_m) must vanish, n >= 1
    for (int n = 1; n <= 4; ++n) {
        double worst = 0.0;
        for (std::size_t j = 0; j < s.size(); j += 97) {
            double acc = 0.0;
            for (int kk = 0; kk <= n; ++kk)
                acc += sol.omega_table(kk).at(j) * sol.phi_table(n - kk).at(j);
            worst = std::max(worst, std::abs(acc));
        }
        INFO("order " << n);
        CHECK(worst <= 1e-10);
    }
    // order zero: Omega_0 Phi_0 = 1
    CHECK(sol.omega_table(0)[0] * sol.phi_table(0)[0] == Catch::Approx(1.0));
}

TEST_CASE("eval_psi limiting cases", "[series]") {
    const auto k = slovak_coeffs();
    const auto sol = SeriesSolution::build(k, 3);
    const double gd = k.psi0();

    // eps = 0: the zeroth profile everywhere
    for (double s : {0.0, 13.0, 40.0})
        for (double x : {-3.0, 0.0, 4.0}) {
            const auto v = sol.eval({s, x}, 0.0);
            CHECK(v.value == Catch::Approx(gd).epsilon(1e-14));
            CHECK(v.valid);
        }

    // s = 0: all higher profiles vanish
    for (double x : {-3.0, 0.0, 4.0}) {
        const auto v = sol.eval({0.0, x}, 0.09);
        CHECK(v.value == Catch::Approx(gd).margin(1e-10));
    }
}

TEST_CASE("first-order evaluation matches the direct substitution", "[series]") {
    const auto k = slovak_coeffs();
    const auto sol = SeriesSolution::build(k, 1);
    const double eps = 0.09;
    const double expected =
        k.psi0() * (1.0 + eps * (std::exp(-40.0 * k.delta) - 1.0) / k.delta);
    const auto v = sol.eval({40.0, 0.0}, eps);
    CHECK(v.value == Catch::Approx(expected).margin(1e-9));
    // the expansion has left its validity region at this point
    CHECK(v.value < 0.0);
    CHECK_FALSE(v.valid);
    CHECK(v.last_term == Catch::Approx(std::abs(eps * phi1_closed_form(k, 40.0))).epsilon(1e-12));
}

TEST_CASE("truncation indicator shrinks with x", "[series]") {
    const auto k = slovak_coeffs();
    const auto sol = SeriesSolution::build(k, 3);
    const auto near = sol.eval({40.0, 2.0}, 0.09);
    const auto far = sol.eval({40.0, 5.0}, 0.09);
    CHECK(near.valid);
    CHECK(far.valid);
    CHECK(far.last_term < near.last_term);
}
