#include <cmath>

#include "caa/chebsolve.hpp"
#include "caa/rates.hpp"
#include "doctest.h"

using namespace caa;

TEST_CASE("unit budget forces the monomial") {
    const MinimaxSolution s = solve_ctr_cheb({0.9, 3, 1.0, MinimaxMode::direct});
    CHECK(std::fabs(s.value - std::pow(0.9, 3)) <= 1e-6);
    CHECK(s.poly.coeffs.back() == doctest::Approx(1.0).epsilon(1e-7));
    double low_order = 0.0;
    for (int i = 0; i < 3; ++i) low_order += std::fabs(s.poly.coeffs[i]);
    CHECK(low_order <= 1e-7);
}

TEST_CASE("large budgets saturate at the unconstrained rate") {
    const RateParams p(0.9, 5);
    const MinimaxSolution s = solve_ctr_cheb({0.9, 5, c_star(p) * 1.2, MinimaxMode::direct});
    CHECK(std::fabs(s.value - rho_star(p)) <= 1e-6);
}

TEST_CASE("small-budget value matches the independent closed form") {
    const MinimaxSolution s = solve_ctr_cheb({0.9, 3, 1.5, MinimaxMode::direct});
    CHECK(std::fabs(s.value - 0.66125) <= 1e-4);
}

TEST_CASE("solutions are feasible and certified") {
    for (double c : {1.0, 2.0, 10.0}) {
        const MinimaxSolution s = solve_ctr_cheb({0.9, 4, c, MinimaxMode::direct});
        CHECK(s.poly(1.0) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(l1_norm(s.poly) <= c * (1.0 + 1e-9));
        CHECK(s.certified_gap <= 1e-6);
        CHECK(max_abs_on_interval(s.poly, 0.0, 0.9).value <= s.value + s.certified_gap + 1e-12);
        CHECK(s.iterations >= 1);
    }
}

TEST_CASE("value is monotone and midpoint convex in the budget") {
    const double tol = 1e-6;
    double prev = 2.0;
    std::vector<double> cs = {1.0, 1.5, 2.25, 3.4, 5.0, 7.5, 11.0, 17.0, 25.0, 34.0};
    std::vector<double> vals;
    for (double c : cs) {
        const double v = solve_ctr_cheb({0.9, 3, c, MinimaxMode::direct}, tol).value;
        CHECK(v <= prev + 2.0 * tol);
        prev = v;
        vals.push_back(v);
    }
    for (size_t i = 0; i + 2 < cs.size(); i += 2) {
        const double mid = solve_ctr_cheb({0.9, 3, (cs[i] + cs[i + 2]) / 2.0}, tol).value;
        CHECK(mid <= (vals[i] + vals[i + 2]) / 2.0 + 3.0 * tol);
    }
}

TEST_CASE("sandwich between the exact small-budget form and the node bound") {
    const RateParams p(0.9, 5);
    const BoundKnots kn = global_bound(p, 5);
    const double tol = 1e-6;
    const double rk = std::pow(0.9, 5);
    const double c0 = (2.0 + rk) / (2.0 - rk);
    for (int i = 0; i <= 8; ++i) {
        const double c = 1.0 + (c0 - 1.0) * i / 8.0;
        const double v = solve_ctr_cheb({0.9, 5, c, MinimaxMode::direct}, tol).value;
        CHECK(tilde_rho_small_c(p, c) <= v + tol);
        CHECK(v <= evaluate_bound(kn, c) + tol);
    }
    for (double c : {5.0, 20.0, 80.0, 300.0}) {
        const double v = solve_ctr_cheb({0.9, 5, c, MinimaxMode::direct}, tol).value;
        CHECK(v <= evaluate_bound(kn, c) + tol);
    }
}

TEST_CASE("projection at large budget recovers the unconstrained solution") {
    const RateParams p(0.9, 3);
    const MinimaxSolution s =
        solve_projection_bound({0.9, 3, c_star(p) * 1.1, MinimaxMode::projection});
    CHECK(std::fabs(s.value - rho_star(p)) <= 1e-5);
    const Polynomial ref = rescaled_cheb(0.9, 0.0, 3);
    CHECK(max_abs_on_interval(s.poly - ref, 0.0, 0.9).value <= 1e-5);
}

TEST_CASE("projection dominates the direct solution across budgets") {
    const RateParams p(0.9, 3);
    const double tol = 1e-6;
    for (int i = 0; i < 20; ++i) {
        const double c = std::exp(std::log(c_star(p)) * i / 19.0);
        const double direct = solve_ctr_cheb({0.9, 3, c, MinimaxMode::direct}, tol).value;
        const double proj =
            solve_projection_bound({0.9, 3, c, MinimaxMode::projection}, tol).value;
        CHECK(proj >= direct - 2.0 * tol);
    }
    const double rk = std::pow(0.9, 3);
    CHECK(solve_projection_bound({0.9, 3, 1.0, MinimaxMode::projection}, tol).value >=
          rk - 1e-9);
}

TEST_CASE("decreasing convex profile near the saturation budget") {
    const RateParams p(0.999, 5);
    const double cs = c_star(p);
    const double v1 = solve_ctr_cheb({0.999, 5, cs / 16.0, MinimaxMode::direct}).value;
    const double v2 = solve_ctr_cheb({0.999, 5, cs / 4.0, MinimaxMode::direct}).value;
    const double v3 = solve_ctr_cheb({0.999, 5, cs * 1.05, MinimaxMode::direct}).value;
    CHECK(v1 > v2);
    CHECK(v2 > v3 - 1e-6);
    CHECK(std::fabs(v3 - rho_star(p)) <= 1e-5);
}

TEST_CASE("budget below one is rejected") {
    CHECK_THROWS_AS(solve_ctr_cheb({0.9, 3, 0.9, MinimaxMode::direct}), MinimaxInfeasible);
}
