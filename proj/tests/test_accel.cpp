#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "caa/accel.hpp"
#include "caa/rates.hpp"
#include "doctest.h"

using namespace caa;

namespace {

Eigen::VectorXd random_point(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = gauss(rng);
    return v;
}

std::vector<double> uniform_spectrum(int n, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, hi);
    std::vector<double> s(n);
    for (double& v : s) v = unif(rng);
    return s;
}

}  // namespace

TEST_CASE("residual vanishes exactly at fixed points") {
    const OperatorSpec op = make_linear({0.3, 0.6}, 2);
    CHECK(residual(op, *op.fixed_point) <= 1e-12);
    OperatorSpec halver;
    halver.n = 2;
    halver.rho = 0.5;
    halver.apply = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return 0.5 * x; };
    Eigen::VectorXd x(2);
    x << 3.0, 4.0;
    CHECK(residual(halver, x) == doctest::Approx(0.5 * 5.0).epsilon(1e-14));
}

TEST_CASE("gradient-step residual is the gradient over L") {
    GradientParams gp;
    gp.n = 6;
    gp.mu = 0.2;
    gp.L = 2.0;
    const OperatorSpec op = make_gradient_step(GradientFamily::quadratic, gp, 5);
    std::mt19937_64 rng(7);
    const Eigen::VectorXd x = random_point(6, rng);
    CHECK(residual(op, x) ==
          doctest::Approx(op.gradient(x).norm() / gp.L).epsilon(1e-12));
}

TEST_CASE("one-step convergence when the map collapses to the optimum") {
    GradientParams gp;
    gp.n = 3;
    gp.mu = 1.0;
    gp.L = 1.0;
    const OperatorSpec op = make_gradient_step(GradientFamily::quadratic, gp, 9);
    std::mt19937_64 rng(1);
    CaaConfig cfg;
    cfg.k = 2;
    cfg.c_budget = 5.0;
    const StepTrace t = caa_step(op, random_point(3, rng), cfg);
    CHECK(t.residual_out <= 1e-12 * t.residual_in);
    CHECK(t.ratio <= 1e-12);
}

TEST_CASE("two-by-two diagonal window reproduces the scalar line search") {
    OperatorSpec op;
    op.n = 2;
    op.rho = 0.9;
    Eigen::Matrix2d a = Eigen::Vector2d(0.9, 0.5).asDiagonal();
    op.apply = [a](const Eigen::VectorXd& x) -> Eigen::VectorXd { return a * x; };
    Eigen::VectorXd x0(2);
    x0 << 1.0, 1.0;
    CaaConfig cfg;
    cfg.k = 1;
    cfg.c_budget = 3.03;
    const StepTrace t = caa_step(op, x0, cfg);

    // brute-force oracle over c0 with c1 = 1 - c0
    const Eigen::Vector2d r0(0.1, 0.5), r1(0.09, 0.25);
    double best = 1e300, best_c0 = 0.0;
    for (double c0 = -1.515; c0 <= 1.515; c0 += 1e-6) {
        const double v = (c0 * r0 + (1.0 - c0) * r1).squaredNorm();
        if (v < best) {
            best = v;
            best_c0 = c0;
        }
    }
    CHECK(best_c0 == doctest::Approx(-1.0128).epsilon(1e-3));
    CHECK(t.weights.c(0) == doctest::Approx(best_c0).epsilon(1e-4));
    CHECK(t.weights.c(1) == doctest::Approx(1.0 - best_c0).epsilon(1e-4));
}

TEST_CASE("full-window extrapolation is exact on matched dimensions") {
    std::mt19937_64 rng(11);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const OperatorSpec op = make_linear(uniform_spectrum(5, 0.9, rng), seed);
        CaaConfig cfg;
        cfg.k = 5;
        cfg.unconstrained = true;
        const StepTrace t = caa_step(op, random_point(5, rng), cfg);
        CHECK(t.residual_out <= 1e-10 * t.residual_in);
    }
}

TEST_CASE("linear contractions meet the optimal Chebyshev rate") {
    const RateParams p(0.9, 5);
    const double bound = rho_star(p) + 1e-6;
    std::mt19937_64 rng(13);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const OperatorSpec op = make_linear(uniform_spectrum(50, 0.9, rng), seed + 100);
        CaaConfig cfg;
        cfg.k = 5;
        cfg.c_budget = c_star(p);
        const StepTrace t = caa_step(op, random_point(50, rng), cfg);
        CHECK(t.ratio <= bound);
    }
}

TEST_CASE("perturbed windows respect the nonlinear rate bound") {
    const RateParams p(0.9, 5);
    const double rk = std::pow(0.9, 5);
    const double c0 = (2.0 + rk) / (2.0 - rk);
    const BoundKnots kn = global_bound(p, 5);
    const double alpha = 1e-3;
    const double bound = evaluate_bound(kn, c0) + 3.0 * alpha * 5.0 * c0 + 1e-6;
    std::mt19937_64 rng(17);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const OperatorSpec op =
            make_perturbed_linear(uniform_spectrum(50, 0.9, rng), alpha, seed + 500);
        CaaConfig cfg;
        cfg.k = 5;
        cfg.c_budget = c0;
        const StepTrace t = caa_step(op, random_point(50, rng), cfg);
        CHECK(t.ratio <= bound);
    }
}

TEST_CASE("ratios are invariant under translation of the fixed point") {
    std::mt19937_64 rng(19);
    const OperatorSpec op = make_linear(uniform_spectrum(8, 0.8, rng), 3);
    Eigen::VectorXd shift = random_point(8, rng);
    OperatorSpec moved = op;
    auto base = op.apply;
    moved.apply = [base, shift](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return base(x - shift) + shift;
    };
    CaaConfig cfg;
    cfg.k = 3;
    cfg.c_budget = 4.0;
    const Eigen::VectorXd x0 = random_point(8, rng);
    const StepTrace a = caa_step(op, x0, cfg);
    const StepTrace b = caa_step(moved, x0 + shift, cfg);
    CHECK(std::fabs(a.ratio - b.ratio) <= 1e-12);
}

TEST_CASE("unit budget degenerates to simplex weights") {
    std::mt19937_64 rng(23);
    const OperatorSpec op = make_linear(uniform_spectrum(12, 0.9, rng), 8);
    CaaConfig cfg;
    cfg.k = 4;
    cfg.c_budget = 1.0;
    const StepTrace t = caa_step(op, random_point(12, rng), cfg);
    for (int i = 0; i < t.weights.c.size(); ++i) CHECK(t.weights.c(i) >= -1e-12);
    CHECK(t.ratio <= std::pow(0.9, 4) + 1e-6);
}

TEST_CASE("trace is self-consistent") {
    std::mt19937_64 rng(29);
    const OperatorSpec op = make_linear(uniform_spectrum(6, 0.7, rng), 4);
    CaaConfig cfg;
    cfg.k = 3;
    cfg.c_budget = 2.0;
    const Eigen::VectorXd x0 = random_point(6, rng);
    const StepTrace t = caa_step(op, x0, cfg);
    REQUIRE(static_cast<int>(t.iterates.size()) == cfg.k + 2);
    Eigen::VectorXd xe = Eigen::VectorXd::Zero(6);
    for (int i = 0; i <= cfg.k; ++i) xe += t.weights.c(i) * t.iterates[i];
    CHECK((xe - t.extrapolated).norm() <= 1e-12 * (1.0 + xe.norm()));
    CHECK(residual(op, t.extrapolated) == doctest::Approx(t.residual_out).epsilon(1e-12));
    CHECK(t.ratio == doctest::Approx(t.residual_out / t.residual_in).epsilon(1e-14));
}

TEST_CASE("exact fixed-point input returns early with zero ratio") {
    OperatorSpec op;
    op.n = 2;
    op.rho = 0.5;
    op.apply = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return 0.5 * x; };
    const StepTrace t = caa_step(op, Eigen::VectorXd::Zero(2), {2, 3.0, false, 1e-8});
    CHECK(t.residual_in == 0.0);
    CHECK(t.ratio == 0.0);
    CHECK(t.extrapolated.norm() == 0.0);
    CHECK(t.weights.c(0) == 1.0);
}

TEST_CASE("divergent maps raise with the partial trace attached") {
    OperatorSpec bad;
    bad.n = 2;
    bad.rho = 0.5;
    bad.apply = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd y = 2.0 * x;
        if (y.norm() > 8.0) y(0) = std::numeric_limits<double>::quiet_NaN();
        return y;
    };
    Eigen::VectorXd x0(2);
    x0 << 1.0, 1.0;
    CaaConfig cfg;
    cfg.k = 6;
    cfg.c_budget = 2.0;
    CHECK_THROWS_AS(caa_step(bad, x0, cfg), DivergenceError);
    try {
        caa_step(bad, x0, cfg);
    } catch (const DivergenceError& e) {
        CHECK(e.partial.iterates.size() >= 2);
    }
}

TEST_CASE("guarded runs on a quadratic hit the solver floor immediately") {
    GradientParams gp;
    gp.n = 5;
    gp.mu = 1e-2;
    gp.L = 1.0;
    const OperatorSpec op = make_gradient_step(GradientFamily::quadratic, gp, 21);
    std::mt19937_64 rng(31);
    CaaConfig cfg;
    cfg.k = 5;
    cfg.unconstrained = true;
    const RunTrace t = guarded_caa(op, random_point(5, rng), cfg, 3);
    REQUIRE(!t.records.empty());
    CHECK(t.records[0].grad_norm <= 1e-10 * t.grad_norm0);
}

TEST_CASE("the guard never loses to the plain contraction envelope") {
    std::mt19937_64 rng(37);
    std::vector<OperatorSpec> zoo;
    GradientParams quad;
    quad.n = 12;
    quad.mu = 0.05;
    quad.L = 1.0;
    zoo.push_back(make_gradient_step(GradientFamily::quadratic, quad, 41));
    GradientParams cubic;
    cubic.n = 10;
    cubic.mu = 1e-3;
    cubic.L = 1.0;
    cubic.eta = 1e-2;
    zoo.push_back(make_gradient_step(GradientFamily::cubic_perturbed_quadratic, cubic, 43));
    GradientParams logistic;
    logistic.n = 8;
    logistic.mu = 0.05;
    zoo.push_back(make_gradient_step(GradientFamily::logistic_ridge, logistic, 47));

    for (const OperatorSpec& op : zoo) {
        for (double c : {1.0, 10.0}) {
            CaaConfig cfg;
            cfg.k = 4;
            cfg.c_budget = c;
            const RunTrace t = guarded_caa(op, random_point(op.n, rng), cfg, 25);
            const double step = std::pow(op.rho, cfg.k);
            double prev = t.grad_norm0;
            for (const OuterRecord& rec : t.records) {
                CHECK(rec.grad_norm <= step * prev * (1.0 + 1e-12));
                prev = rec.grad_norm;
            }
        }
    }
}

TEST_CASE("run traces separate by budget on the cubic family") {
    GradientParams gp;
    gp.n = 20;
    gp.mu = 1e-3;
    gp.L = 1.0;
    gp.eta = 1e-2;
    const OperatorSpec op = make_gradient_step(GradientFamily::cubic_perturbed_quadratic, gp, 53);
    std::mt19937_64 rng(59);
    Eigen::VectorXd x0 = random_point(20, rng);
    x0 *= 0.1 / op.gradient(x0).norm() * 1.0;  // coarse scale; exact value immaterial here
    CaaConfig cfg;
    cfg.k = 5;
    std::vector<double> finals;
    for (double c : {1e2, 1e3}) {
        cfg.c_budget = c;
        const RunTrace t = guarded_caa(op, x0, cfg, 400);
        finals.push_back(t.records.back().grad_norm);
        CHECK(t.records.back().grad_norm < t.grad_norm0);
    }
    CHECK(finals[1] <= finals[0] * (1.0 + 1e-9));
}

TEST_CASE("config validation") {
    const OperatorSpec op = make_linear({0.5, 0.5}, 1);
    Eigen::VectorXd x0(2);
    x0 << 1.0, 2.0;
    CHECK_THROWS_AS(caa_step(op, x0, {0, 2.0, false, 1e-8}), std::invalid_argument);
    CHECK_THROWS_AS(caa_step(op, x0, {2, 0.5, false, 1e-8}), std::invalid_argument);
    CHECK_THROWS_AS(caa_step(op, x0, {2, 2.0, false, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(guarded_caa(op, x0, {2, 2.0, false, 1e-8}, 5), std::invalid_argument);
}
