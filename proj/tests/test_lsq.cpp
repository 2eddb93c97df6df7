#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "caa/lsq.hpp"
#include "doctest.h"

using namespace caa;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = gauss(rng);
    return m;
}

// dense feasible-grid oracle over (c0, c1) with c2 = 1 - c0 - c1; a local
// second pass sharpens the coarse optimum so comparisons at 1e-6 make sense
double grid_oracle_3(const Eigen::MatrixXd& r, double c_budget, double step) {
    const Eigen::Matrix3d gram = (r.transpose() * r).eval();
    double best = 1e300, b0 = 0.0, b1 = 0.0;
    auto scan = [&](double lo0, double hi0, double lo1, double hi1, double h) {
        for (double c0 = lo0; c0 <= hi0 + 1e-12; c0 += h) {
            for (double c1 = lo1; c1 <= hi1 + 1e-12; c1 += h) {
                const double c2 = 1.0 - c0 - c1;
                if (std::fabs(c0) + std::fabs(c1) + std::fabs(c2) > c_budget + 1e-12) continue;
                const Eigen::Vector3d c(c0, c1, c2);
                const double v = c.dot(gram * c);
                if (v < best) {
                    best = v;
                    b0 = c0;
                    b1 = c1;
                }
            }
        }
    };
    scan(-c_budget, c_budget, -c_budget, c_budget, step);
    scan(b0 - 2.0 * step, b0 + 2.0 * step, b1 - 2.0 * step, b1 + 2.0 * step, step * 2e-3);
    return std::sqrt(std::max(best, 0.0));
}

}  // namespace

TEST_CASE("vertex oracle picks the argmin/argmax pair") {
    Eigen::VectorXd g(3);
    g << 1.0, 0.0, -1.0;
    const Eigen::VectorXd v = linear_minimization(g, 3.0);
    CHECK(v(2) == doctest::Approx(2.0));
    CHECK(v(0) == doctest::Approx(-1.0));
    CHECK(v(1) == 0.0);

    const Eigen::VectorXd flat = linear_minimization(Eigen::VectorXd::Constant(4, 2.5), 3.0);
    CHECK(flat(0) == 1.0);
    CHECK(flat.sum() == doctest::Approx(1.0));

    Eigen::VectorXd g2(2);
    g2 << 0.3, -0.2;
    const Eigen::VectorXd simplex = linear_minimization(g2, 1.0);
    CHECK(simplex(1) == 1.0);
}

TEST_CASE("vertices satisfy the affine and norm identities") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 8);
        Eigen::VectorXd g(n);
        for (int i = 0; i < n; ++i) g(i) = gauss(rng);
        const double c_budget = trial % 3 == 0 ? 1.0 : 1.0 + trial * 0.13;
        const Eigen::VectorXd v = linear_minimization(g, c_budget);
        CHECK(std::fabs(v.sum() - 1.0) <= 1e-14 * std::max(1.0, c_budget));
        const double expect = c_budget == 1.0 ? 1.0 : c_budget;
        CHECK(std::fabs(v.lpNorm<1>() - expect) <= 1e-14 * std::max(1.0, c_budget));
        // and it actually minimizes among a vertex sample
        for (int s = 0; s < 20; ++s) {
            const int i = static_cast<int>(rng() % n), j = static_cast<int>(rng() % n);
            if (i == j) continue;
            Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
            w(i) += 0.5 * (c_budget + 1.0);
            w(j) -= 0.5 * (c_budget - 1.0);
            CHECK(g.dot(v) <= g.dot(w) + 1e-12 * g.cwiseAbs().maxCoeff() * c_budget);
        }
    }
}

TEST_CASE("a zero column yields a zero residual") {
    std::mt19937_64 rng(11);
    Eigen::MatrixXd r = random_matrix(4, 3, rng);
    r.col(1).setZero();
    const ExtrapolationWeights w = solve_weights(r, 2.0);
    CHECK(w.residual_norm <= 1e-12 * r.norm());
    CHECK(std::fabs(w.c.sum() - 1.0) <= 1e-10);
}

TEST_CASE("identical columns force the common residual") {
    Eigen::VectorXd col(4);
    col << 1.0, -2.0, 0.5, 0.25;
    Eigen::MatrixXd r(4, 3);
    r.col(0) = col;
    r.col(1) = col;
    r.col(2) = col;
    const ExtrapolationWeights w = solve_weights(r, 3.0);
    CHECK(w.residual_norm == doctest::Approx(col.norm()).epsilon(1e-12));
}

TEST_CASE("orthonormal two-column case splits evenly") {
    Eigen::MatrixXd r(2, 2);
    r << 1.0, 0.0, 0.0, 1.0;
    // brute-force oracle along c1 = 1 - c0
    double best = 1e300, arg = 0.0;
    for (double c0 = -2.0; c0 <= 2.0; c0 += 1e-5) {
        const double v = c0 * c0 + (1.0 - c0) * (1.0 - c0);
        if (v < best) {
            best = v;
            arg = c0;
        }
    }
    CHECK(arg == doctest::Approx(0.5).epsilon(1e-3));
    const ExtrapolationWeights w = solve_weights(r, 2.0);
    CHECK(w.c(0) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(w.residual_norm == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));
}

TEST_CASE("random instance matches the dense grid oracle") {
    std::mt19937_64 rng(21);
    const Eigen::MatrixXd r = random_matrix(3, 3, rng);
    const ExtrapolationWeights w = solve_weights(r, 2.0);
    const double oracle = grid_oracle_3(r, 2.0, 1e-3);
    CHECK(std::fabs(w.residual_norm - oracle) <= 1e-6);
}

TEST_CASE("inactive budgets match the equality-only normal equations") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 25; ++trial) {
        const Eigen::MatrixXd r = random_matrix(5, 4, rng);
        // KKT oracle: minimize ||Rc||^2 with 1'c = 1
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(5, 5);
        kkt.topLeftCorner(4, 4) = r.transpose() * r;
        kkt.topRightCorner(4, 1).setOnes();
        kkt.bottomLeftCorner(1, 4).setOnes();
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(5);
        rhs(4) = 1.0;
        const Eigen::VectorXd sol = kkt.partialPivLu().solve(rhs);
        const Eigen::VectorXd c_oracle = sol.head(4);
        const double budget = c_oracle.lpNorm<1>() * 1.1;
        const ExtrapolationWeights w = solve_weights(r, std::max(1.0, budget), 1e-10);
        CHECK(w.residual_norm <=
              (r * c_oracle).norm() + 1e-10 * r.col(0).norm() + 1e-12);
    }
}

TEST_CASE("objective improves with the budget") {
    std::mt19937_64 rng(41);
    const Eigen::MatrixXd r = random_matrix(6, 4, rng);
    double prev = 1e300;
    for (double c : {1.0, 1.5, 2.0, 3.0, 5.0}) {
        const double v = solve_weights(r, c, 1e-9).residual_norm;
        CHECK(v <= prev + 1e-8 * r.col(0).norm());
        prev = v;
    }
}

TEST_CASE("feasibility holds on ill-conditioned windows") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 20; ++trial) {
        // nearly collinear columns, the regime the l1 ball is there to tame
        Eigen::MatrixXd r = random_matrix(6, 5, rng);
        for (int j = 1; j < 5; ++j) r.col(j) = r.col(0) + 1e-6 * r.col(j);
        const double c_budget = 1.0 + (trial % 4);
        const ExtrapolationWeights w = solve_weights(r, c_budget);
        CHECK(std::fabs(w.c.sum() - 1.0) <= 1e-10);
        CHECK(w.l1 <= c_budget * (1.0 + 1e-10));
        CHECK(w.residual_norm == doctest::Approx((r * w.c).norm()).epsilon(1e-12));
    }
}

TEST_CASE("non-finite input is rejected") {
    Eigen::MatrixXd r = Eigen::MatrixXd::Ones(3, 2);
    r(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(solve_weights(r, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_weights(Eigen::MatrixXd::Ones(3, 2), 0.5), std::invalid_argument);
}

TEST_CASE("an unreachable tolerance raises with a feasible best") {
    std::mt19937_64 rng(61);
    Eigen::MatrixXd r = random_matrix(4, 3, rng);
    for (int j = 1; j < 3; ++j) r.col(j) = r.col(0) + 1e-3 * r.col(j);
    try {
        (void)solve_weights(r, 1.0, 1e-300);
        // a solve this accurate may legitimately finish via the zero-residual exit
    } catch (const LsqConvergenceError& e) {
        CHECK(std::fabs(e.best.c.sum() - 1.0) <= 1e-9);
        CHECK(e.best.l1 <= 1.0 + 1e-9);
    }
}
