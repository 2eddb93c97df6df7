#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace caa {

/// Affine extrapolation weights: minimizer of ||R c|| over the polytope
/// {1'c = 1, ||c||_1 <= C}.
struct ExtrapolationWeights {
    Eigen::VectorXd c;
    double l1;             // ||c||_1
    double residual_norm;  // ||R c||, recomputed from the returned c
    double gap;            // certified bound on residual_norm - optimum;
                           // 0 when the l1 constraint is certified inactive
};

struct LsqConvergenceError : std::runtime_error {
    ExtrapolationWeights best;
    explicit LsqConvergenceError(ExtrapolationWeights b)
        : std::runtime_error("solve_weights: iteration cap exceeded"), best(std::move(b)) {}
};

/// Vertex of {1'c = 1, ||c||_1 <= C} minimizing <gradient, .>:
/// ((C+1)/2) e_i - ((C-1)/2) e_j with i = argmin, j = argmax of the gradient.
/// Returns e_i when C = 1 or all gradient entries are equal; ties break to
/// the lowest index.
Eigen::VectorXd linear_minimization(const Eigen::VectorXd& gradient, double c_budget);

/// Solves the weight subproblem to the additive precision
/// rel_tol * ||R e_0|| on the residual norm. If the equality-constrained
/// minimizer already satisfies the l1 budget it is returned directly
/// (rank-revealing least squares); otherwise away-step conditional gradient
/// runs on the polytope, with a periodic exact re-solve on the sign pattern
/// of the current face, until the duality gap certifies the contract.
ExtrapolationWeights solve_weights(const Eigen::MatrixXd& residual_matrix, double c_budget,
                                   double rel_tol = 1e-8);

}  // namespace caa
