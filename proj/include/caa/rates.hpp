#pragma once

#include <utility>
#include <vector>

namespace caa {

/// Contraction factor and extrapolation window; k+1 iterates feed one
/// extrapolation step.
struct RateParams {
    double rho;
    int k;
    RateParams(double rho_, int k_);
};

/// beta = (1 - sqrt(1-rho)) / (1 + sqrt(1-rho)).
double contraction_beta(double rho);

/// Optimal unconstrained rate rho_* = 2 beta^k / (1 + beta^{2k}).
double rho_star(const RateParams& p);

/// Largest eps for which the rescaled Chebyshev polynomial on [-eps, rho]
/// keeps all its roots in [0, rho]:
///   eps~ = rho (1 + cos((2k-1) pi / 2k)) / (1 - cos((2k-1) pi / 2k)).
double eps_tilde(const RateParams& p);

/// Minimax value of the rescaled Chebyshev polynomial on [-eps, rho].
/// Reduces to rho_star at eps = 0.
double rho_eps(double rho, double eps, int k);

/// Closed-form l1 norm of the rescaled Chebyshev polynomial, valid for
/// eps in [0, eps_tilde] where its coefficients alternate in sign.
/// Throws std::domain_error outside that range.
double p_eps_l1(double rho, double eps, int k);

/// l1 norm of the optimal unconstrained polynomial; the budget beyond which
/// the l1 constraint is inactive.
double c_star(const RateParams& p);

struct BudgetRatePair {
    double c1;
    double rho1;
};

/// The (budget, rate) pair obtained from the rescaled Chebyshev polynomial
/// on [-rho, rho]; the l1 norm comes from the parity-aware closed form
/// (evaluation of T_k on the imaginary axis).
BudgetRatePair c1_rho1(const RateParams& p);

/// Exact constrained minimax value for small budgets,
///   rho~(C) = (C+1)/2 rho^k - (C-1)/2  on  [1, (2+rho^k)/(2-rho^k)].
double tilde_rho_small_c(const RateParams& p, double c_budget);

/// Node list of the piecewise-linear global upper bound: (C_i, rho_i) pairs
/// for i = -1..M+1 sorted by budget, trailing node (C_*, rho_*).
struct BoundKnots {
    std::vector<std::pair<double, double>> knots;  // (C, rate), ascending in C
    int m;
    double rho_star;
};

/// Builds the bound nodes with eps_i = rho / 2^{i-1}, i = 1..M. Requires
/// k > 2. Budgets at nodes with eps > eps_tilde use the true coefficient
/// l1 norm; the eps = rho node uses the parity closed form.
BoundKnots global_bound(const RateParams& p, int m);

/// max over node chords and rho_star, evaluated at C >= 1.
double evaluate_bound(const BoundKnots& knots, double c_budget);

/// Perturbed rate bound rho~(C) + 3 alpha k C, with rho~ replaced by the
/// piecewise-linear upper bound with M nodes.
double hat_rho(const RateParams& p, double c_budget, double alpha, int m);

/// Gradient-descent version: bound + 3 (eta/L^2) grad_norm k^2 C^2.
double hat_rho_grad(const RateParams& p, double c_budget, double eta, double big_l,
                    double grad_norm, int m);

struct AlphaThresholds {
    double alpha0, alpha1, alpha2;
};
struct GradThresholds {
    double alpha3, alpha4, alpha5;
};

/// Perturbation sizes below which acceleration is guaranteed on successively
/// wider budget intervals (alpha2 <= alpha1 <= alpha0).
AlphaThresholds alpha_thresholds(const RateParams& p);

/// Same thresholds for the gradient-step setting, applied to
/// (eta/L^2) ||grad f(x0)||  (alpha5 <= alpha4 <= alpha3).
GradThresholds grad_thresholds(const RateParams& p);

/// Outer-iteration count beyond which the guarded scheme provably beats the
/// plain rho^{kN} envelope. May be negative (acceleration is immediate) and
/// is -inf when eta * grad_norm0 == 0.
double n_threshold(const RateParams& p, double eta, double big_l, double grad_norm0);

/// Coarse convexity interpolation between (1, rho^k) and (C_*, rho_*);
/// comparison curve only, dominated by the node bound.
double convexity_chord_bound(const RateParams& p, double c_budget);

}  // namespace caa
