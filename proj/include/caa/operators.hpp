#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace caa {

/// A fixed-point map with the metadata the rate calculus needs. rho is a
/// Lipschitz constant of apply; (mu, L, eta) are set for gradient-step
/// operators; alpha is the exact Lipschitz constant of the nonlinear part
/// when the construction pins it.
struct OperatorSpec {
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply;
    int n = 0;
    double rho = 0.0;
    double mu = 0.0;
    double L = 0.0;
    double eta = 0.0;
    double alpha = 0.0;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
    std::optional<Eigen::VectorXd> fixed_point;
};

/// F(x) = Q diag(spectrum) Q' x + b with seeded Haar-like Q and Gaussian b.
/// Spectrum values must lie in [0, 1); the fixed point is solved and stored.
OperatorSpec make_linear(const std::vector<double>& spectrum, std::uint64_t seed);

/// Linear part as above plus alpha * sin(x + phase) componentwise; the
/// perturbation is exactly alpha-Lipschitz. The fixed point is iterated to
/// near machine precision when the total Lipschitz constant is below one.
OperatorSpec make_perturbed_linear(const std::vector<double>& spectrum, double alpha,
                                   std::uint64_t seed);

enum class GradientFamily { quadratic, logistic_ridge, cubic_perturbed_quadratic };

struct GradientParams {
    int n = 10;
    double mu = 0.1;  // strong convexity target; ridge weight for logistic_ridge
    double L = 1.0;   // smoothness target (quadratic, cubic)
    double eta = 0.0;  // Hessian-Lipschitz constant (cubic); ignored elsewhere
    double curvature_cap = 1.0;  // cubic: cap on the separable second derivative
    int samples = 0;             // logistic_ridge rows; 0 means 4n
    double shift_scale = 0.0;    // quadratic: random minimizer offset scale
};

/// Gradient-step operator x - grad f(x) / L for a seeded instance of the
/// family. quadratic: eta = 0, spectrum pinned to [mu, L]. cubic: separable
/// capped-cubic term with exact (mu, L, eta). logistic_ridge: eta is the
/// analytic third-derivative bound times the mean cubed data norm.
OperatorSpec make_gradient_step(GradientFamily family, const GradientParams& params,
                                std::uint64_t seed);

/// Lipschitz constant of the nonlinear part of a gradient-step operator on
/// the extrapolation set: (eta / L^2) k C ||grad f(x0)||.
double alpha_gradient(double eta, double big_l, int k, double c_budget, double grad_norm0);

}  // namespace caa
