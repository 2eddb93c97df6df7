#pragma once

#include <vector>

namespace caa {

/// Dense univariate polynomial in the monomial basis:
/// coeffs[0] + coeffs[1] x + ... + coeffs[d] x^d.
struct Polynomial {
    std::vector<double> coeffs;

    Polynomial() : coeffs{0.0} {}
    explicit Polynomial(std::vector<double> c);

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }

    /// Horner evaluation.
    double operator()(double x) const;

    Polynomial operator-(const Polynomial& other) const;
};

/// First-kind Chebyshev polynomial T_k in the monomial basis.
/// Supported range 0 <= k <= 64; coefficients stay representable in double.
Polynomial chebyshev_first_kind(int k);

/// Minimax-normalized Chebyshev rescaling to the interval [-eps, rho]:
///   p(x) = T_k(2 (x+eps)/(rho+eps) - 1) / T_k(2 (1+eps)/(rho+eps) - 1),
/// so that p(1) = 1. Requires 0 < rho < 1, eps >= 0, k >= 1.
Polynomial rescaled_cheb(double rho, double eps, int k);

/// Sum of absolute values of the coefficients.
double l1_norm(const Polynomial& p);

struct IntervalMax {
    double value;
    double argmax;
};

/// Maximum of |p| over [a, b]: dense grid scan followed by golden-section
/// refinement around each local maximum. grid_size is clamped below at
/// 2 (degree+1) points.
IntervalMax max_abs_on_interval(const Polynomial& p, double a, double b,
                                int grid_size, double refine_tol);

/// Defaults: grid_size = 64 (degree+1), refine_tol = 1e-12.
IntervalMax max_abs_on_interval(const Polynomial& p, double a, double b);

}  // namespace caa
