#include "caa/poly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace caa {

Polynomial::Polynomial(std::vector<double> c) : coeffs(std::move(c)) {
    if (coeffs.empty()) coeffs.push_back(0.0);
    while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
}

double Polynomial::operator()(double x) const {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Polynomial Polynomial::operator-(const Polynomial& other) const {
    std::vector<double> out(std::max(coeffs.size(), other.coeffs.size()), 0.0);
    for (size_t i = 0; i < coeffs.size(); ++i) out[i] += coeffs[i];
    for (size_t i = 0; i < other.coeffs.size(); ++i) out[i] -= other.coeffs[i];
    return Polynomial(std::move(out));
}

namespace {

// Coefficients of T_k(a x + b) from the three-term recurrence.
std::vector<double> cheb_compose(int k, double a, double b) {
    std::vector<double> prev{1.0};
    if (k == 0) return prev;
    std::vector<double> cur{b, a};
    for (int n = 1; n < k; ++n) {
        std::vector<double> next(n + 2, 0.0);
        for (size_t i = 0; i < cur.size(); ++i) {
            next[i + 1] += 2.0 * a * cur[i];
            next[i] += 2.0 * b * cur[i];
        }
        for (size_t i = 0; i < prev.size(); ++i) next[i] -= prev[i];
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

// Scalar T_k(x) by the same recurrence.
double cheb_eval(int k, double x) {
    double tp = 1.0, tc = x;
    if (k == 0) return tp;
    for (int n = 1; n < k; ++n) {
        double tn = 2.0 * x * tc - tp;
        tp = tc;
        tc = tn;
    }
    return tc;
}

// Golden-section maximization of |p| on [lo, hi].
std::pair<double, double> refine_max(const Polynomial& p, double lo, double hi, double tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = std::fabs(p(x1));
    double f2 = std::fabs(p(x2));
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = std::fabs(p(x2));
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = std::fabs(p(x1));
        }
    }
    double xm = 0.5 * (a + b);
    return {std::fabs(p(xm)), xm};
}

}  // namespace

Polynomial chebyshev_first_kind(int k) {
    if (k < 0 || k > 64) throw std::range_error("chebyshev_first_kind: k outside [0, 64]");
    return Polynomial(cheb_compose(k, 1.0, 0.0));
}

Polynomial rescaled_cheb(double rho, double eps, int k) {
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rescaled_cheb: rho must be in (0,1)");
    if (!(eps >= 0.0)) throw std::invalid_argument("rescaled_cheb: eps must be >= 0");
    if (k < 1) throw std::invalid_argument("rescaled_cheb: k must be >= 1");
    if (k > 64) throw std::range_error("rescaled_cheb: k outside [1, 64]");
    const double a = 2.0 / (rho + eps);
    const double b = (eps - rho) / (rho + eps);
    std::vector<double> c = cheb_compose(k, a, b);
    // T_k at the image of x = 1; the argument exceeds 1, so the value is positive.
    const double norm = std::fabs(cheb_eval(k, a + b));
    for (double& ci : c) ci /= norm;
    return Polynomial(std::move(c));
}

double l1_norm(const Polynomial& p) {
    double s = 0.0;
    for (double c : p.coeffs) s += std::fabs(c);
    return s;
}

IntervalMax max_abs_on_interval(const Polynomial& p, double a, double b,
                                int grid_size, double refine_tol) {
    if (!(a < b)) throw std::invalid_argument("max_abs_on_interval: need a < b");
    const int n = std::max({grid_size, 2 * (p.degree() + 1), 3});
    const double h = (b - a) / (n - 1);
    std::vector<double> vals(n);
    for (int j = 0; j < n; ++j) vals[j] = std::fabs(p(a + j * h));

    IntervalMax best{vals[0], a};
    auto consider = [&](double v, double x) {
        if (v > best.value) best = {v, x};
    };
    consider(vals[n - 1], b);
    for (int j = 0; j < n; ++j) {
        const bool local_max = (j == 0 || vals[j] >= vals[j - 1]) &&
                               (j == n - 1 || vals[j] >= vals[j + 1]);
        if (!local_max) continue;
        const double lo = a + std::max(j - 1, 0) * h;
        const double hi = a + std::min(j + 1, n - 1) * h;
        consider(vals[j], a + j * h);
        if (hi > lo) {
            auto [v, x] = refine_max(p, lo, hi, refine_tol);
            consider(v, x);
        }
    }
    return best;
}

IntervalMax max_abs_on_interval(const Polynomial& p, double a, double b) {
    return max_abs_on_interval(p, a, b, 64 * (p.degree() + 1), 1e-12);
}

}  // namespace caa
