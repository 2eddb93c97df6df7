#include "caa/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "caa/poly.hpp"

namespace caa {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

double rate_from_beta(double beta, int k) {
    const double bk = std::pow(beta, k);
    return 2.0 * bk / (1.0 + bk * bk);
}
}  // namespace

RateParams::RateParams(double rho_, int k_) : rho(rho_), k(k_) {
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("RateParams: rho must be in (0,1)");
    if (k < 1) throw std::invalid_argument("RateParams: k must be >= 1");
}

double contraction_beta(double rho) {
    const double s = std::sqrt(1.0 - rho);
    return (1.0 - s) / (1.0 + s);
}

double rho_star(const RateParams& p) { return rate_from_beta(contraction_beta(p.rho), p.k); }

double eps_tilde(const RateParams& p) {
    const double c = std::cos((2.0 * p.k - 1.0) * kPi / (2.0 * p.k));
    return p.rho * (1.0 + c) / (1.0 - c);
}

double rho_eps(double rho, double eps, int k) {
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho_eps: rho must be in (0,1)");
    if (!(eps >= 0.0)) throw std::invalid_argument("rho_eps: eps must be >= 0");
    const double s = std::sqrt(1.0 - (rho + eps) / (1.0 + eps));
    return rate_from_beta((1.0 - s) / (1.0 + s), k);
}

double p_eps_l1(double rho, double eps, int k) {
    RateParams params(rho, k);
    if (!(eps >= 0.0) || eps > eps_tilde(params) * (1.0 + 1e-12))
        throw std::domain_error("p_eps_l1: eps outside [0, eps_tilde]");
    const double re = rho_eps(rho, eps, k);
    const double s = 2.0 * std::sqrt((1.0 + rho) * (1.0 - eps));
    const double base = 2.0 + rho - eps;
    return 0.5 * re * std::pow(1.0 / (rho + eps), k) *
           (std::pow(base - s, k) + std::pow(base + s, k));
}

double c_star(const RateParams& p) {
    const double rs = rho_star(p);
    const double s = 2.0 * std::sqrt(1.0 + p.rho);
    return rs / (2.0 * std::pow(p.rho, p.k)) *
           (std::pow(2.0 + p.rho - s, p.k) + std::pow(2.0 + p.rho + s, p.k));
}

BudgetRatePair c1_rho1(const RateParams& p) {
    const double sp = std::sqrt(1.0 + p.rho);
    const double sm = std::sqrt(1.0 - p.rho);
    const double rho1 = rate_from_beta((sp - sm) / (sp + sm), p.k);
    const double s = std::sqrt(1.0 + p.rho * p.rho);
    const double c1 = rho1 / (2.0 * std::pow(p.rho, p.k)) *
                      (std::pow(1.0 - s, p.k) + std::pow(1.0 + s, p.k));
    return {c1, rho1};
}

double tilde_rho_small_c(const RateParams& p, double c_budget) {
    const double rk = std::pow(p.rho, p.k);
    const double hi = (2.0 + rk) / (2.0 - rk);
    if (c_budget < 1.0 - 1e-12 || c_budget > hi * (1.0 + 1e-12))
        throw std::domain_error("tilde_rho_small_c: C outside [1, (2+rho^k)/(2-rho^k)]");
    return 0.5 * (c_budget + 1.0) * rk - 0.5 * (c_budget - 1.0);
}

BoundKnots global_bound(const RateParams& p, int m) {
    if (p.k <= 2) throw std::domain_error("global_bound: requires k > 2");
    if (m < 1) throw std::invalid_argument("global_bound: M must be >= 1");
    const double rk = std::pow(p.rho, p.k);
    const double et = eps_tilde(p);

    BoundKnots out;
    out.m = m;
    out.rho_star = rho_star(p);
    out.knots.emplace_back(1.0, rk);
    out.knots.emplace_back((2.0 + rk) / (2.0 - rk), rk / (2.0 - rk));
    for (int i = 1; i <= m; ++i) {
        const double eps = p.rho / std::pow(2.0, i - 1);
        const double ri = rho_eps(p.rho, eps, p.k);
        double ci;
        if (i == 1) {
            ci = c1_rho1(p).c1;
        } else if (eps <= et) {
            ci = p_eps_l1(p.rho, eps, p.k);
        } else {
            // Alternating-sign closed form is not valid here; take the true
            // coefficient norm so the node stays a certified point.
            ci = l1_norm(rescaled_cheb(p.rho, eps, p.k));
        }
        out.knots.emplace_back(ci, ri);
    }
    out.knots.emplace_back(c_star(p), out.rho_star);
    std::sort(out.knots.begin(), out.knots.end());
    return out;
}

double evaluate_bound(const BoundKnots& knots, double c_budget) {
    if (c_budget < 1.0 - 1e-12) throw std::domain_error("evaluate_bound: C must be >= 1");
    double best = knots.rho_star;
    for (size_t i = 0; i + 1 < knots.knots.size(); ++i) {
        const auto [c0, r0] = knots.knots[i];
        const auto [c1, r1] = knots.knots[i + 1];
        const double dc = c1 - c0;
        if (dc <= 1e-14 * std::max(1.0, c1)) continue;
        best = std::max(best, ((c_budget - c0) * r1 + (c1 - c_budget) * r0) / dc);
    }
    return best;
}

double hat_rho(const RateParams& p, double c_budget, double alpha, int m) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("hat_rho: alpha must be >= 0");
    return evaluate_bound(global_bound(p, m), c_budget) + 3.0 * alpha * p.k * c_budget;
}

double hat_rho_grad(const RateParams& p, double c_budget, double eta, double big_l,
                    double grad_norm, int m) {
    if (!(big_l > 0.0)) throw std::invalid_argument("hat_rho_grad: L must be > 0");
    if (!(eta >= 0.0) || !(grad_norm >= 0.0))
        throw std::invalid_argument("hat_rho_grad: eta and grad_norm must be >= 0");
    const double quad = 3.0 * (eta / (big_l * big_l)) * grad_norm *
                        static_cast<double>(p.k) * p.k * c_budget * c_budget;
    return evaluate_bound(global_bound(p, m), c_budget) + quad;
}

AlphaThresholds alpha_thresholds(const RateParams& p) {
    const double rk = std::pow(p.rho, p.k);
    const double a0 = rk * (1.0 - rk) / (3.0 * p.k * (2.0 + rk));
    const auto [c1, rho1] = c1_rho1(p);
    const double rs = rho_star(p);
    const double cs = c_star(p);
    AlphaThresholds t;
    t.alpha0 = std::max(0.0, a0);
    t.alpha1 = std::max(0.0, std::min(a0, (rk - rho1) / (3.0 * p.k * c1)));
    t.alpha2 = std::max(0.0, std::min(a0, (rk - rs) / (3.0 * p.k * cs)));
    return t;
}

GradThresholds grad_thresholds(const RateParams& p) {
    const double rk = std::pow(p.rho, p.k);
    const double k2 = static_cast<double>(p.k) * p.k;
    const double a3 = rk * (1.0 - rk) * (2.0 - rk) / (3.0 * k2 * (2.0 + rk) * (2.0 + rk));
    const auto [c1, rho1] = c1_rho1(p);
    const double rs = rho_star(p);
    const double cs = c_star(p);
    GradThresholds t;
    t.alpha3 = std::max(0.0, a3);
    t.alpha4 = std::max(0.0, std::min(a3, (rk - rho1) / (3.0 * k2 * c1 * c1)));
    t.alpha5 = std::max(0.0, std::min(a3, (rk - rs) / (3.0 * k2 * cs * cs)));
    return t;
}

double n_threshold(const RateParams& p, double eta, double big_l, double grad_norm0) {
    if (!(big_l > 0.0)) throw std::invalid_argument("n_threshold: L must be > 0");
    if (!(eta >= 0.0) || !(grad_norm0 >= 0.0))
        throw std::invalid_argument("n_threshold: eta and grad_norm0 must be >= 0");
    const double rk = std::pow(p.rho, p.k);
    const double k2 = static_cast<double>(p.k) * p.k;
    const double arg = (eta / (big_l * big_l)) * 3.0 * k2 * (2.0 + rk) * (2.0 + rk) *
                       grad_norm0 / (rk * (1.0 - rk) * (2.0 - rk));
    if (arg == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(arg) / (p.k * std::log(1.0 / p.rho));
}

double convexity_chord_bound(const RateParams& p, double c_budget) {
    if (c_budget < 1.0 - 1e-12) throw std::domain_error("convexity_chord_bound: C must be >= 1");
    const double rk = std::pow(p.rho, p.k);
    const double rs = rho_star(p);
    const double cs = c_star(p);
    if (c_budget >= cs) return rs;
    return ((cs - c_budget) * rk + (c_budget - 1.0) * rs) / (cs - 1.0);
}

}  // namespace caa
