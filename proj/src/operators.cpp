#include "caa/operators.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

namespace caa {

namespace {

Eigen::MatrixXd haar_orthogonal(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    return qr.householderQ();
}

Eigen::VectorXd gauss_vector(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = gauss(rng);
    return v;
}

// eigenvalues spanning [lo, hi] with both endpoints pinned
std::vector<double> pinned_spectrum(int n, double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(lo, hi);
    std::vector<double> lam(n);
    lam[0] = lo;
    lam[n - 1] = hi;
    for (int i = 1; i + 1 < n; ++i) lam[i] = unif(rng);
    return lam;
}

Eigen::MatrixXd symmetric_with_spectrum(const std::vector<double>& lam, std::mt19937_64& rng) {
    const int n = static_cast<int>(lam.size());
    Eigen::MatrixXd q = haar_orthogonal(n, rng);
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(lam.data(), n);
    return q * d.asDiagonal() * q.transpose();
}

std::optional<Eigen::VectorXd> iterate_fixed_point(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply, int n, double lipschitz) {
    if (!(lipschitz < 1.0)) return std::nullopt;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int it = 0; it < 2000000; ++it) {
        Eigen::VectorXd next = apply(x);
        const double step = (next - x).norm();
        x = std::move(next);
        if (step <= 1e-14 * std::max(1.0, x.norm())) return x;
    }
    return std::nullopt;
}

// separable capped-cubic term: psi''(u) = min(|u|, cap)
double capped_cubic_grad(double u, double cap) {
    const double a = std::fabs(u);
    const double s = u < 0.0 ? -1.0 : 1.0;
    if (a <= cap) return s * 0.5 * a * a;
    return s * (cap * a - 0.5 * cap * cap);
}

OperatorSpec make_quadratic(const GradientParams& p, std::mt19937_64& rng) {
    Eigen::MatrixXd h = symmetric_with_spectrum(pinned_spectrum(p.n, p.mu, p.L, rng), rng);
    Eigen::VectorXd center = Eigen::VectorXd::Zero(p.n);
    if (p.shift_scale != 0.0) center = p.shift_scale * gauss_vector(p.n, rng);
    auto hptr = std::make_shared<Eigen::MatrixXd>(std::move(h));
    auto cptr = std::make_shared<Eigen::VectorXd>(std::move(center));
    OperatorSpec op;
    op.n = p.n;
    op.mu = p.mu;
    op.L = p.L;
    op.eta = 0.0;
    op.rho = 1.0 - p.mu / p.L;
    op.gradient = [hptr, cptr](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return *hptr * (x - *cptr);
    };
    const double big_l = p.L;
    auto grad = op.gradient;
    op.apply = [grad, big_l](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return x - grad(x) / big_l;
    };
    op.fixed_point = *cptr;
    return op;
}

OperatorSpec make_cubic(const GradientParams& p, std::mt19937_64& rng) {
    if (!(p.eta >= 0.0) || !(p.curvature_cap > 0.0))
        throw std::invalid_argument("make_gradient_step: cubic needs eta >= 0 and a positive cap");
    const double quad_top = p.L - p.eta * p.curvature_cap;
    if (!(quad_top >= p.mu))
        throw std::invalid_argument("make_gradient_step: need mu <= L - eta * cap");
    Eigen::MatrixXd h = symmetric_with_spectrum(pinned_spectrum(p.n, p.mu, quad_top, rng), rng);
    auto hptr = std::make_shared<Eigen::MatrixXd>(std::move(h));
    const double eta = p.eta, cap = p.curvature_cap;
    OperatorSpec op;
    op.n = p.n;
    op.mu = p.mu;
    op.L = p.L;
    op.eta = eta;
    op.rho = 1.0 - p.mu / p.L;
    op.gradient = [hptr, eta, cap](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd g = *hptr * x;
        for (int i = 0; i < x.size(); ++i) g(i) += eta * capped_cubic_grad(x(i), cap);
        return g;
    };
    auto grad = op.gradient;
    const double big_l = p.L;
    op.apply = [grad, big_l](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return x - grad(x) / big_l;
    };
    // psi'(0) = 0, so the minimizer sits exactly at the origin and gradient
    // norms decay without cancellation floors.
    op.fixed_point = Eigen::VectorXd::Zero(p.n);
    return op;
}

OperatorSpec make_logistic(const GradientParams& p, std::mt19937_64& rng) {
    const int m = p.samples > 0 ? p.samples : 4 * p.n;
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd data(m, p.n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < p.n; ++j) data(i, j) = gauss(rng) / std::sqrt(double(p.n));
    Eigen::VectorXd labels(m);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < m; ++i) labels(i) = unif(rng) < 0.5 ? -1.0 : 1.0;

    const double ridge = p.mu;
    if (!(ridge > 0.0)) throw std::invalid_argument("make_gradient_step: logistic needs mu > 0");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(data);
    const double smax2 = svd.singularValues()(0) * svd.singularValues()(0);
    const double big_l = ridge + smax2 / (4.0 * m);
    double cube_sum = 0.0;
    for (int i = 0; i < m; ++i) cube_sum += std::pow(data.row(i).norm(), 3);
    const double eta = cube_sum / (6.0 * std::sqrt(3.0) * m);

    auto aptr = std::make_shared<Eigen::MatrixXd>(std::move(data));
    auto yptr = std::make_shared<Eigen::VectorXd>(std::move(labels));
    OperatorSpec op;
    op.n = p.n;
    op.mu = ridge;
    op.L = big_l;
    op.eta = eta;
    op.rho = 1.0 - ridge / big_l;
    const int rows = m;
    op.gradient = [aptr, yptr, ridge, rows](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd margins = (*aptr) * x;
        Eigen::VectorXd w(rows);
        for (int i = 0; i < rows; ++i) {
            const double t = (*yptr)(i)*margins(i);
            w(i) = -(*yptr)(i) / (1.0 + std::exp(t));
        }
        return aptr->transpose() * w / rows + ridge * x;
    };
    auto grad = op.gradient;
    op.apply = [grad, big_l](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return x - grad(x) / big_l;
    };
    auto fp = iterate_fixed_point(op.apply, p.n, op.rho);
    if (fp) op.fixed_point = std::move(*fp);
    return op;
}

}  // namespace

OperatorSpec make_linear(const std::vector<double>& spectrum, std::uint64_t seed) {
    const int n = static_cast<int>(spectrum.size());
    if (n < 1) throw std::invalid_argument("make_linear: empty spectrum");
    double rho = 0.0;
    for (double s : spectrum) {
        if (!(s >= 0.0) || s >= 1.0)
            throw std::invalid_argument("make_linear: spectrum values must lie in [0, 1)");
        rho = std::max(rho, s);
    }
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd q = haar_orthogonal(n, rng);
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(spectrum.data(), n);
    Eigen::MatrixXd a = q * d.asDiagonal() * q.transpose();
    Eigen::VectorXd b = gauss_vector(n, rng);
    Eigen::VectorXd fixed =
        (Eigen::MatrixXd::Identity(n, n) - a).colPivHouseholderQr().solve(b);
    auto aptr = std::make_shared<Eigen::MatrixXd>(std::move(a));
    auto bptr = std::make_shared<Eigen::VectorXd>(std::move(b));
    OperatorSpec op;
    op.n = n;
    op.rho = rho;
    op.alpha = 0.0;
    op.apply = [aptr, bptr](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return *aptr * x + *bptr;
    };
    op.fixed_point = std::move(fixed);
    return op;
}

OperatorSpec make_perturbed_linear(const std::vector<double>& spectrum, double alpha,
                                   std::uint64_t seed) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("make_perturbed_linear: alpha must be >= 0");
    OperatorSpec base = make_linear(spectrum, seed);
    if (alpha == 0.0) return base;
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> unif(0.0, 2.0 * 3.141592653589793);
    auto phases = std::make_shared<Eigen::VectorXd>(base.n);
    for (int i = 0; i < base.n; ++i) (*phases)(i) = unif(rng);
    auto lin = base.apply;
    OperatorSpec op;
    op.n = base.n;
    op.alpha = alpha;
    op.rho = base.rho + alpha;
    op.apply = [lin, phases, alpha](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd out = lin(x);
        for (int i = 0; i < x.size(); ++i) out(i) += alpha * std::sin(x(i) + (*phases)(i));
        return out;
    };
    op.fixed_point = iterate_fixed_point(op.apply, op.n, op.rho);
    return op;
}

OperatorSpec make_gradient_step(GradientFamily family, const GradientParams& params,
                                std::uint64_t seed) {
    if (params.n < 1) throw std::invalid_argument("make_gradient_step: n must be >= 1");
    if (!(params.mu > 0.0) || !(params.mu <= params.L))
        throw std::invalid_argument("make_gradient_step: need 0 < mu <= L");
    std::mt19937_64 rng(seed);
    switch (family) {
        case GradientFamily::quadratic:
            return make_quadratic(params, rng);
        case GradientFamily::cubic_perturbed_quadratic:
            return make_cubic(params, rng);
        case GradientFamily::logistic_ridge:
            return make_logistic(params, rng);
    }
    throw std::invalid_argument("make_gradient_step: unknown family");
}

double alpha_gradient(double eta, double big_l, int k, double c_budget, double grad_norm0) {
    if (!(big_l > 0.0)) throw std::invalid_argument("alpha_gradient: L must be > 0");
    if (!(eta >= 0.0) || !(c_budget >= 0.0) || !(grad_norm0 >= 0.0) || k < 0)
        throw std::invalid_argument("alpha_gradient: inputs must be nonnegative");
    return (eta / (big_l * big_l)) * k * c_budget * grad_norm0;
}

}  // namespace caa
