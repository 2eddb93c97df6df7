#include "caa/accel.hpp"

#include <cmath>
#include <limits>

namespace caa {

namespace {

void check_cfg(const CaaConfig& cfg) {
    if (cfg.k < 1) throw std::invalid_argument("CaaConfig: k must be >= 1");
    if (!cfg.unconstrained && !(cfg.c_budget >= 1.0))
        throw std::invalid_argument("CaaConfig: C must be >= 1");
    if (!(cfg.rel_tol > 0.0)) throw std::invalid_argument("CaaConfig: rel_tol must be > 0");
}

ExtrapolationWeights solve_or_best(const Eigen::MatrixXd& r, double c_budget, double rel_tol) {
    try {
        return solve_weights(r, c_budget, rel_tol);
    } catch (const LsqConvergenceError& e) {
        return e.best;  // feasible; the guard or the caller's tolerances judge it
    }
}

}  // namespace

double residual(const OperatorSpec& op, const Eigen::VectorXd& x) {
    if (!x.allFinite()) throw std::invalid_argument("residual: non-finite point");
    return (op.apply(x) - x).norm();
}

StepTrace caa_step(const OperatorSpec& op, const Eigen::VectorXd& x0, const CaaConfig& cfg) {
    check_cfg(cfg);
    if (!x0.allFinite()) throw std::invalid_argument("caa_step: non-finite start");
    StepTrace trace;
    trace.iterates.reserve(cfg.k + 2);
    trace.iterates.push_back(x0);
    for (int i = 0; i <= cfg.k; ++i) {
        Eigen::VectorXd next = op.apply(trace.iterates.back());
        if (!next.allFinite()) throw DivergenceError(std::move(trace));
        trace.iterates.push_back(std::move(next));
    }
    const int n = static_cast<int>(x0.size());
    Eigen::MatrixXd r(n, cfg.k + 1);
    for (int i = 0; i <= cfg.k; ++i) r.col(i) = trace.iterates[i] - trace.iterates[i + 1];
    trace.residual_in = r.col(0).norm();
    if (trace.residual_in == 0.0) {
        trace.weights.c = Eigen::VectorXd::Zero(cfg.k + 1);
        trace.weights.c(0) = 1.0;
        trace.weights.l1 = 1.0;
        trace.weights.residual_norm = 0.0;
        trace.weights.gap = 0.0;
        trace.extrapolated = x0;
        trace.residual_out = 0.0;
        trace.ratio = 0.0;
        return trace;
    }
    trace.weights = solve_or_best(r, cfg.effective_budget(), cfg.rel_tol);
    Eigen::VectorXd xe = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= cfg.k; ++i) xe += trace.weights.c(i) * trace.iterates[i];
    if (!xe.allFinite()) throw DivergenceError(std::move(trace));
    trace.extrapolated = std::move(xe);
    trace.residual_out = (op.apply(trace.extrapolated) - trace.extrapolated).norm();
    trace.ratio = trace.residual_out / trace.residual_in;
    return trace;
}

RunTrace guarded_caa(const OperatorSpec& op, const Eigen::VectorXd& x0, const CaaConfig& cfg,
                     int outer_iterations) {
    check_cfg(cfg);
    if (outer_iterations < 1) throw std::invalid_argument("guarded_caa: N must be >= 1");
    if (!op.gradient) throw std::invalid_argument("guarded_caa: operator exposes no gradient");
    if (!x0.allFinite()) throw std::invalid_argument("guarded_caa: non-finite start");

    RunTrace trace;
    trace.grad_norm0 = op.gradient(x0).norm();
    trace.records.reserve(outer_iterations);
    Eigen::VectorXd x = x0;
    double grad_prev = trace.grad_norm0;
    const int n = static_cast<int>(x0.size());

    for (int outer = 1; outer <= outer_iterations; ++outer) {
        std::vector<Eigen::VectorXd> inner;
        inner.reserve(cfg.k + 2);
        inner.push_back(x);
        for (int j = 0; j <= cfg.k; ++j) {
            Eigen::VectorXd next = op.apply(inner.back());
            if (!next.allFinite()) {
                trace.final_point = std::move(x);
                throw RunDivergenceError(std::move(trace));
            }
            inner.push_back(std::move(next));
        }
        Eigen::MatrixXd r(n, cfg.k + 1);
        for (int j = 0; j <= cfg.k; ++j) r.col(j) = inner[j] - inner[j + 1];
        const double res_in = r.col(0).norm();

        OuterRecord rec;
        rec.outer = outer;
        if (res_in == 0.0) {
            rec.grad_norm = 0.0;
            rec.rate_estimate = 0.0;
            trace.records.push_back(rec);
            x = inner[cfg.k];
            break;
        }
        ExtrapolationWeights w = solve_or_best(r, cfg.effective_budget(), cfg.rel_tol);
        Eigen::VectorXd xe = Eigen::VectorXd::Zero(n);
        for (int j = 0; j <= cfg.k; ++j) xe += w.c(j) * inner[j];
        double grad_e = xe.allFinite() ? op.gradient(xe).norm()
                                       : std::numeric_limits<double>::infinity();
        const double grad_k = op.gradient(inner[cfg.k]).norm();

        rec.coeff_l1 = w.l1;
        rec.ratio = op.L > 0.0 ? grad_e / (op.L * res_in) : grad_e / res_in;
        rec.extrapolated = grad_e < grad_k;
        if (rec.extrapolated) {
            x = std::move(xe);
            rec.grad_norm = grad_e;
        } else {
            x = inner[cfg.k];
            rec.grad_norm = grad_k;
        }
        rec.rate_estimate = grad_prev > 0.0 ? rec.grad_norm / grad_prev : 0.0;
        grad_prev = rec.grad_norm;
        trace.records.push_back(rec);
    }
    trace.final_point = std::move(x);
    return trace;
}

}  // namespace caa
