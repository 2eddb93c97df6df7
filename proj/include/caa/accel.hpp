#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "caa/lsq.hpp"
#include "caa/operators.hpp"

namespace caa {

struct CaaConfig {
    int k = 5;
    double c_budget = 10.0;
    bool unconstrained = false;  // budget becomes 1e9; same solver path
    double rel_tol = 1e-8;       // weight-subproblem precision, relative to ||F(x0)-x0||

    double effective_budget() const { return unconstrained ? 1e9 : c_budget; }
};

/// One extrapolation window: the k+2 iterates, the weights, the extrapolated
/// point and the residual contraction achieved.
struct StepTrace {
    std::vector<Eigen::VectorXd> iterates;  // x_0 .. x_{k+1}
    ExtrapolationWeights weights;
    Eigen::VectorXd extrapolated;
    double residual_in = 0.0;
    double residual_out = 0.0;
    double ratio = 0.0;  // residual_out / residual_in; 0 at an exact fixed point
};

struct DivergenceError : std::runtime_error {
    StepTrace partial;
    explicit DivergenceError(StepTrace t)
        : std::runtime_error("caa_step: non-finite iterate"), partial(std::move(t)) {}
};

struct OuterRecord {
    int outer = 0;            // 1-based outer iteration index
    double grad_norm = 0.0;   // ||grad f|| at the accepted iterate
    bool extrapolated = false;  // guard kept the extrapolated point
    double coeff_l1 = 0.0;
    double ratio = 0.0;          // extrapolation residual ratio for this window
    double rate_estimate = 0.0;  // grad_norm relative to the previous outer iterate
};

struct RunTrace {
    double grad_norm0 = 0.0;
    std::vector<OuterRecord> records;
    Eigen::VectorXd final_point;
};

struct RunDivergenceError : std::runtime_error {
    RunTrace partial;
    explicit RunDivergenceError(RunTrace t)
        : std::runtime_error("guarded_caa: non-finite iterate"), partial(std::move(t)) {}
};

/// ||F(x) - x||.
double residual(const OperatorSpec& op, const Eigen::VectorXd& x);

/// One constrained Anderson extrapolation: k+1 applications of F, weight
/// solve, extrapolated point and residual ratio. An exact fixed point input
/// returns immediately with ratio 0.
StepTrace caa_step(const OperatorSpec& op, const Eigen::VectorXd& x0, const CaaConfig& cfg);

/// Guarded outer loop on a gradient-step operator: each outer iteration runs
/// k+1 inner steps, extrapolates, and keeps whichever of the extrapolated
/// point and the k-th inner iterate has the smaller gradient norm. The guard
/// makes the per-outer contraction at most rho^k.
RunTrace guarded_caa(const OperatorSpec& op, const Eigen::VectorXd& x0, const CaaConfig& cfg,
                     int outer_iterations);

}  // namespace caa
