#pragma once

#include <stdexcept>

#include "caa/poly.hpp"

namespace caa {

enum class MinimaxMode { direct, projection };

/// Instance of the l1-budgeted minimax problem on [0, rho]: minimize the
/// maximum of |p| (direct) or of |p - p_ref| with p_ref the unconstrained
/// minimax polynomial (projection), over degree-k polynomials with p(1) = 1
/// and coefficient l1 norm at most c_budget.
struct MinimaxProblem {
    double rho;
    int k;
    double c_budget;
    MinimaxMode mode = MinimaxMode::direct;
};

struct MinimaxSolution {
    Polynomial poly;
    double value;          // objective estimate (direct: max |p|; see solve docs)
    double certified_gap;  // bound on the remaining discretization error
    int iterations;        // exchange rounds used
};

struct MinimaxInfeasible : std::runtime_error {
    MinimaxInfeasible() : std::runtime_error("minimax problem infeasible: C < 1") {}
};

/// Exchange loop gave up before certifying the gap; best carries the last LP
/// solution and its measured gap.
struct ExchangeStall : std::runtime_error {
    MinimaxSolution best;
    explicit ExchangeStall(MinimaxSolution b)
        : std::runtime_error("exchange refinement stalled"), best(std::move(b)) {}
};

/// Discretized-LP solve of the direct problem with exchange refinement:
/// Chebyshev-distributed initial grid of 32 (k+1) points, one added
/// violator per round, at most `max_rounds` rounds. On success,
/// value is the LP optimum and max |poly| on [0, rho] <= value + certified_gap
/// with certified_gap <= tol.
MinimaxSolution solve_ctr_cheb(const MinimaxProblem& problem, double tol = 1e-6,
                               int max_rounds = 50);

/// Same machinery for the projection variant. The reported value is
/// max |poly| over [0, rho] (not the projection objective); certified_gap
/// certifies the projection objective's grid error.
MinimaxSolution solve_projection_bound(const MinimaxProblem& problem, double tol = 1e-6,
                                       int max_rounds = 50);

}  // namespace caa
