#pragma once

#include <stdexcept>
#include <vector>

namespace caa {

enum class Relation { LessEq, Eq, GreaterEq };

struct LpRow {
    std::vector<double> coeffs;
    Relation rel;
    double rhs;
};

/// minimize objective . x  subject to rows, x >= 0.
struct LpProblem {
    std::vector<double> objective;
    std::vector<LpRow> rows;
};

struct LpSolution {
    std::vector<double> x;
    double objective;
    int pivots;
};

struct LpInfeasible : std::runtime_error {
    LpInfeasible() : std::runtime_error("LP infeasible") {}
};
struct LpUnbounded : std::runtime_error {
    LpUnbounded() : std::runtime_error("LP unbounded") {}
};

/// Dense two-phase primal simplex. Dantzig pricing with a Bland fallback
/// after a pivot budget, Harris-style tie-breaking on the ratio test, and a
/// final refactorization of the optimal basis with iterative refinement so
/// the returned point satisfies the active rows to near machine precision
/// even on ill-conditioned bases.
LpSolution solve_lp(const LpProblem& problem);

}  // namespace caa
