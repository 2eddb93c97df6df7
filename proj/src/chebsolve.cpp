#include "caa/chebsolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "caa/simplex.hpp"

namespace caa {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void validate(const MinimaxProblem& pb) {
    if (!(pb.rho > 0.0 && pb.rho < 1.0))
        throw std::invalid_argument("minimax: rho must be in (0,1)");
    if (pb.k < 1 || pb.k > 16) throw std::invalid_argument("minimax: k must be in [1,16]");
    if (pb.c_budget < 1.0) throw MinimaxInfeasible();
}

// Variables: a_0..a_k, b_0..b_k, t with p = a - b. Grid rows bound
// |p(x_j) - ref(x_j)| by t; the l1 row is scaled by 1/C to keep the tableau
// near unit magnitude.
LpProblem build_lp(const MinimaxProblem& pb, const std::vector<double>& grid,
                   const Polynomial* ref) {
    const int k = pb.k;
    const int nvars = 2 * (k + 1) + 1;
    LpProblem lp;
    lp.objective.assign(nvars, 0.0);
    lp.objective[nvars - 1] = 1.0;
    lp.rows.reserve(2 * grid.size() + 2);
    std::vector<double> pw(k + 1);
    for (double x : grid) {
        pw[0] = 1.0;
        for (int i = 1; i <= k; ++i) pw[i] = pw[i - 1] * x;
        const double r = ref ? (*ref)(x) : 0.0;
        LpRow up, dn;
        up.coeffs.assign(nvars, 0.0);
        dn.coeffs.assign(nvars, 0.0);
        for (int i = 0; i <= k; ++i) {
            up.coeffs[i] = pw[i];
            up.coeffs[k + 1 + i] = -pw[i];
            dn.coeffs[i] = -pw[i];
            dn.coeffs[k + 1 + i] = pw[i];
        }
        up.coeffs[nvars - 1] = -1.0;
        dn.coeffs[nvars - 1] = -1.0;
        up.rel = Relation::LessEq;
        dn.rel = Relation::LessEq;
        up.rhs = r;
        dn.rhs = -r;
        lp.rows.push_back(std::move(up));
        lp.rows.push_back(std::move(dn));
    }
    LpRow budget;
    budget.coeffs.assign(nvars, 1.0 / pb.c_budget);
    budget.coeffs[nvars - 1] = 0.0;
    budget.rel = Relation::LessEq;
    budget.rhs = 1.0;
    lp.rows.push_back(std::move(budget));
    LpRow norm;
    norm.coeffs.assign(nvars, 0.0);
    for (int i = 0; i <= k; ++i) {
        norm.coeffs[i] = 1.0;
        norm.coeffs[k + 1 + i] = -1.0;
    }
    norm.rel = Relation::Eq;
    norm.rhs = 1.0;
    lp.rows.push_back(std::move(norm));
    return lp;
}

Polynomial coeffs_of(const LpSolution& sol, int k) {
    std::vector<double> c(k + 1);
    for (int i = 0; i <= k; ++i) c[i] = sol.x[i] - sol.x[k + 1 + i];
    return Polynomial(std::move(c));
}

MinimaxSolution exchange_solve(const MinimaxProblem& pb, double tol, int max_rounds,
                               const Polynomial* ref) {
    validate(pb);
    if (!(tol > 0.0)) throw std::invalid_argument("minimax: tol must be > 0");
    const int k = pb.k;
    const int m0 = 32 * (k + 1);
    std::vector<double> grid(m0);
    for (int j = 0; j < m0; ++j)
        grid[j] = pb.rho * (1.0 + std::cos(j * kPi / (m0 - 1))) / 2.0;

    MinimaxSolution best;
    best.value = std::numeric_limits<double>::infinity();
    best.certified_gap = std::numeric_limits<double>::infinity();
    best.iterations = 0;
    for (int round = 1; round <= max_rounds; ++round) {
        const LpSolution sol = solve_lp(build_lp(pb, grid, ref));
        Polynomial p = coeffs_of(sol, k);
        const double t = sol.objective;
        // off-grid check on the exchange objective
        IntervalMax worst = ref ? max_abs_on_interval(p - *ref, 0.0, pb.rho)
                                : max_abs_on_interval(p, 0.0, pb.rho);
        const double gap = std::max(0.0, worst.value - t);
        if (gap < best.certified_gap) {
            best.poly = p;
            best.value = t;
            best.certified_gap = gap;
            best.iterations = round;
        }
        if (gap <= tol) {
            best.poly = std::move(p);
            best.value = t;
            best.certified_gap = gap;
            best.iterations = round;
            return best;
        }
        // A repeat violator cannot tighten the LP further; the gap is then a
        // roundoff floor, not a discretization error.
        bool duplicate = false;
        for (double x : grid)
            if (std::fabs(x - worst.argmax) <= 1e-12 * std::max(1.0, pb.rho)) duplicate = true;
        if (duplicate) break;
        grid.push_back(worst.argmax);
    }
    throw ExchangeStall(std::move(best));
}

}  // namespace

MinimaxSolution solve_ctr_cheb(const MinimaxProblem& problem, double tol, int max_rounds) {
    MinimaxProblem pb = problem;
    pb.mode = MinimaxMode::direct;
    return exchange_solve(pb, tol, max_rounds, nullptr);
}

MinimaxSolution solve_projection_bound(const MinimaxProblem& problem, double tol,
                                       int max_rounds) {
    MinimaxProblem pb = problem;
    pb.mode = MinimaxMode::projection;
    const Polynomial ref = rescaled_cheb(pb.rho, 0.0, pb.k);
    MinimaxSolution sol = exchange_solve(pb, tol, max_rounds, &ref);
    sol.value = max_abs_on_interval(sol.poly, 0.0, pb.rho).value;
    return sol;
}

}  // namespace caa
