#include "caa/simplex.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace caa {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-9;

struct Tableau {
    int m = 0;        // constraint rows
    int ncols = 0;    // variables (structural + slack + artificial)
    int nstruct = 0;  // structural variables
    int nart = 0;
    std::vector<double> t;  // (m + 2) x (ncols + 1), row-major; row m = cost, m+1 = phase-1 cost
    std::vector<int> basis;

    double* row(int i) { return t.data() + static_cast<size_t>(i) * (ncols + 1); }
    const double* row(int i) const { return t.data() + static_cast<size_t>(i) * (ncols + 1); }
    double& at(int i, int j) { return row(i)[j]; }
};

void pivot(Tableau& tb, int pr, int pc) {
    const int w = tb.ncols + 1;
    double* prow = tb.row(pr);
    const double pv = prow[pc];
    for (int j = 0; j < w; ++j) prow[j] /= pv;
    prow[pc] = 1.0;
    for (int i = 0; i < tb.m + 2; ++i) {
        if (i == pr) continue;
        double* r = tb.row(i);
        const double f = r[pc];
        if (f == 0.0) continue;
        for (int j = 0; j < w; ++j) r[j] -= f * prow[j];
        r[pc] = 0.0;
    }
    tb.basis[pr] = pc;
}

int choose_entering(const Tableau& tb, int cost_row, int max_col, bool bland) {
    const double* c = tb.row(cost_row);
    if (bland) {
        for (int j = 0; j < max_col; ++j)
            if (c[j] < -kCostTol) return j;
        return -1;
    }
    int best = -1;
    double bestv = -kCostTol;
    for (int j = 0; j < max_col; ++j)
        if (c[j] < bestv) {
            bestv = c[j];
            best = j;
        }
    return best;
}

int choose_leaving(const Tableau& tb, int pc) {
    // Min-ratio test; among near-ties prefer the largest pivot magnitude,
    // then artificial basics, then the smallest basis index.
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < tb.m; ++i) {
        const double a = tb.row(i)[pc];
        if (a > kPivotTol) best_ratio = std::min(best_ratio, tb.row(i)[tb.ncols] / a);
    }
    if (!std::isfinite(best_ratio)) return -1;
    const double slack = 1e-9 * std::max(1.0, std::fabs(best_ratio));
    int pick = -1;
    double pick_a = 0.0;
    bool pick_art = false;
    const int art_start = tb.ncols - tb.nart;
    for (int i = 0; i < tb.m; ++i) {
        const double a = tb.row(i)[pc];
        if (a <= kPivotTol) continue;
        const double ratio = tb.row(i)[tb.ncols] / a;
        if (ratio > best_ratio + slack) continue;
        const bool is_art = tb.basis[i] >= art_start;
        const bool better = pick < 0 || (is_art && !pick_art) ||
                            (is_art == pick_art &&
                             (a > pick_a * (1.0 + 1e-12) ||
                              (std::fabs(a - pick_a) <= 1e-12 * pick_a && tb.basis[i] < tb.basis[pick])));
        if (better) {
            pick = i;
            pick_a = a;
            pick_art = is_art;
        }
    }
    return pick;
}

// Re-solve the final basis system from the original data and apply iterative
// refinement; Gauss-Jordan roundoff otherwise leaves the basic solution
// violating tight rows on ill-conditioned instances.
void refine_basic_solution(const LpProblem& pb, const std::vector<int>& row_sign,
                           const std::vector<int>& unit_row, const std::vector<double>& unit_sign,
                           const Tableau& tb, std::vector<double>& x_full) {
    const int m = tb.m;
    Eigen::MatrixXd basis_mat = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd rhs(m);
    for (int i = 0; i < m; ++i) rhs(i) = row_sign[i] * pb.rows[i].rhs;
    for (int col = 0; col < m; ++col) {
        const int v = tb.basis[col];
        if (v < tb.nstruct) {
            for (int i = 0; i < m; ++i) basis_mat(i, col) = row_sign[i] * pb.rows[i].coeffs[v];
        } else {
            basis_mat(unit_row[v], col) = unit_sign[v];
        }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_mat);
    Eigen::VectorXd xb = lu.solve(rhs);
    for (int sweep = 0; sweep < 2; ++sweep) {
        Eigen::VectorXd resid = rhs - basis_mat * xb;
        xb += lu.solve(resid);
    }
    if (!xb.allFinite()) return;
    std::vector<double> candidate(tb.ncols, 0.0);
    for (int i = 0; i < m; ++i) candidate[tb.basis[i]] = xb(i);
    // keep the refined point only if it stayed close to the tableau solution
    double drift = 0.0, scale = 0.0;
    for (int j = 0; j < tb.ncols; ++j) {
        drift = std::max(drift, std::fabs(candidate[j] - x_full[j]));
        scale = std::max(scale, std::fabs(x_full[j]));
    }
    if (drift <= 1e-4 * std::max(1.0, scale)) x_full = candidate;
}

}  // namespace

LpSolution solve_lp(const LpProblem& pb) {
    const int nstruct = static_cast<int>(pb.objective.size());
    const int m = static_cast<int>(pb.rows.size());
    for (const auto& r : pb.rows)
        if (static_cast<int>(r.coeffs.size()) != nstruct)
            throw std::invalid_argument("solve_lp: row width mismatch");

    // Normalize to nonnegative rhs; remember flips.
    std::vector<int> row_sign(m, 1);
    std::vector<Relation> rel(m);
    for (int i = 0; i < m; ++i) {
        rel[i] = pb.rows[i].rel;
        if (pb.rows[i].rhs < 0.0) {
            row_sign[i] = -1;
            if (rel[i] == Relation::LessEq)
                rel[i] = Relation::GreaterEq;
            else if (rel[i] == Relation::GreaterEq)
                rel[i] = Relation::LessEq;
        }
    }

    int nslack = 0, nart = 0;
    for (int i = 0; i < m; ++i) {
        if (rel[i] != Relation::Eq) ++nslack;
        if (rel[i] != Relation::LessEq) ++nart;
    }
    Tableau tb;
    tb.m = m;
    tb.nstruct = nstruct;
    tb.nart = nart;
    tb.ncols = nstruct + nslack + nart;
    tb.t.assign(static_cast<size_t>(m + 2) * (tb.ncols + 1), 0.0);
    tb.basis.assign(m, -1);

    std::vector<int> unit_row(tb.ncols, -1);
    std::vector<double> unit_sign(tb.ncols, 0.0);
    int next_slack = nstruct;
    int next_art = nstruct + nslack;
    for (int i = 0; i < m; ++i) {
        double* r = tb.row(i);
        for (int j = 0; j < nstruct; ++j) r[j] = row_sign[i] * pb.rows[i].coeffs[j];
        r[tb.ncols] = row_sign[i] * pb.rows[i].rhs;
        if (rel[i] == Relation::LessEq) {
            r[next_slack] = 1.0;
            unit_row[next_slack] = i;
            unit_sign[next_slack] = 1.0;
            tb.basis[i] = next_slack++;
        } else if (rel[i] == Relation::GreaterEq) {
            r[next_slack] = -1.0;
            unit_row[next_slack] = i;
            unit_sign[next_slack] = -1.0;
            ++next_slack;
            r[next_art] = 1.0;
            unit_row[next_art] = i;
            unit_sign[next_art] = 1.0;
            tb.basis[i] = next_art++;
        } else {
            r[next_art] = 1.0;
            unit_row[next_art] = i;
            unit_sign[next_art] = 1.0;
            tb.basis[i] = next_art++;
        }
    }
    // Phase-2 cost row (reduced: initial basis has zero cost).
    for (int j = 0; j < nstruct; ++j) tb.at(m, j) = pb.objective[j];
    // Phase-1 cost row: sum of artificial rows, negated.
    const int art_start = tb.ncols - nart;
    for (int i = 0; i < m; ++i) {
        if (tb.basis[i] < art_start) continue;
        const double* r = tb.row(i);
        double* w = tb.row(m + 1);
        for (int j = 0; j <= tb.ncols; ++j) w[j] -= r[j];
        w[tb.basis[i]] = 0.0;
    }

    int pivots = 0;
    const int bland_after = 2000 + 6 * (m + tb.ncols);
    const int hard_cap = 200000;
    auto run = [&](int cost_row, int max_col) {
        while (true) {
            const int pc = choose_entering(tb, cost_row, max_col, pivots > bland_after);
            if (pc < 0) return;
            const int pr = choose_leaving(tb, pc);
            if (pr < 0) throw LpUnbounded();
            pivot(tb, pr, pc);
            if (++pivots > hard_cap) throw std::runtime_error("solve_lp: pivot cap exceeded");
        }
    };

    if (nart > 0) {
        run(m + 1, tb.ncols);  // artificial columns included so they can leave and re-enter at 0
        const double w_opt = -tb.at(m + 1, tb.ncols);
        if (w_opt > 1e-7 * std::max(1.0, std::fabs(tb.at(m, tb.ncols)))) throw LpInfeasible();
        // Drive basic artificials out where possible.
        for (int i = 0; i < m; ++i) {
            if (tb.basis[i] < art_start) continue;
            for (int j = 0; j < art_start; ++j) {
                if (std::fabs(tb.row(i)[j]) > 1e-8) {
                    pivot(tb, i, j);
                    ++pivots;
                    break;
                }
            }
        }
    }
    run(m, art_start);

    std::vector<double> x_full(tb.ncols, 0.0);
    for (int i = 0; i < m; ++i) x_full[tb.basis[i]] = tb.row(i)[tb.ncols];
    if (m > 0) refine_basic_solution(pb, row_sign, unit_row, unit_sign, tb, x_full);

    LpSolution sol;
    sol.x.assign(x_full.begin(), x_full.begin() + nstruct);
    sol.objective = 0.0;
    for (int j = 0; j < nstruct; ++j) sol.objective += pb.objective[j] * sol.x[j];
    sol.pivots = pivots;
    return sol;
}

}  // namespace caa
