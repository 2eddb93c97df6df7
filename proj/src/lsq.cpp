#include "caa/lsq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace caa {

namespace {

struct VertexKey {
    int plus;
    int minus;  // -1 for a simplex vertex e_plus
};

struct Atom {
    VertexKey key;
    double weight;
};

void add_vertex(Eigen::VectorXd& v, const VertexKey& key, double c_budget, double scale) {
    if (key.minus < 0) {
        v(key.plus) += scale;
    } else {
        v(key.plus) += scale * 0.5 * (c_budget + 1.0);
        v(key.minus) -= scale * 0.5 * (c_budget - 1.0);
    }
}

VertexKey lmo_key(const Eigen::VectorXd& g, double c_budget) {
    int imin = 0, imax = 0;
    for (int i = 1; i < g.size(); ++i) {
        if (g(i) < g(imin)) imin = i;
        if (g(i) > g(imax)) imax = i;
    }
    if (c_budget == 1.0 || imin == imax || g(imin) == g(imax)) return {imin, -1};
    return {imin, imax};
}

double vertex_dot(const Eigen::VectorXd& g, const VertexKey& key, double c_budget) {
    if (key.minus < 0) return g(key.plus);
    return 0.5 * (c_budget + 1.0) * g(key.plus) - 0.5 * (c_budget - 1.0) * g(key.minus);
}

Eigen::VectorXd rebuild(const std::vector<Atom>& atoms, int n, double c_budget) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (const Atom& a : atoms) add_vertex(x, a.key, c_budget, a.weight);
    return x;
}

void normalize_weights(std::vector<Atom>& atoms) {
    double s = 0.0;
    for (const Atom& a : atoms) s += a.weight;
    if (s > 0.0)
        for (Atom& a : atoms) a.weight /= s;
}

// Exact minimization over the affine face fixed by the sign pattern of x:
// 1'c = 1, sign'c = C on the support, zeros elsewhere. Returns false when the
// face is unusable (inconsistent pattern or sign flip in the solution).
bool polish_on_face(const Eigen::MatrixXd& R, const Eigen::VectorXd& x, double c_budget,
                    Eigen::VectorXd& out) {
    const int n = static_cast<int>(x.size());
    std::vector<int> support;
    for (int i = 0; i < n; ++i)
        if (std::fabs(x(i)) > 1e-12 * std::max(1.0, c_budget)) support.push_back(i);
    const int na = static_cast<int>(support.size());
    if (na < 2) return false;
    bool has_neg = false;
    for (int i : support) has_neg |= x(i) < 0.0;
    if (c_budget > 1.0 && !has_neg) return false;  // budget inactive on this face

    const int ne = (c_budget > 1.0) ? 2 : 1;
    Eigen::MatrixXd eq(ne, na);
    Eigen::VectorXd d(ne);
    eq.row(0).setOnes();
    d(0) = 1.0;
    if (ne == 2) {
        for (int j = 0; j < na; ++j) eq(1, j) = x(support[j]) > 0.0 ? 1.0 : -1.0;
        d(1) = c_budget;
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> eq_cod(eq);
    Eigen::VectorXd particular = eq_cod.solve(d);
    if ((eq * particular - d).norm() > 1e-9 * std::max(1.0, c_budget)) return false;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(eq);
    Eigen::MatrixXd kernel = lu.kernel();
    Eigen::MatrixXd r_sub(R.rows(), na);
    for (int j = 0; j < na; ++j) r_sub.col(j) = R.col(support[j]);
    Eigen::VectorXd face = particular;
    if (kernel.cols() > 0 && kernel.squaredNorm() > 0.0) {
        Eigen::MatrixXd rk = r_sub * kernel;
        Eigen::VectorXd z =
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(rk).solve(-r_sub * particular);
        face += kernel * z;
    }
    for (int j = 0; j < na; ++j) {
        const double s = x(support[j]) > 0.0 ? 1.0 : -1.0;
        if (s * face(j) < -1e-13 * std::max(1.0, c_budget)) return false;
    }
    out = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < na; ++j) out(support[j]) = face(j);
    if (std::fabs(out.sum() - 1.0) > 1e-8) return false;
    if (out.lpNorm<1>() > c_budget * (1.0 + 1e-10)) return false;
    return true;
}

// Vertex decomposition of a face point: positive and negative parts are
// independent marginals over the two-index vertices.
std::vector<Atom> atomize(const Eigen::VectorXd& c, double c_budget) {
    const int n = static_cast<int>(c.size());
    std::vector<Atom> atoms;
    if (c_budget == 1.0) {
        for (int i = 0; i < n; ++i)
            if (c(i) > 1e-16) atoms.push_back({{i, -1}, c(i)});
        normalize_weights(atoms);
        return atoms;
    }
    std::vector<double> mu(n, 0.0), nu(n, 0.0);
    double smu = 0.0, snu = 0.0;
    for (int i = 0; i < n; ++i) {
        if (c(i) > 0.0) smu += (mu[i] = c(i) / (0.5 * (c_budget + 1.0)));
        if (c(i) < 0.0) snu += (nu[i] = -c(i) / (0.5 * (c_budget - 1.0)));
    }
    if (smu <= 0.0 || snu <= 0.0) return atoms;
    for (int i = 0; i < n; ++i) {
        if (mu[i] <= 0.0) continue;
        for (int j = 0; j < n; ++j) {
            if (nu[j] <= 0.0) continue;
            const double w = (mu[i] / smu) * (nu[j] / snu);
            if (w > 1e-16) atoms.push_back({{i, j}, w});
        }
    }
    normalize_weights(atoms);
    return atoms;
}

ExtrapolationWeights pack(const Eigen::MatrixXd& R, Eigen::VectorXd c, double gap) {
    // pin the affine constraint exactly; the objective moves by O(eps)
    c.array() -= (c.sum() - 1.0) / static_cast<double>(c.size());
    ExtrapolationWeights w;
    w.residual_norm = (R * c).norm();
    w.l1 = c.lpNorm<1>();
    w.c = std::move(c);
    w.gap = std::max(0.0, gap);
    return w;
}

}  // namespace

Eigen::VectorXd linear_minimization(const Eigen::VectorXd& gradient, double c_budget) {
    if (!(c_budget >= 1.0)) throw std::invalid_argument("linear_minimization: C must be >= 1");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(gradient.size());
    add_vertex(v, lmo_key(gradient, c_budget), c_budget, 1.0);
    return v;
}

ExtrapolationWeights solve_weights(const Eigen::MatrixXd& residual_matrix, double c_budget,
                                   double rel_tol) {
    const Eigen::MatrixXd& R = residual_matrix;
    const int kp1 = static_cast<int>(R.cols());
    if (kp1 < 2) throw std::invalid_argument("solve_weights: need at least two columns");
    if (!R.allFinite()) throw std::invalid_argument("solve_weights: non-finite entries in R");
    if (!(c_budget >= 1.0)) throw std::invalid_argument("solve_weights: C must be >= 1");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("solve_weights: rel_tol must be > 0");

    const double scale = R.col(0).norm();
    const double target = rel_tol * scale;

    // Equality-constrained minimizer; when it fits in the l1 ball it is the
    // constrained optimum as well.
    {
        Eigen::VectorXd center = Eigen::VectorXd::Constant(kp1, 1.0 / kp1);
        Eigen::MatrixXd null_basis = Eigen::MatrixXd::Zero(kp1, kp1 - 1);
        for (int j = 0; j < kp1 - 1; ++j) {
            null_basis(j, j) = 1.0;
            null_basis(kp1 - 1, j) = -1.0;
        }
        Eigen::MatrixXd rn = R * null_basis;
        Eigen::VectorXd z =
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(rn).solve(-R * center);
        Eigen::VectorXd c_eq = center + null_basis * z;
        if (c_eq.lpNorm<1>() <= c_budget * (1.0 + 1e-12)) return pack(R, std::move(c_eq), 0.0);
    }

    const Eigen::MatrixXd gram = R.transpose() * R;
    std::vector<Atom> atoms;
    {
        Eigen::VectorXd g0 = gram * Eigen::VectorXd::Constant(kp1, 1.0 / kp1);
        atoms.push_back({lmo_key(g0, c_budget), 1.0});
    }
    Eigen::VectorXd x = rebuild(atoms, kp1, c_budget);

    const int cap = std::max(
        1000, 10 * (kp1 + 1) * (kp1 + 1) *
                  static_cast<int>(std::ceil(4.0 * std::log10(std::max(10.0, 1.0 / rel_tol)))));
    double cert = std::numeric_limits<double>::infinity();
    for (int it = 0; it < cap; ++it) {
        Eigen::VectorXd g = gram * x;
        const double f2 = x.dot(g);
        const double rnorm = std::sqrt(std::max(f2, 0.0));
        const VertexKey s = lmo_key(g, c_budget);
        const double fw_gap = std::max(0.0, g.dot(x) - vertex_dot(g, s, c_budget));
        cert = rnorm > 0.0 ? 2.0 * fw_gap / rnorm : 0.0;
        if (rnorm <= target || cert <= target) return pack(R, std::move(x), std::min(cert, rnorm));

        if (it % (2 * kp1) == kp1) {
            Eigen::VectorXd polished;
            if (polish_on_face(R, x, c_budget, polished) &&
                polished.dot(gram * polished) <= f2 * (1.0 + 1e-12)) {
                std::vector<Atom> re = atomize(polished, c_budget);
                if (!re.empty()) {
                    atoms = std::move(re);
                    x = rebuild(atoms, kp1, c_budget);
                    continue;
                }
            }
        }

        // away vertex among the active atoms
        int away_idx = 0;
        double away_val = -std::numeric_limits<double>::infinity();
        for (size_t a = 0; a < atoms.size(); ++a) {
            const double v = vertex_dot(g, atoms[a].key, c_budget);
            if (v > away_val) {
                away_val = v;
                away_idx = static_cast<int>(a);
            }
        }
        const double away_gap = away_val - g.dot(x);

        Eigen::VectorXd d;
        double gamma_max;
        bool fw_step = fw_gap >= away_gap || atoms.size() == 1;
        if (fw_step) {
            Eigen::VectorXd sv = Eigen::VectorXd::Zero(kp1);
            add_vertex(sv, s, c_budget, 1.0);
            d = sv - x;
            gamma_max = 1.0;
        } else {
            Eigen::VectorXd av = Eigen::VectorXd::Zero(kp1);
            add_vertex(av, atoms[away_idx].key, c_budget, 1.0);
            d = x - av;
            const double w = atoms[away_idx].weight;
            gamma_max = w / std::max(1.0 - w, 1e-18);
        }
        const double gd = g.dot(d);
        const double dgd = d.dot(gram * d);
        double gamma;
        if (dgd > 0.0)
            gamma = std::clamp(-gd / dgd, 0.0, gamma_max);
        else
            gamma = gd < 0.0 ? gamma_max : 0.0;
        if (gamma <= 0.0 && fw_step) {
            // no feasible progress left; the gap certificate is the result
            return pack(R, std::move(x), std::min(cert, rnorm));
        }

        if (fw_step) {
            for (Atom& a : atoms) a.weight *= (1.0 - gamma);
            bool found = false;
            for (Atom& a : atoms)
                if (a.key.plus == s.plus && a.key.minus == s.minus) {
                    a.weight += gamma;
                    found = true;
                    break;
                }
            if (!found) atoms.push_back({s, gamma});
        } else {
            for (Atom& a : atoms) a.weight *= (1.0 + gamma);
            atoms[away_idx].weight -= gamma;
        }
        atoms.erase(std::remove_if(atoms.begin(), atoms.end(),
                                   [](const Atom& a) { return a.weight <= 1e-18; }),
                    atoms.end());
        normalize_weights(atoms);
        x = rebuild(atoms, kp1, c_budget);
    }
    throw LsqConvergenceError(pack(R, std::move(x), cert));
}

}  // namespace caa
