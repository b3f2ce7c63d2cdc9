#include "ceo/simplex.hpp"

#include <cmath>
#include <limits>

namespace ceo::lp {

namespace {
constexpr double kTol = 1e-11;

struct Tableau {
    // rows: constraints; last column: rhs. Bottom cost row kept separately.
    Eigen::MatrixXd a;        // m x n_total
    Eigen::VectorXd rhs;      // m
    Eigen::VectorXd cost;     // n_total (current phase objective)
    double cost_rhs = 0.0;
    std::vector<int> basis;   // basic variable per row

    void pivot(int row, int col) {
        const double p = a(row, col);
        a.row(row) /= p;
        rhs(row) /= p;
        for (int r = 0; r < a.rows(); ++r) {
            if (r == row) continue;
            const double f = a(r, col);
            if (f == 0.0) continue;
            a.row(r) -= f * a.row(row);
            rhs(r) -= f * rhs(row);
        }
        const double f = cost(col);
        if (f != 0.0) {
            cost -= f * a.row(row).transpose();
            cost_rhs -= f * rhs(row);
        }
        basis[row] = col;
    }

    // Bland's rule: entering = lowest-index improving column,
    // leaving = min ratio with lowest basic index tie-break.
    bool iterate(const std::vector<bool>& allowed) {
        while (true) {
            int enter = -1;
            for (int j = 0; j < a.cols(); ++j) {
                if (allowed[j] && cost(j) < -kTol) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return true;
            int leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int r = 0; r < a.rows(); ++r) {
                if (a(r, enter) > kTol) {
                    const double ratio = rhs(r) / a(r, enter);
                    if (ratio < best - kTol ||
                        (ratio < best + kTol &&
                         (leave < 0 || basis[r] < basis[leave]))) {
                        best = ratio;
                        leave = r;
                    }
                }
            }
            if (leave < 0) return false;  // unbounded
            pivot(leave, enter);
        }
    }
};
}  // namespace

Result solve_min(const Eigen::VectorXd& c, const std::vector<Constraint>& cons) {
    const int n = static_cast<int>(c.size());
    const int m = static_cast<int>(cons.size());

    // Normalize rows to b >= 0; count extra columns.
    std::vector<Eigen::VectorXd> rows(m);
    std::vector<Relation> rels(m);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
        rows[i] = cons[i].a;
        rels[i] = cons[i].rel;
        b(i) = cons[i].b;
        if (b(i) < 0.0) {
            rows[i] = -rows[i];
            b(i) = -b(i);
            if (rels[i] == Relation::Le) rels[i] = Relation::Ge;
            else if (rels[i] == Relation::Ge) rels[i] = Relation::Le;
        }
    }
    int n_slack = 0, n_art = 0;
    for (int i = 0; i < m; ++i) {
        if (rels[i] != Relation::Eq) ++n_slack;
        if (rels[i] != Relation::Le) ++n_art;
    }
    const int n_total = n + n_slack + n_art;

    Tableau t;
    t.a = Eigen::MatrixXd::Zero(m, n_total);
    t.rhs = b;
    t.basis.assign(m, -1);
    int sc = n, ac = n + n_slack;
    for (int i = 0; i < m; ++i) {
        t.a.row(i).head(n) = rows[i].transpose();
        if (rels[i] == Relation::Le) {
            t.a(i, sc) = 1.0;
            t.basis[i] = sc++;
        } else if (rels[i] == Relation::Ge) {
            t.a(i, sc++) = -1.0;
            t.a(i, ac) = 1.0;
            t.basis[i] = ac++;
        } else {
            t.a(i, ac) = 1.0;
            t.basis[i] = ac++;
        }
    }

    Result res;

    // Phase 1: minimize sum of artificials.
    if (n_art > 0) {
        t.cost = Eigen::VectorXd::Zero(n_total);
        t.cost.segment(n + n_slack, n_art).setOnes();
        t.cost_rhs = 0.0;
        for (int i = 0; i < m; ++i) {
            if (t.basis[i] >= n + n_slack) {
                t.cost -= t.a.row(i).transpose();
                t.cost_rhs -= t.rhs(i);
            }
        }
        std::vector<bool> allowed(n_total, true);
        if (!t.iterate(allowed)) return res;
        if (-t.cost_rhs > 1e-8) return res;  // infeasible
        // Drive any residual artificial out of the basis.
        for (int i = 0; i < m; ++i) {
            if (t.basis[i] < n + n_slack) continue;
            int col = -1;
            for (int j = 0; j < n + n_slack; ++j) {
                if (std::abs(t.a(i, j)) > 1e-9) {
                    col = j;
                    break;
                }
            }
            if (col >= 0) t.pivot(i, col);
        }
    }

    // Phase 2: original objective; artificial columns frozen.
    t.cost = Eigen::VectorXd::Zero(n_total);
    t.cost.head(n) = c;
    t.cost_rhs = 0.0;
    for (int i = 0; i < m; ++i) {
        const double f = t.cost(t.basis[i]);
        if (f != 0.0) {
            t.cost -= f * t.a.row(i).transpose();
            t.cost_rhs -= f * t.rhs(i);
        }
    }
    std::vector<bool> allowed(n_total, true);
    for (int j = n + n_slack; j < n_total; ++j) allowed[j] = false;
    if (!t.iterate(allowed)) return res;  // unbounded

    res.feasible = true;
    res.x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i)
        if (t.basis[i] < n) res.x(t.basis[i]) = t.rhs(i);
    res.objective = c.dot(res.x);
    return res;
}

}  // namespace ceo::lp
