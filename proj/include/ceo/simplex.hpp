#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ceo::lp {

enum class Relation { Le, Ge, Eq };

struct Constraint {
    Eigen::VectorXd a;
    Relation rel;
    double b;
};

struct Result {
    bool feasible = false;
    Eigen::VectorXd x;
    double objective = 0.0;
};

/// minimize c^T x subject to the constraints and x >= 0.
/// Dense two-phase simplex with Bland's rule; deterministic.
Result solve_min(const Eigen::VectorXd& c, const std::vector<Constraint>& cons);

}  // namespace ceo::lp
