#pragma once

#include <Eigen/Dense>

namespace nnlscs::lp {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
  LpStatus status = LpStatus::iteration_limit;
  Eigen::VectorXd x;
  double objective = 0.0;
};

// Two-phase dense tableau simplex for
//   max c'x  s.t.  E x = b,  x >= 0
// with Bland's rule throughout (slow but cycle-free). Intended for the small
// feasibility programs in this library, not as a general-purpose LP solver.
LpResult solve_standard_form(const Eigen::MatrixXd& e, const Eigen::VectorXd& b,
                             const Eigen::VectorXd& c, int max_pivots = 50000);

}  // namespace nnlscs::lp
