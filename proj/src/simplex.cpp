#include "nnlscs/simplex.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace nnlscs::lp {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-9;

struct Tableau {
  Eigen::MatrixXd rows;     // r x (cols + 1), last column is the rhs
  Eigen::RowVectorXd cost;  // reduced costs, last entry the negated objective
  std::vector<int> basis;   // basic column per row

  void pivot(int pr, int pc) {
    rows.row(pr) /= rows(pr, pc);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      if (i == pr) continue;
      const double f = rows(i, pc);
      if (f != 0.0) rows.row(i) -= f * rows.row(pr);
    }
    const double f = cost(pc);
    if (f != 0.0) cost -= f * rows.row(pr);
    basis[pr] = pc;
  }
};

// Bland's rule: smallest eligible column, smallest basic index on ties.
LpStatus run_simplex(Tableau& t, int allowed_cols, int& budget) {
  const Eigen::Index r = t.rows.rows();
  for (;;) {
    int enter = -1;
    for (int j = 0; j < allowed_cols; ++j) {
      if (t.cost(j) > kCostTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return LpStatus::optimal;
    if (--budget < 0) return LpStatus::iteration_limit;

    int leave = -1;
    double best_ratio = 0.0;
    for (Eigen::Index i = 0; i < r; ++i) {
      const double e = t.rows(i, enter);
      if (e <= kPivotTol) continue;
      const double ratio = t.rows(i, t.rows.cols() - 1) / e;
      if (leave < 0 || ratio < best_ratio - kPivotTol ||
          (ratio < best_ratio + kPivotTol && t.basis[i] < t.basis[leave])) {
        leave = static_cast<int>(i);
        best_ratio = ratio;
      }
    }
    if (leave < 0) return LpStatus::unbounded;
    t.pivot(leave, enter);
  }
}

}  // namespace

LpResult solve_standard_form(const Eigen::MatrixXd& e, const Eigen::VectorXd& b,
                             const Eigen::VectorXd& c, int max_pivots) {
  const int r = static_cast<int>(e.rows());
  const int n = static_cast<int>(e.cols());
  if (b.size() != r || c.size() != n)
    throw std::invalid_argument("lp: inconsistent dimensions");

  // Phase 1 tableau: [E | I | b] with flipped rows so b >= 0.
  Tableau t;
  t.rows.resize(r, n + r + 1);
  for (int i = 0; i < r; ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    t.rows.block(i, 0, 1, n) = sign * e.row(i);
    t.rows.block(i, n, 1, r).setZero();
    t.rows(i, n + i) = 1.0;
    t.rows(i, n + r) = sign * b[i];
  }
  t.basis.resize(r);
  for (int i = 0; i < r; ++i) t.basis[i] = n + i;
  // Phase 1 objective: maximize -(sum of artificials); reduced costs follow
  // from pricing out the initial basis.
  t.cost = Eigen::RowVectorXd::Zero(n + r + 1);
  for (int i = 0; i < r; ++i) t.cost += t.rows.row(i);
  for (int i = 0; i < r; ++i) t.cost(n + i) = 0.0;

  int budget = max_pivots;
  LpResult result;
  if (run_simplex(t, n, budget) == LpStatus::iteration_limit) {
    result.status = LpStatus::iteration_limit;
    return result;
  }
  double infeas = 0.0;
  for (int i = 0; i < r; ++i)
    if (t.basis[i] >= n) infeas += t.rows(i, n + r);
  if (infeas > kCostTol * (1.0 + b.cwiseAbs().maxCoeff())) {
    result.status = LpStatus::infeasible;
    return result;
  }
  // Drive zero-valued artificials out of the basis where possible; rows that
  // cannot pivot are redundant and harmless since artificials never re-enter.
  for (int i = 0; i < r; ++i) {
    if (t.basis[i] < n) continue;
    for (int j = 0; j < n; ++j) {
      if (std::abs(t.rows(i, j)) > kPivotTol) {
        t.pivot(i, j);
        break;
      }
    }
  }

  // Phase 2: real objective, artificial columns barred from entering.
  t.cost.setZero();
  t.cost.head(n) = c.transpose();
  for (int i = 0; i < r; ++i) {
    if (t.basis[i] < n && t.cost(t.basis[i]) != 0.0)
      t.cost -= t.cost(t.basis[i]) * t.rows.row(i);
  }
  const LpStatus phase2 = run_simplex(t, n, budget);
  if (phase2 != LpStatus::optimal) {
    result.status = phase2;
    return result;
  }

  result.status = LpStatus::optimal;
  result.x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < r; ++i)
    if (t.basis[i] < n) result.x[t.basis[i]] = t.rows(i, n + r);
  result.objective = c.dot(result.x);
  return result;
}

}  // namespace nnlscs::lp
