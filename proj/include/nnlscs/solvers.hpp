#pragma once

#include <Eigen/Dense>

namespace nnlscs::solvers {

struct SolverOptions {
  // 0 selects the per-algorithm default: 10n outer iterations for NNLS,
  // 100000 for BPDN.
  int max_iterations = 0;
  // KKT / duality-gap target.
  double tolerance = 1e-9;
  // Initial ADMM penalty for BPDN; rebalanced automatically unless disabled.
  double penalty = 1.0;
  bool adaptive_penalty = true;
};

struct SolveResult {
  Eigen::VectorXd x_hat;
  double residual_norm = 0.0;  // ||y - A x_hat||_2, recomputed at exit
  int iterations = 0;
  bool converged = false;
  double kkt_violation = 0.0;  // max stationarity/complementarity residual
};

// min ||y - A x||_2 over x >= 0, Lawson-Hanson active set. Rank-deficient
// least-squares subproblems use the minimum-norm solution of a rank-revealing
// factorization (relative threshold 1e-10).
SolveResult solve_nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                       const SolverOptions& opts = {});

// Exhaustive NNLS reference: enumerates all 2^n supports, keeps feasible
// restricted least-squares candidates, returns the smallest residual with
// ties broken by smaller l2 norm then lexicographically smallest support.
// Refuses n > 20.
SolveResult oracle_nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& y);

// min ||x||_1 subject to ||y - A x||_2 <= eta, solved by ADMM on the
// splitting x = w, A x = z with a cached factorization of (I + A^T A).
// Convergence is certified by the duality gap at the returned point, never by
// iteration count alone; the output satisfies the residual constraint up to
// eta*(1+tol) plus float rounding. Throws InfeasibleError when eta lies below
// the residual floor by more than the tolerance.
SolveResult solve_bpdn(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, double eta,
                       const SolverOptions& opts = {});

// ||x_hat - x0||_2 / ||x0||_2. Throws when x0 = 0.
double nmse(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x0);

}  // namespace nnlscs::solvers
