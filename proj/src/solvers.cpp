#include "nnlscs/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "nnlscs/errors.hpp"

namespace nnlscs::solvers {

namespace {

constexpr double kRankThreshold = 1e-10;

void check_finite(const Eigen::MatrixXd& a, const Eigen::VectorXd& y) {
  if (!a.allFinite() || !y.allFinite())
    throw std::invalid_argument("solver: non-finite input");
  if (a.rows() != y.size()) throw std::invalid_argument("solver: dimension mismatch");
  if (a.rows() == 0 || a.cols() == 0) throw std::invalid_argument("solver: empty matrix");
}

// Minimum-norm least squares on the selected columns.
Eigen::VectorXd restricted_lsq(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                               const std::vector<int>& support) {
  Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t k = 0; k < support.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(support[k]);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sub);
  cod.setThreshold(kRankThreshold);
  return cod.solve(y);
}

}  // namespace

SolveResult solve_nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                       const SolverOptions& opts) {
  check_finite(a, y);
  const int n = static_cast<int>(a.cols());
  const int max_outer = opts.max_iterations > 0 ? opts.max_iterations : 10 * n;
  const double scale = std::max(1.0, (a.transpose() * y).cwiseAbs().maxCoeff());
  const double dual_tol = opts.tolerance * scale;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  std::vector<bool> blocked(n, false);
  std::vector<int> support;
  double ssq = y.squaredNorm();
  int outer = 0;

  while (outer < max_outer) {
    const Eigen::VectorXd g = a.transpose() * (y - a * x);
    int enter = -1;
    double best = dual_tol;
    for (int i = 0; i < n; ++i) {
      if (passive[i] || blocked[i]) continue;
      if (g[i] > best) {
        best = g[i];
        enter = i;
      }
    }
    if (enter < 0) break;
    ++outer;

    passive[enter] = true;
    support.push_back(enter);
    const Eigen::VectorXd x_before = x;

    // Inner loop: restricted least squares, stepping back to the boundary
    // while any passive coordinate would go negative. Each pass removes at
    // least one variable, so n+1 passes suffice; the cap guards against
    // floating-point stalls.
    bool stalled = false;
    for (int pass = 0; pass <= n + 1; ++pass) {
      Eigen::VectorXd z = restricted_lsq(a, y, support);
      double z_min = std::numeric_limits<double>::infinity();
      for (Eigen::Index k = 0; k < z.size(); ++k) z_min = std::min(z_min, z[k]);
      if (z_min > 0.0) {
        x.setZero();
        for (std::size_t k = 0; k < support.size(); ++k) x[support[k]] = z[k];
        break;
      }
      // Step length to the first coordinate hitting zero.
      double alpha = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < support.size(); ++k) {
        if (z[k] <= 0.0) {
          const double xi = x[support[k]];
          const double denom = xi - z[k];
          alpha = std::min(alpha, denom > 0.0 ? xi / denom : 0.0);
        }
      }
      if (!std::isfinite(alpha)) {
        stalled = true;
        break;
      }
      for (std::size_t k = 0; k < support.size(); ++k) {
        const int i = support[k];
        x[i] += alpha * (z[k] - x[i]);
      }
      // Drop everything pinned at (or numerically below) zero.
      std::vector<int> kept;
      for (std::size_t k = 0; k < support.size(); ++k) {
        const int i = support[k];
        if (z[k] <= 0.0 && x[i] <= 1e-14 * scale) {
          x[i] = 0.0;
          passive[i] = false;
        } else {
          kept.push_back(i);
        }
      }
      if (kept.empty()) {
        stalled = true;
        break;
      }
      support = std::move(kept);
      if (pass == n + 1) stalled = true;
    }

    const double ssq_new = (y - a * x).squaredNorm();
    if (stalled || ssq_new > ssq - 1e-14 * (1.0 + ssq)) {
      // No strict improvement: roll back and bar this column until some other
      // pivot makes progress. Prevents cycling on degenerate instances.
      x = x_before;
      for (int i = 0; i < n; ++i) passive[i] = false;
      support.clear();
      for (Eigen::Index i = 0; i < x.size(); ++i)
        if (x[i] > 0.0) {
          passive[i] = true;
          support.push_back(static_cast<int>(i));
        }
      blocked[enter] = true;
      continue;
    }
    ssq = ssq_new;
    std::fill(blocked.begin(), blocked.end(), false);
  }

  SolveResult result;
  result.x_hat = x;
  result.iterations = outer;
  result.residual_norm = (y - a * x).norm();
  const Eigen::VectorXd g = a.transpose() * (y - a * x);
  double viol = 0.0;
  for (int i = 0; i < n; ++i) {
    viol = std::max(viol, g[i]);              // dual feasibility (all coordinates)
    viol = std::max(viol, std::abs(g[i] * x[i]));  // complementarity
  }
  result.kkt_violation = std::max(0.0, viol);
  result.converged = result.kkt_violation <= 10.0 * dual_tol;
  return result;
}

SolveResult oracle_nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& y) {
  check_finite(a, y);
  const int n = static_cast<int>(a.cols());
  if (n > 20) throw std::invalid_argument("oracle_nnls: refusing n > 20 (cost 2^n)");

  const double tie_eps = 1e-12 * (1.0 + y.norm());
  Eigen::VectorXd best_x = Eigen::VectorXd::Zero(n);
  double best_res = y.norm();
  double best_norm = 0.0;
  std::vector<int> best_support;  // sorted; empty support = zero vector

  std::vector<int> support;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    support.clear();
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) support.push_back(i);

    Eigen::VectorXd z = restricted_lsq(a, y, support);
    const double tiny = 1e-11 * (1.0 + z.cwiseAbs().maxCoeff());
    bool feasible = true;
    for (Eigen::Index k = 0; k < z.size(); ++k) {
      if (z[k] < -tiny) {
        feasible = false;
        break;
      }
    }
    if (!feasible) continue;

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < support.size(); ++k)
      x[support[k]] = std::max(z[static_cast<Eigen::Index>(k)], 0.0);
    const double res = (y - a * x).norm();
    const double norm2 = x.norm();

    bool better = false;
    if (res < best_res - tie_eps) {
      better = true;
    } else if (res <= best_res + tie_eps) {
      if (norm2 < best_norm - tie_eps)
        better = true;
      else if (std::abs(norm2 - best_norm) <= tie_eps &&
               std::lexicographical_compare(support.begin(), support.end(),
                                            best_support.begin(), best_support.end()))
        better = true;
    }
    if (better) {
      best_x = x;
      best_res = res;
      best_norm = norm2;
      best_support = support;
    }
  }

  SolveResult result;
  result.x_hat = best_x;
  result.residual_norm = (y - a * best_x).norm();
  result.iterations = 1 << n;
  result.converged = true;
  result.kkt_violation = 0.0;
  return result;
}

namespace {

// Smallest t in [0,1] with ||r0 - t d||_2 = eta, given ||r0|| > eta and
// ||r0 - d|| <= eta. Solves the quadratic in its numerically stable form.
double feasibility_step(const Eigen::VectorXd& r0, const Eigen::VectorXd& d, double eta) {
  const double a = d.squaredNorm();
  const double b = r0.dot(d);
  const double c = r0.squaredNorm() - eta * eta;
  if (a <= 0.0) return 1.0;
  const double disc = std::max(0.0, b * b - a * c);
  const double denom = b + std::sqrt(disc);
  if (denom <= 0.0) return 1.0;
  return std::clamp(c / denom, 0.0, 1.0);
}

}  // namespace

SolveResult solve_bpdn(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, double eta,
                       const SolverOptions& opts) {
  check_finite(a, y);
  if (!std::isfinite(eta) || eta < 0.0)
    throw std::invalid_argument("bpdn: eta must be finite and non-negative");
  const int n = static_cast<int>(a.cols());
  const int max_iter = opts.max_iterations > 0 ? opts.max_iterations : 100000;
  const double tol = opts.tolerance;
  // Feasibility slack for the eta = 0 and tiny-eta regimes, where the
  // constraint can only hold up to rounding.
  const double feas_floor = 1e-12 * (1.0 + y.norm());

  SolveResult result;

  // Trivial case: the origin is feasible and has minimal l1 norm.
  if (eta >= y.norm()) {
    result.x_hat = Eigen::VectorXd::Zero(n);
    result.residual_norm = y.norm();
    result.converged = true;
    return result;
  }

  // Residual floor; also the anchor of the final feasibility step.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  cod.setThreshold(kRankThreshold);
  const Eigen::VectorXd x_ls = cod.solve(y);
  const double r_floor = (y - a * x_ls).norm();
  if (r_floor > eta + tol * (1.0 + y.norm()) + feas_floor)
    throw InfeasibleError("bpdn: eta below the residual floor of the instance");

  const Eigen::MatrixXd at = a.transpose();
  Eigen::LLT<Eigen::MatrixXd> llt(Eigen::MatrixXd::Identity(n, n) + at * a);

  double rho = opts.penalty > 0.0 ? opts.penalty : 1.0;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(a.rows());
  Eigen::VectorXd uw = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd uz = Eigen::VectorXd::Zero(a.rows());
  Eigen::VectorXd w_prev = w, z_prev = z;

  constexpr int check_every = 25;
  int iter = 0;
  bool accepted = false;

  // Even at eta = 0 the constraint can only hold up to the residual floor.
  const double feas_target = std::max(eta * (1.0 + tol), r_floor + feas_floor);

  auto finalize = [&](const Eigen::VectorXd& candidate, const Eigen::VectorXd& dual) {
    // Exact feasibility step toward the least-squares anchor, then certify
    // optimality of the corrected point by its duality gap.
    Eigen::VectorXd xf = candidate;
    double res = (y - a * xf).norm();
    if (res > eta) {
      const Eigen::VectorXd r0 = y - a * candidate;
      const Eigen::VectorXd d = a * (x_ls - candidate);
      const double t = feasibility_step(r0, d, eta);
      xf = candidate + t * (x_ls - candidate);
      res = (y - a * xf).norm();
    }
    Eigen::VectorXd dual_scaled = dual;
    const double dual_inf = (at * dual).lpNorm<Eigen::Infinity>();
    if (dual_inf > 1.0) dual_scaled /= dual_inf;
    const double gap =
        xf.lpNorm<1>() + y.dot(dual_scaled) + eta * dual_scaled.norm();
    const double feas_viol = std::max(0.0, res - feas_target) / feas_target;
    result.x_hat = xf;
    result.residual_norm = res;
    result.kkt_violation = std::max({gap / (1.0 + xf.lpNorm<1>()), feas_viol, 0.0});
    return result.kkt_violation <= tol;
  };

  while (iter < max_iter) {
    ++iter;
    const Eigen::VectorXd rhs = (w - uw) + at * (z - uz);
    x = llt.solve(rhs);
    const Eigen::VectorXd ax = a * x;
    // l1 block: soft threshold at 1/rho.
    const Eigen::VectorXd v = x + uw;
    const double thr = 1.0 / rho;
    w = v.array().sign() * (v.array().abs() - thr).max(0.0);
    // Measurement block: project onto the eta-ball around y.
    const Eigen::VectorXd d = ax + uz - y;
    const double nd = d.norm();
    z = (nd <= eta) ? (y + d).eval() : (y + d * (eta / nd)).eval();
    uw += x - w;
    uz += ax - z;

    if (iter % check_every != 0) continue;

    const Eigen::VectorXd nu = rho * uz;
    if (finalize(w, nu)) {
      accepted = true;
      break;
    }

    if (opts.adaptive_penalty) {
      const double r_primal = std::sqrt((x - w).squaredNorm() + (ax - z).squaredNorm());
      const double r_dual =
          rho * std::sqrt((w - w_prev).squaredNorm() + (z - z_prev).squaredNorm());
      if (r_primal > 10.0 * r_dual) {
        rho *= 2.0;
        uw /= 2.0;
        uz /= 2.0;
      } else if (r_dual > 10.0 * r_primal) {
        rho /= 2.0;
        uw *= 2.0;
        uz *= 2.0;
      }
    }
    w_prev = w;
    z_prev = z;
  }

  if (!accepted) finalize(w, rho * uz);
  result.iterations = iter;
  result.converged = accepted;
  return result;
}

double nmse(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x0) {
  const double denom = x0.norm();
  if (denom == 0.0) throw std::invalid_argument("nmse: x0 must be nonzero");
  if (x_hat.size() != x0.size()) throw std::invalid_argument("nmse: dimension mismatch");
  return (x_hat - x0).norm() / denom;
}

}  // namespace nnlscs::solvers
