#include "nnlscs/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nnlscs::geometry {

void NspParams::validate() const {
  if (s < 1) throw std::invalid_argument("nsp: s must be >= 1");
  if (q < 1.0) throw std::invalid_argument("nsp: q must be >= 1");
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("nsp: rho must lie in (0,1)");
  if (!(tau > 0.0)) throw std::invalid_argument("nsp: tau must be positive");
}

double lp_norm(const Eigen::VectorXd& x, double p) {
  if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
  if (p == 1.0) return x.lpNorm<1>();
  if (p == 2.0) return x.norm();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) acc += std::pow(std::abs(x[i]), p);
  return std::pow(acc, 1.0 / p);
}

std::vector<int> top_s_indices(const Eigen::VectorXd& x, int s) {
  const int n = static_cast<int>(x.size());
  const int k = std::clamp(s, 0, n);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) {
    return std::abs(x[i]) > std::abs(x[j]);
  });
  idx.resize(k);
  return idx;
}

double best_s_term_error(const Eigen::VectorXd& x, int s, double p) {
  if (p < 1.0) throw std::invalid_argument("best_s_term_error: p must be >= 1");
  if (s < 0) throw std::invalid_argument("best_s_term_error: s must be >= 0");
  Eigen::VectorXd tail = x;
  for (int i : top_s_indices(x, s)) tail[i] = 0.0;
  return lp_norm(tail, p);
}

NspCheck nsp_inequality_holds(const Eigen::VectorXd& v, const std::vector<int>& subset,
                              const NspParams& params, const Eigen::MatrixXd& a) {
  params.validate();
  if (static_cast<int>(subset.size()) > params.s)
    throw std::invalid_argument("nsp: |S| exceeds s");
  if (a.cols() != v.size()) throw std::invalid_argument("nsp: dimension mismatch");

  Eigen::VectorXd on_s = Eigen::VectorXd::Zero(v.size());
  Eigen::VectorXd off_s = v;
  for (int i : subset) {
    if (i < 0 || i >= v.size()) throw std::invalid_argument("nsp: index out of range");
    on_s[i] = v[i];
    off_s[i] = 0.0;
  }
  NspCheck check;
  check.lhs = lp_norm(on_s, params.q);
  const double prefactor = params.rho / std::pow(static_cast<double>(params.s), 1.0 - 1.0 / params.q);
  check.rhs = prefactor * off_s.lpNorm<1>() + params.tau * (a * v).norm();
  check.slack = check.rhs - check.lhs;
  check.holds = check.slack >= 0.0;
  return check;
}

bool in_cone_T(const Eigen::VectorXd& v, int s, double rho, double q) {
  if (s < 1) throw std::invalid_argument("cone: s must be >= 1");
  if (q < 1.0) throw std::invalid_argument("cone: q must be >= 1");
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("cone: rho must lie in (0,1)");
  const double norm_q = lp_norm(v, q);
  if (norm_q == 0.0 || !std::isfinite(norm_q)) return false;
  const Eigen::VectorXd u = v / norm_q;
  Eigen::VectorXd head = Eigen::VectorXd::Zero(u.size());
  Eigen::VectorXd tail = u;
  for (int i : top_s_indices(u, s)) {
    head[i] = u[i];
    tail[i] = 0.0;
  }
  const double lhs = lp_norm(head, q);
  const double rhs = rho / std::pow(static_cast<double>(s), 1.0 - 1.0 / q) * tail.lpNorm<1>();
  return lhs > rhs;
}

double sup_sparse_inner_product(const Eigen::VectorXd& h, int s, double q) {
  if (s < 1 || s > h.size())
    throw std::invalid_argument("sup_sparse_inner_product: need 1 <= s <= n");
  if (q < 1.0) throw std::invalid_argument("sup_sparse_inner_product: q must be >= 1");
  Eigen::VectorXd top = Eigen::VectorXd::Zero(s);
  int k = 0;
  for (int i : top_s_indices(h, s)) top[k++] = h[i];
  if (q == 1.0) return top.cwiseAbs().maxCoeff();  // dual exponent is infinity
  const double q_dual = q / (q - 1.0);
  return lp_norm(top, q_dual);
}

bool norm_embedding_check(const Eigen::VectorXd& v, int s, double p, double q) {
  if (p < 1.0 || p > q) throw std::invalid_argument("norm_embedding_check: need 1 <= p <= q");
  if (s < 1) throw std::invalid_argument("norm_embedding_check: s must be >= 1");
  Eigen::VectorXd head = Eigen::VectorXd::Zero(v.size());
  for (int i : top_s_indices(v, s)) head[i] = v[i];
  const double lhs = lp_norm(head, p);
  const double rhs = std::pow(static_cast<double>(s), 1.0 / p - 1.0 / q) * lp_norm(head, q);
  // Allow rounding at the Hoelder equality case.
  return lhs <= rhs * (1.0 + 1e-12);
}

}  // namespace nnlscs::geometry
