#pragma once

#include <Eigen/Dense>
#include <vector>

namespace nnlscs::geometry {

// Parameters of the robust nullspace property of order s:
//   ||v_S||_q <= rho / s^{1-1/q} * ||v_{S^c}||_1 + tau * ||A v||_2
struct NspParams {
  int s = 1;
  double q = 2.0;
  double rho = 0.5;
  double tau = 1.0;

  void validate() const;
};

// lp norm, p >= 1 (finite).
double lp_norm(const Eigen::VectorXd& x, double p);

// Indices of the s largest-magnitude entries; equal magnitudes keep the
// lowest index. All quantities computed from the selection are tie-invariant.
std::vector<int> top_s_indices(const Eigen::VectorXd& x, int s);

// Error of the best s-term approximation in lp: the lp norm of x with its s
// largest-magnitude entries removed. s > n is treated as n.
double best_s_term_error(const Eigen::VectorXd& x, int s, double p);

struct NspCheck {
  bool holds = false;
  double slack = 0.0;  // rhs - lhs
  double lhs = 0.0;
  double rhs = 0.0;
};

// Evaluates the NSP inequality for one subset S (|S| <= s).
NspCheck nsp_inequality_holds(const Eigen::VectorXd& v, const std::vector<int>& subset,
                              const NspParams& params, const Eigen::MatrixXd& a);

// Membership in T_{rho,s}^q: after rescaling v to unit lq norm, the top-s
// block strictly dominates, ||v_s||_q > rho / s^{1-1/q} * ||v_c||_1.
// Boundary points (equality) are outside; v = 0 is outside by convention.
bool in_cone_T(const Eigen::VectorXd& v, int s, double rho, double q);

// sup over s-sparse unit-lq vectors u of <h, u>: the dual-norm (q*) value of
// the s largest magnitudes of h, with q* = q/(q-1) and q = 1 mapping to max.
double sup_sparse_inner_product(const Eigen::VectorXd& h, int s, double q);

// Checks the norm embedding ||v_S||_p <= s^{1/p-1/q} ||v_S||_q on the top-s
// block, the step that turns lq-NSP into lp-NSP for p <= q.
bool norm_embedding_check(const Eigen::VectorXd& v, int s, double p, double q);

}  // namespace nnlscs::geometry
