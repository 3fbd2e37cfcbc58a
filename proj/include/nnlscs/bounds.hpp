#pragma once

#include <Eigen/Dense>

#include "nnlscs/ensembles.hpp"
#include "nnlscs/solvers.hpp"

namespace nnlscs::bounds {

// Constants of the plain NSP recovery lemma:
//   C = (1+rho)^2 / (1-rho),  D = (1+rho) tau / (1-rho),  0 <= rho < 1.
struct FoucartConstants {
  double c = 0.0;
  double d = 0.0;
};
FoucartConstants foucart_constants(double rho, double tau);

struct BoundInputs {
  double rho = 0.0;
  double tau = 0.0;
  double kappa = 1.0;
  double w_inv_norm = 1.0;  // ||W^{-1}|| = 1/min(w) for the diagonal witness
  double t_norm = 0.0;      // ||t||_2 of the certificate witness
  int s = 1;
  double p = 2.0;
  double q = 2.0;
  double sigma_s1 = 0.0;    // sigma_s(x0)_1
  double noise_norm = 0.0;  // ||n||_2
  // Use t_norm / s^{1-1/q} instead of t_norm in the noise term (the sharper
  // variant a closer inspection of the proof allows); off by default.
  bool scaled_t_variant = false;
};

struct BoundReport {
  double rho = 0.0;
  double tau = 0.0;
  double kappa = 0.0;
  int s = 1;
  double p = 2.0;
  double q = 2.0;
  double c = 0.0;
  double d = 0.0;
  double t_norm = 0.0;
  double sigma_term = 0.0;
  double noise_term = 0.0;
  double total = 0.0;
  bool applicable = false;  // 0 < rho < 1, kappa rho < 1, tau > 0
};

// Error bound for NNLS under the NSP + M+ hypotheses:
//   ||x_hat - x0||_p <= C / s^{1-1/p} sigma_s(x0)_1
//                       + D s^{1/p-1/q} (||t||_2 + tau) ||n||_2
// with C = 2 kappa (1+kappa rho)^2 / (1-kappa rho) and
// D = 2 (3+kappa rho)/(1-kappa rho) max{kappa, ||W^{-1}||}. Throws
// InfeasibleError when kappa rho >= 1 (the hypothesis fails).
BoundReport nnls_bound(const BoundInputs& in);

struct BoundValidation {
  bool holds = false;
  double error = 0.0;   // ||x_hat - x0||_p
  double margin = 0.0;  // total - error
};

BoundValidation validate_bound(const ensembles::RecoveryInstance& instance,
                               const solvers::SolveResult& solve, const BoundReport& report,
                               double p);

}  // namespace nnlscs::bounds
