#include "nnlscs/bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "nnlscs/errors.hpp"
#include "nnlscs/geometry.hpp"

namespace nnlscs::bounds {

FoucartConstants foucart_constants(double rho, double tau) {
  if (!(rho >= 0.0 && rho < 1.0))
    throw InfeasibleError("foucart_constants: requires 0 <= rho < 1");
  if (!(tau > 0.0)) throw std::invalid_argument("foucart_constants: tau must be positive");
  FoucartConstants k;
  k.c = (1.0 + rho) * (1.0 + rho) / (1.0 - rho);
  k.d = (1.0 + rho) * tau / (1.0 - rho);
  return k;
}

BoundReport nnls_bound(const BoundInputs& in) {
  if (in.s < 1) throw std::invalid_argument("nnls_bound: s must be >= 1");
  if (!(in.p >= 1.0 && in.p <= in.q)) throw std::invalid_argument("nnls_bound: need 1 <= p <= q");
  if (in.sigma_s1 < 0.0 || in.noise_norm < 0.0)
    throw std::invalid_argument("nnls_bound: negative norm input");

  BoundReport rep;
  rep.rho = in.rho;
  rep.tau = in.tau;
  rep.kappa = in.kappa;
  rep.s = in.s;
  rep.p = in.p;
  rep.q = in.q;
  rep.t_norm = in.t_norm;
  rep.applicable = in.rho >= 0.0 && in.rho < 1.0 && in.kappa * in.rho < 1.0 && in.tau > 0.0;
  if (!rep.applicable)
    throw InfeasibleError("nnls_bound: hypothesis kappa*rho < 1 (with rho in (0,1), tau > 0) fails");

  const double kr = in.kappa * in.rho;
  rep.c = 2.0 * in.kappa * (1.0 + kr) * (1.0 + kr) / (1.0 - kr);
  rep.d = 2.0 * (3.0 + kr) / (1.0 - kr) * std::max(in.kappa, in.w_inv_norm);

  const double sd = static_cast<double>(in.s);
  const double t_term =
      in.scaled_t_variant ? in.t_norm / std::pow(sd, 1.0 - 1.0 / in.q) : in.t_norm;
  rep.sigma_term = rep.c / std::pow(sd, 1.0 - 1.0 / in.p) * in.sigma_s1;
  rep.noise_term =
      rep.d * std::pow(sd, 1.0 / in.p - 1.0 / in.q) * (t_term + in.tau) * in.noise_norm;
  rep.total = rep.sigma_term + rep.noise_term;
  return rep;
}

BoundValidation validate_bound(const ensembles::RecoveryInstance& instance,
                               const solvers::SolveResult& solve, const BoundReport& report,
                               double p) {
  if (!report.applicable) throw InfeasibleError("validate_bound: report not applicable");
  BoundValidation v;
  v.error = geometry::lp_norm(solve.x_hat - instance.x0, p);
  v.margin = report.total - v.error;
  v.holds = v.error <= report.total;
  return v;
}

}  // namespace nnlscs::bounds
