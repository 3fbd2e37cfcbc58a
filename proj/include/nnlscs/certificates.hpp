#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "nnlscs/ensembles.hpp"
#include "nnlscs/geometry.hpp"
#include "nnlscs/rng.hpp"

namespace nnlscs::certificates {

// ---- M+ criterion ----------------------------------------------------------

struct MPlusFeasibility {
  enum class Status { feasible, infeasible, indeterminate };
  Status status = Status::indeterminate;
  Eigen::VectorXd t;   // witness with ||t||_inf <= 1 when feasible
  double delta = 0.0;  // optimal min_i (A^T t)_i under that normalization
};

// Decides whether {t : A^T t > 0} is nonempty via the linear program
//   max delta  s.t.  A^T t >= delta 1,  ||t||_inf <= 1.
// delta above tolerance certifies membership; an iteration-limited solve is
// reported as indeterminate, distinct from a certified "no".
MPlusFeasibility mplus_feasible(const Eigen::MatrixXd& a);

struct MPlusCertificate {
  Eigen::VectorXd t;
  Eigen::VectorXd w;         // A^T t
  double kappa_upper = 0.0;  // max(w)/min(w); meaningful only when valid
  bool valid = false;        // min(w) > 0
  double t_norm = 0.0;       // ||t||_2 = 1/(sqrt(m) mu)
  double prob_bound = 0.0;   // 1 - 2n exp(-mu^2 m / 16), clamped to [0,1]
};

// Witness certificate for biased ensembles with t = 1/(m mu) * ones. The
// probability bound is the Hoeffding estimate for the event that every
// w_i stays within 1/2 of its mean 1 (which also forces kappa <= 3).
MPlusCertificate certify_mplus_biased(const Eigen::MatrixXd& a, double mu);

// ---- Monte Carlo small-ball quantities --------------------------------------

// Draws rows of an ensemble; with `debiased` set, draws b = (a1 - a2)/sqrt(2)
// from consecutive centered pairs. The bias cancels algebraically in b, so
// debiased draws never touch mu and are bit-identical across bias levels.
struct RowSource {
  ensembles::EnsembleSpec spec;
  bool debiased = false;

  int dimension() const { return spec.n; }
  // Rows drawn from substream `stream` of spec.seed.
  Eigen::MatrixXd draw_rows(int count, std::uint64_t stream) const;
};

// Empirical P(|<a, z>| >= theta) over `draws` fresh rows.
double empirical_tail_probability(const RowSource& source, const Eigen::VectorXd& z,
                                  double theta, int draws, std::uint64_t stream);

// One draw from T_{rho,s}^q: an s-sparse spike plus lambda * dense noise,
// normalized to unit lq and rejected unless strictly inside the cone;
// lambda is log-uniform in [1e-3, 10]. Empty when every attempt is rejected.
std::optional<Eigen::VectorXd> sample_cone_T(int n, int s, double rho, double q, Rng& rng,
                                             int max_attempts = 200);

struct DirectionPlan {
  int s = 1;
  double q = 2.0;
  double rho = 0.5;
  int sparse_directions = 64;
  int cone_directions = 64;
  std::uint64_t seed = 0;
};

// Minimum over sampled directions of the empirical tail probability
// P(|<a,u>| >= xi). A minimum over finitely many sampled directions is an
// optimistic (upper) estimate of the true infimum over E.
double estimate_Q(const RowSource& source, const DirectionPlan& plan, double xi, int trials);

struct SmallBallEstimate {
  double q_hat = 0.0;
  double w_hat = 0.0;
  double xi = 0.0;
  double t_param = 0.0;
  double lower_bound = 0.0;
  int trials = 0;
  double std_err_w = 0.0;
};

struct WidthOptions {
  int s = 1;
  double q = 2.0;
  // Scale by 3/rho to bound the width of the cone T instead of Sigma_s^q.
  bool cone_scaled = false;
  double rho = 0.5;
  std::uint64_t seed = 0;
};

struct WidthEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  int trials = 0;
};

// Monte Carlo W_m(Sigma_s^q, a): per replicate h = (1/sqrt(k)) sum eps_i a_i
// over the source's k rows, evaluated through the closed-form sparse supremum.
WidthEstimate estimate_W(const RowSource& source, const WidthOptions& opts, int trials);

// ---- Analytic bounds and thresholds -----------------------------------------

// sqrt(2 s log(n/s) + 2 s) + mu sqrt(2 s); n is real-valued to allow
// evaluating the formula off the integer grid.
double analytic_W_bound(int s, double n, double mu);

// xi sqrt(m) q_hat - xi t - 2 w_hat. Positive values certify
// inf ||A v||_2 >= bound over the sampled set, i.e. an NSP with tau = 1/bound.
double smallball_lower_bound(double q_hat, double w_hat, double xi, double t_param, int m);

// Debiased variant: xi sqrt((m-1)/2) q_hat - xi t - 2 w_hat with the
// estimates taken over b-rows.
double smallball_lower_bound_debiased(double q_hat, double w_hat, double xi, double t_param,
                                      int m);

enum class ThresholdKind { debiased, naive_biased };

// Closed-form sample-complexity thresholds:
//   debiased:     ceil( (2*384^2/rho^2) s^{2-2/q} (2 + sqrt(log(e n/s)))^2 + 1 )
//   naive_biased: ceil( (6*24*sqrt(2)/rho)^2 2 s (sqrt(log(e n/s)) + mu)^2 )
// The debiased threshold does not depend on the bias.
std::int64_t sample_complexity(ThresholdKind kind, int s, int n, double q, double rho,
                               double mu = 0.0);

// Smallest m whose assembled naive-biased lower bound is positive at the
// plug-ins xi^2 = 1/8, t = sqrt(m)/24, q_hat = (1 - 4 xi^2)^2 / 3 and the
// analytic width bound. This is the threshold the assembly actually implies;
// see sample_complexity for the reported closed form.
std::int64_t naive_assembly_threshold(int s, int n, double q, double rho, double mu);

// ---- Empirical NSP probe -----------------------------------------------------

struct NspProbeResult {
  double min_norm = 0.0;     // smallest ||A v||_2 over accepted samples
  double implied_tau = 0.0;  // 1/min_norm; +inf when min_norm = 0
  int accepted = 0;
  int requested = 0;
};

// Samples the cone and reports the worst ||A v||_2 found. The sampled minimum
// is an upper bound on the true infimum, so the probe can refute an NSP level
// but never prove one.
NspProbeResult empirical_nsp_probe(const Eigen::MatrixXd& a, const geometry::NspParams& params,
                                   int trials, std::uint64_t seed);

}  // namespace nnlscs::certificates
