#include "nnlscs/certificates.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "nnlscs/parallel.hpp"
#include "nnlscs/simplex.hpp"

namespace nnlscs::certificates {

namespace {

constexpr std::uint64_t kRowStreamTag = 0x726f7773ull;   // "rows"
constexpr std::uint64_t kDirStreamTag = 0x64697273ull;   // "dirs"
constexpr std::uint64_t kWidthStreamTag = 0x77647468ull; // "wdth"
constexpr std::uint64_t kProbeStreamTag = 0x70726f62ull; // "prob"

double centered_entry(ensembles::MatrixKind kind, Rng& rng) {
  return kind == ensembles::MatrixKind::gaussian ? rng.normal() : rng.rademacher();
}

}  // namespace

MPlusFeasibility mplus_feasible(const Eigen::MatrixXd& a) {
  if (!a.allFinite()) throw std::invalid_argument("mplus: non-finite matrix");
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  if (m == 0 || n == 0) throw std::invalid_argument("mplus: empty matrix");

  // Variables: p (= t + 1, in [0,2]), slack q for p <= 2, delta = dp - dm,
  // surplus srp for each column constraint. Column j of A gives
  //   sum_i A_ij p_i - delta - srp_j = sum_i A_ij.
  const int vars = 2 * m + 2 + n;
  const int rows = n + m;
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(rows, vars);
  Eigen::VectorXd b(rows);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(vars);
  const int dp = 2 * m;
  const int dm = 2 * m + 1;
  c[dp] = 1.0;
  c[dm] = -1.0;

  for (int j = 0; j < n; ++j) {
    // Row scaling keeps the pivot tolerances meaningful for large |A|.
    const double scale = std::max(1.0, a.col(j).cwiseAbs().maxCoeff());
    for (int i = 0; i < m; ++i) e(j, i) = a(i, j) / scale;
    e(j, dp) = -1.0 / scale;
    e(j, dm) = 1.0 / scale;
    e(j, 2 * m + 2 + j) = -1.0;
    b[j] = a.col(j).sum() / scale;
  }
  for (int i = 0; i < m; ++i) {
    e(n + i, i) = 1.0;
    e(n + i, m + i) = 1.0;
    b[n + i] = 2.0;
  }

  const lp::LpResult sol = lp::solve_standard_form(e, b, c);
  MPlusFeasibility out;
  if (sol.status == lp::LpStatus::iteration_limit ||
      sol.status == lp::LpStatus::unbounded) {
    out.status = MPlusFeasibility::Status::indeterminate;
    return out;
  }
  if (sol.status == lp::LpStatus::infeasible) {
    // The program is feasible by construction (t = 0 works); treat a phase-1
    // failure as numerical trouble rather than a certified answer.
    out.status = MPlusFeasibility::Status::indeterminate;
    return out;
  }
  out.delta = sol.objective;
  const double tol = 1e-9 * (1.0 + a.cwiseAbs().maxCoeff());
  if (sol.objective > tol) {
    out.status = MPlusFeasibility::Status::feasible;
    out.t = sol.x.head(m).array() - 1.0;
  } else {
    out.status = MPlusFeasibility::Status::infeasible;
  }
  return out;
}

MPlusCertificate certify_mplus_biased(const Eigen::MatrixXd& a, double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu))
    throw std::invalid_argument("certify_mplus_biased: mu must be positive");
  if (!a.allFinite() || a.rows() == 0 || a.cols() == 0)
    throw std::invalid_argument("certify_mplus_biased: invalid matrix");
  const double m = static_cast<double>(a.rows());
  const double n = static_cast<double>(a.cols());

  MPlusCertificate cert;
  cert.t = Eigen::VectorXd::Constant(a.rows(), 1.0 / (m * mu));
  cert.w = a.transpose() * cert.t;
  const double w_min = cert.w.minCoeff();
  cert.valid = w_min > 0.0;
  cert.kappa_upper =
      cert.valid ? cert.w.maxCoeff() / w_min : std::numeric_limits<double>::quiet_NaN();
  cert.t_norm = 1.0 / (std::sqrt(m) * mu);
  cert.prob_bound = std::clamp(1.0 - 2.0 * n * std::exp(-mu * mu * m / 16.0), 0.0, 1.0);
  return cert;
}

Eigen::MatrixXd RowSource::draw_rows(int count, std::uint64_t stream) const {
  if (count < 1) throw std::invalid_argument("row source: count must be positive");
  const int n = spec.n;
  if (n < 1) throw std::invalid_argument("row source: invalid dimension");
  Rng rng(derive_seed(spec.seed, stream, kRowStreamTag));
  Eigen::MatrixXd rows(count, n);
  if (!debiased) {
    for (int i = 0; i < count; ++i)
      for (int j = 0; j < n; ++j) rows(i, j) = centered_entry(spec.kind, rng) + spec.mu;
    return rows;
  }
  // b = (a1 - a2)/sqrt(2); the constant bias cancels before any arithmetic.
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Eigen::VectorXd first(n);
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < n; ++j) first[j] = centered_entry(spec.kind, rng);
    for (int j = 0; j < n; ++j) rows(i, j) = (first[j] - centered_entry(spec.kind, rng)) * inv_sqrt2;
  }
  return rows;
}

double empirical_tail_probability(const RowSource& source, const Eigen::VectorXd& z,
                                  double theta, int draws, std::uint64_t stream) {
  if (draws < 1) throw std::invalid_argument("tail probability: draws must be positive");
  if (z.size() != source.dimension())
    throw std::invalid_argument("tail probability: direction dimension mismatch");
  if (!(theta >= 0.0)) throw std::invalid_argument("tail probability: theta must be >= 0");

  constexpr int kBlock = 4096;
  long long hits = 0;
  int remaining = draws;
  std::uint64_t block_index = 0;
  while (remaining > 0) {
    const int count = std::min(kBlock, remaining);
    RowSource block_source = source;
    block_source.spec.seed = derive_seed(source.spec.seed, stream, block_index++);
    const Eigen::MatrixXd rows = block_source.draw_rows(count, 0);
    const Eigen::VectorXd dots = rows * z;
    for (int i = 0; i < count; ++i)
      if (std::abs(dots[i]) >= theta) ++hits;
    remaining -= count;
  }
  return static_cast<double>(hits) / static_cast<double>(draws);
}

std::optional<Eigen::VectorXd> sample_cone_T(int n, int s, double rho, double q, Rng& rng,
                                             int max_attempts) {
  if (n < 1 || s < 1 || s > n) throw std::invalid_argument("cone sample: need 1 <= s <= n");
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    // s-sparse spike on a random support
    for (int k = 0; k < s; ++k) {
      const int idx = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n)));
      v[idx] += rng.normal();
    }
    const double lambda = std::pow(10.0, rng.uniform(-3.0, 1.0));
    for (int j = 0; j < n; ++j) v[j] += lambda * rng.normal() / std::sqrt(static_cast<double>(n));
    const double norm_q = geometry::lp_norm(v, q);
    if (norm_q == 0.0) continue;
    v /= norm_q;
    if (geometry::in_cone_T(v, s, rho, q)) return v;
  }
  return std::nullopt;
}

double estimate_Q(const RowSource& source, const DirectionPlan& plan, double xi, int trials) {
  if (trials < 1) throw std::invalid_argument("estimate_Q: trials must be positive");
  if (!(xi > 0.0)) throw std::invalid_argument("estimate_Q: xi must be positive");
  const int n = source.dimension();
  if (plan.sparse_directions + plan.cone_directions < 1)
    throw std::invalid_argument("estimate_Q: empty sampling plan");

  std::vector<Eigen::VectorXd> directions;
  Rng rng(derive_seed(plan.seed, kDirStreamTag));
  for (int d = 0; d < plan.sparse_directions; ++d) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    // random s-subset via partial shuffle of a fresh index pool
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    for (int k = 0; k < plan.s; ++k) {
      const int j = k + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n - k)));
      std::swap(pool[k], pool[j]);
      u[pool[k]] = rng.normal();
    }
    const double norm_q = geometry::lp_norm(u, plan.q);
    if (norm_q == 0.0) {
      --d;
      continue;
    }
    directions.push_back(u / norm_q);
  }
  for (int d = 0; d < plan.cone_directions; ++d) {
    auto v = sample_cone_T(n, plan.s, plan.rho, plan.q, rng);
    if (v) directions.push_back(*v);
  }
  if (directions.empty()) throw std::invalid_argument("estimate_Q: no directions sampled");

  std::vector<double> probs(directions.size());
  parallel_for(directions.size(), [&](std::size_t d) {
    probs[d] = empirical_tail_probability(source, directions[d], xi, trials,
                                          derive_seed(plan.seed, d));
  });
  return *std::min_element(probs.begin(), probs.end());
}

WidthEstimate estimate_W(const RowSource& source, const WidthOptions& opts, int trials) {
  if (trials < 2) throw std::invalid_argument("estimate_W: need at least two replicates");
  const int rows_per_replicate = source.debiased ? source.spec.m / 2 : source.spec.m;
  if (rows_per_replicate < 1) throw std::invalid_argument("estimate_W: no rows to draw");

  std::vector<double> values(trials);
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t r) {
    RowSource replicate = source;
    replicate.spec.seed = derive_seed(source.spec.seed, kWidthStreamTag, r);
    const Eigen::MatrixXd rows = replicate.draw_rows(rows_per_replicate, 1);
    Rng sign_rng(derive_seed(source.spec.seed, kWidthStreamTag, r, 2));
    Eigen::VectorXd h = Eigen::VectorXd::Zero(source.spec.n);
    for (int k = 0; k < rows_per_replicate; ++k)
      h += sign_rng.rademacher() * rows.row(k).transpose();
    h /= std::sqrt(static_cast<double>(rows_per_replicate));
    double value = geometry::sup_sparse_inner_product(h, opts.s, opts.q);
    if (opts.cone_scaled) value *= 3.0 / opts.rho;
    values[r] = value;
  });

  WidthEstimate est;
  est.trials = trials;
  double sum = 0.0;
  for (double v : values) sum += v;
  est.mean = sum / trials;
  double ssd = 0.0;
  for (double v : values) ssd += (v - est.mean) * (v - est.mean);
  est.std_err = std::sqrt(ssd / (trials - 1)) / std::sqrt(static_cast<double>(trials));
  return est;
}

double analytic_W_bound(int s, double n, double mu) {
  if (s < 1 || n < s) throw std::invalid_argument("analytic_W_bound: need 1 <= s <= n");
  const double sd = static_cast<double>(s);
  return std::sqrt(2.0 * sd * std::log(n / sd) + 2.0 * sd) + mu * std::sqrt(2.0 * sd);
}

double smallball_lower_bound(double q_hat, double w_hat, double xi, double t_param, int m) {
  if (!(xi > 0.0)) throw std::invalid_argument("smallball: xi must be positive");
  if (t_param < 0.0) throw std::invalid_argument("smallball: t must be non-negative");
  if (m < 1) throw std::invalid_argument("smallball: m must be positive");
  return xi * std::sqrt(static_cast<double>(m)) * q_hat - xi * t_param - 2.0 * w_hat;
}

double smallball_lower_bound_debiased(double q_hat, double w_hat, double xi, double t_param,
                                      int m) {
  if (!(xi > 0.0)) throw std::invalid_argument("smallball: xi must be positive");
  if (t_param < 0.0) throw std::invalid_argument("smallball: t must be non-negative");
  if (m < 2) throw std::invalid_argument("smallball debiased: need m >= 2");
  return xi * std::sqrt((static_cast<double>(m) - 1.0) / 2.0) * q_hat - xi * t_param -
         2.0 * w_hat;
}

std::int64_t sample_complexity(ThresholdKind kind, int s, int n, double q, double rho,
                               double mu) {
  if (s < 1 || n < s) throw std::invalid_argument("sample_complexity: need 1 <= s <= n");
  if (q < 2.0) throw std::invalid_argument("sample_complexity: q must be >= 2");
  if (!(rho > 0.0 && rho <= 1.0))
    throw std::invalid_argument("sample_complexity: rho must lie in (0,1]");
  const double sd = static_cast<double>(s);
  const double log_term = std::log(std::exp(1.0) * static_cast<double>(n) / sd);
  double value = 0.0;
  if (kind == ThresholdKind::debiased) {
    const double factor = 2.0 * 384.0 * 384.0 / (rho * rho);
    const double shape = std::pow(sd, 2.0 - 2.0 / q);
    const double width = 2.0 + std::sqrt(log_term);
    value = factor * shape * width * width + 1.0;
  } else {
    if (mu < 0.0) throw std::invalid_argument("sample_complexity: mu must be >= 0");
    const double factor = 6.0 * 24.0 * std::sqrt(2.0) / rho;
    const double width = std::sqrt(log_term) + mu;
    value = factor * factor * 2.0 * sd * width * width;
  }
  return static_cast<std::int64_t>(std::ceil(value));
}

std::int64_t naive_assembly_threshold(int s, int n, double q, double rho, double mu) {
  if (q < 2.0) throw std::invalid_argument("assembly threshold: q must be >= 2");
  // bound(m) = xi sqrt(m) q_hat - xi sqrt(m)/24 - 2 (3/rho) W(s,n,mu) with
  // xi = 1/(2 sqrt(2)), q_hat = (1 - 4 xi^2)^2 / 3 = 1/12; positive iff
  // sqrt(m) (xi/12 - xi/24) exceeds the width term.
  const double xi = 1.0 / (2.0 * std::sqrt(2.0));
  const double slope = xi / 12.0 - xi / 24.0;
  const double width_term = 2.0 * (3.0 / rho) * analytic_W_bound(s, static_cast<double>(n), mu);
  const double sqrt_m = width_term / slope;
  return static_cast<std::int64_t>(std::floor(sqrt_m * sqrt_m)) + 1;
}

NspProbeResult empirical_nsp_probe(const Eigen::MatrixXd& a, const geometry::NspParams& params,
                                   int trials, std::uint64_t seed) {
  params.validate();
  if (trials < 1) throw std::invalid_argument("nsp probe: trials must be positive");
  if (a.cols() < params.s) throw std::invalid_argument("nsp probe: s exceeds n");

  const int n = static_cast<int>(a.cols());
  std::vector<double> norms(trials, std::numeric_limits<double>::quiet_NaN());
  std::atomic<int> accepted{0};
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t i) {
    Rng rng(derive_seed(seed, kProbeStreamTag, i));
    auto v = sample_cone_T(n, params.s, params.rho, params.q, rng);
    if (!v) return;
    norms[i] = (a * *v).norm();
    accepted.fetch_add(1);
  });

  NspProbeResult out;
  out.requested = trials;
  out.accepted = accepted.load();
  if (out.accepted == 0) {
    out.min_norm = std::numeric_limits<double>::quiet_NaN();
    out.implied_tau = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double min_norm = std::numeric_limits<double>::infinity();
  for (double v : norms)
    if (!std::isnan(v)) min_norm = std::min(min_norm, v);
  out.min_norm = min_norm;
  out.implied_tau =
      min_norm > 0.0 ? 1.0 / min_norm : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace nnlscs::certificates
