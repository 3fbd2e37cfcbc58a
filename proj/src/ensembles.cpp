#include "nnlscs/ensembles.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "nnlscs/rng.hpp"

namespace nnlscs::ensembles {

std::string to_string(MatrixKind kind) {
  return kind == MatrixKind::gaussian ? "gaussian" : "rademacher";
}

std::string to_string(SignalKind kind) {
  return kind == SignalKind::binary ? "binary" : "half_normal";
}

MatrixKind matrix_kind_from_string(const std::string& s) {
  if (s == "gaussian") return MatrixKind::gaussian;
  if (s == "rademacher") return MatrixKind::rademacher;
  throw std::invalid_argument("unknown matrix kind: " + s);
}

SignalKind signal_kind_from_string(const std::string& s) {
  if (s == "binary") return SignalKind::binary;
  if (s == "half_normal") return SignalKind::half_normal;
  throw std::invalid_argument("unknown signal kind: " + s);
}

namespace {

void validate(const EnsembleSpec& spec) {
  if (spec.m < 1 || spec.n < 1)
    throw std::invalid_argument("ensemble: m and n must be positive");
  if (!std::isfinite(spec.mu) || spec.mu < 0.0)
    throw std::invalid_argument("ensemble: mu must be finite and non-negative");
}

double centered_draw(MatrixKind kind, Rng& rng) {
  return kind == MatrixKind::gaussian ? rng.normal() : rng.rademacher();
}

}  // namespace

Eigen::MatrixXd generate_matrix(const EnsembleSpec& spec) {
  validate(spec);
  Rng rng(derive_seed(spec.seed, 0x6d61747278ull));  // "matrx" substream
  Eigen::MatrixXd a(spec.m, spec.n);
  for (int i = 0; i < spec.m; ++i)
    for (int j = 0; j < spec.n; ++j) a(i, j) = centered_draw(spec.kind, rng) + spec.mu;
  return a;
}

Eigen::VectorXd generate_signal(const SignalSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("signal: n must be positive");
  if (spec.s < 1 || spec.s > spec.n)
    throw std::invalid_argument("signal: sparsity must satisfy 1 <= s <= n");
  Rng rng(derive_seed(spec.seed, 0x7369676e6cull));  // "signl" substream
  // Partial Fisher-Yates gives a uniform random s-subset.
  std::vector<int> idx(spec.n);
  for (int i = 0; i < spec.n; ++i) idx[i] = i;
  for (int i = 0; i < spec.s; ++i) {
    const int j = i + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(spec.n - i)));
    std::swap(idx[i], idx[j]);
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(spec.n);
  for (int i = 0; i < spec.s; ++i) {
    double v = 1.0;
    if (spec.kind == SignalKind::half_normal) {
      do {
        v = std::abs(rng.normal());
      } while (v == 0.0);
    }
    x[idx[i]] = v;
  }
  return x;
}

Eigen::VectorXd generate_noise(int m, double variance, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("noise: m must be positive");
  if (!std::isfinite(variance) || variance < 0.0)
    throw std::invalid_argument("noise: variance must be finite and non-negative");
  Rng rng(derive_seed(seed, 0x6e6f697365ull));  // "noise" substream
  Eigen::VectorXd n(m);
  const double sigma = std::sqrt(variance);
  for (int i = 0; i < m; ++i) n[i] = sigma * rng.normal();
  return n;
}

Eigen::MatrixXd debias_rows(const Eigen::MatrixXd& a) {
  const Eigen::Index m = a.rows();
  if (m < 2) throw std::invalid_argument("debias_rows: need at least two rows");
  const Eigen::Index pairs = m / 2;
  Eigen::MatrixXd b(pairs, a.cols());
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < pairs; ++i)
    b.row(i) = (a.row(2 * i) - a.row(2 * i + 1)) * inv_sqrt2;
  return b;
}

Eigen::MatrixXd generate_debiased_matrix(const EnsembleSpec& spec) {
  validate(spec);
  if (spec.m < 2) throw std::invalid_argument("debiased ensemble: need m >= 2");
  EnsembleSpec centered = spec;
  centered.mu = 0.0;  // b = (a1 - a2)/sqrt(2) cancels mu before any rounding
  return debias_rows(generate_matrix(centered));
}

RecoveryInstance make_instance(const EnsembleSpec& matrix_spec, const SignalSpec& signal_spec,
                               double noise_variance, std::uint64_t noise_seed) {
  if (matrix_spec.n != signal_spec.n)
    throw std::invalid_argument("instance: matrix and signal dimension mismatch");
  RecoveryInstance inst;
  inst.A = generate_matrix(matrix_spec);
  inst.x0 = generate_signal(signal_spec);
  inst.noise = generate_noise(matrix_spec.m, noise_variance, noise_seed);
  inst.y = inst.A * inst.x0 + inst.noise;
  return inst;
}

}  // namespace nnlscs::ensembles
