#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace nnlscs::ensembles {

enum class MatrixKind { gaussian, rademacher };
enum class SignalKind { binary, half_normal };

std::string to_string(MatrixKind kind);
std::string to_string(SignalKind kind);
MatrixKind matrix_kind_from_string(const std::string& s);
SignalKind signal_kind_from_string(const std::string& s);

// Measurement-matrix distribution: entries are (centered draw + mu), with the
// centered part i.i.d. standard Gaussian or Rademacher. Identical spec
// (including seed) gives a bit-identical matrix.
struct EnsembleSpec {
  MatrixKind kind = MatrixKind::gaussian;
  double mu = 0.0;
  int m = 0;
  int n = 0;
  std::uint64_t seed = 0;
};

struct SignalSpec {
  SignalKind kind = SignalKind::binary;
  int n = 0;
  int s = 0;
  std::uint64_t seed = 0;
};

// One recovery trial: y = A x0 + noise by construction.
struct RecoveryInstance {
  Eigen::MatrixXd A;
  Eigen::VectorXd x0;
  Eigen::VectorXd noise;
  Eigen::VectorXd y;
};

// m x n matrix of independent (centered + mu) entries. The centered draws
// depend only on (kind, m, n, seed), so the same seed at two bias levels
// differs by exactly mu on every entry.
Eigen::MatrixXd generate_matrix(const EnsembleSpec& spec);

// Exactly s strictly positive entries on a uniformly random support.
Eigen::VectorXd generate_signal(const SignalSpec& spec);

// i.i.d. zero-mean Gaussian entries with the given variance.
Eigen::VectorXd generate_noise(int m, double variance, std::uint64_t seed);

// Row pairing transform: row i of the output is (a_{2i-1} - a_{2i})/sqrt(2)
// (1-based); a trailing odd row is dropped. For every v,
// ||A v||_2 >= ||debias_rows(A) v||_2.
Eigen::MatrixXd debias_rows(const Eigen::MatrixXd& a);

// floor(m/2) x n matrix distributed as the debiased rows b_i of the given
// ensemble. The bias cancels algebraically in b = (a1 - a2)/sqrt(2), so the
// result is computed from the centered draws alone and is bit-identical
// across mu for a fixed (kind, m, n, seed).
Eigen::MatrixXd generate_debiased_matrix(const EnsembleSpec& spec);

RecoveryInstance make_instance(const EnsembleSpec& matrix_spec, const SignalSpec& signal_spec,
                               double noise_variance, std::uint64_t noise_seed);

}  // namespace nnlscs::ensembles
