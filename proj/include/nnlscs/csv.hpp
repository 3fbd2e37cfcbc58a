#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

namespace nnlscs {

// Optional provenance carried in the CSV header line
//   # rows=M cols=N kind=... mu=... seed=...
// kind/mu/seed are written only when known.
struct CsvMeta {
  std::optional<std::string> kind;
  std::optional<double> mu;
  std::optional<std::uint64_t> seed;
};

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& a,
                      const CsvMeta& meta = {});
Eigen::MatrixXd read_matrix_csv(const std::string& path, CsvMeta* meta = nullptr);

// Vectors are single-column matrices on disk.
void write_vector_csv(const std::string& path, const Eigen::VectorXd& v,
                      const CsvMeta& meta = {});
Eigen::VectorXd read_vector_csv(const std::string& path, CsvMeta* meta = nullptr);

}  // namespace nnlscs
