#include "nnlscs/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace nnlscs {

namespace {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void parse_header(const std::string& line, Eigen::Index& rows, Eigen::Index& cols,
                  CsvMeta* meta) {
  std::istringstream ss(line.substr(1));
  std::string tok;
  bool saw_rows = false, saw_cols = false;
  while (ss >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "rows") {
      rows = std::stoll(val);
      saw_rows = true;
    } else if (key == "cols") {
      cols = std::stoll(val);
      saw_cols = true;
    } else if (meta && key == "kind") {
      meta->kind = val;
    } else if (meta && key == "mu") {
      meta->mu = std::stod(val);
    } else if (meta && key == "seed") {
      meta->seed = std::stoull(val);
    }
  }
  if (!saw_rows || !saw_cols)
    throw std::runtime_error("csv: header missing rows=/cols=");
}

}  // namespace

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& a,
                      const CsvMeta& meta) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot open for writing: " + path);
  out << "# rows=" << a.rows() << " cols=" << a.cols();
  if (meta.kind) out << " kind=" << *meta.kind;
  if (meta.mu) out << " mu=" << format_double(*meta.mu);
  if (meta.seed) out << " seed=" << *meta.seed;
  out << "\n";
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j) out << ",";
      out << format_double(a(i, j));
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("csv: write failed: " + path);
}

Eigen::MatrixXd read_matrix_csv(const std::string& path, CsvMeta* meta) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open: " + path);
  std::string line;
  Eigen::Index rows = -1, cols = -1;
  std::vector<double> values;
  Eigen::Index data_rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (rows < 0) parse_header(line, rows, cols, meta);
      continue;
    }
    std::istringstream ss(line);
    std::string cell;
    Eigen::Index row_cols = 0;
    while (std::getline(ss, cell, ',')) {
      values.push_back(std::stod(cell));
      ++row_cols;
    }
    if (cols >= 0 && row_cols != cols)
      throw std::runtime_error("csv: row width mismatch in " + path);
    if (cols < 0) cols = row_cols;
    ++data_rows;
  }
  if (rows >= 0 && data_rows != rows)
    throw std::runtime_error("csv: row count mismatch in " + path);
  Eigen::MatrixXd a(data_rows, cols < 0 ? 0 : cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = values[i * a.cols() + j];
  return a;
}

void write_vector_csv(const std::string& path, const Eigen::VectorXd& v,
                      const CsvMeta& meta) {
  write_matrix_csv(path, v, meta);
}

Eigen::VectorXd read_vector_csv(const std::string& path, CsvMeta* meta) {
  Eigen::MatrixXd a = read_matrix_csv(path, meta);
  if (a.cols() == 1) return a.col(0);
  if (a.rows() == 1) return a.row(0).transpose();
  throw std::runtime_error("csv: not a vector: " + path);
}

}  // namespace nnlscs
