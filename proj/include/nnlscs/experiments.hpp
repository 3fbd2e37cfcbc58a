#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nnlscs/ensembles.hpp"

namespace nnlscs::experiments {

struct ExperimentConfig {
  int n = 100;
  int s = 5;
  std::vector<int> m_list;
  std::vector<double> mu_list;
  ensembles::SignalKind signal_kind = ensembles::SignalKind::binary;
  double noise_variance = 0.01;
  int trials = 200;
  std::vector<std::string> algorithms = {"nnls", "bpdn"};
  std::uint64_t master_seed = 1;
  std::string output_path;
  // Duality-gap / KKT target passed to the solvers; NMSE statistics need far
  // less than the library default.
  double solver_tolerance = 1e-6;

  void validate() const;
};

// key = value lines; lists are comma-separated; '#' starts a comment.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

struct TrialRecord {
  std::string algorithm;
  double mu = 0.0;
  int m = 0;
  int n = 0;
  int s = 0;
  std::string signal_kind;
  int trial_index = 0;
  double nmse = 0.0;
  double residual = 0.0;
  double noise_norm = 0.0;
  std::uint64_t seed = 0;
  double wall_time_ms = 0.0;
};

struct AggregateRow {
  std::string algorithm;
  double mu = 0.0;
  int m = 0;
  int n = 0;
  int s = 0;
  int trials = 0;
  double mean_nmse = 0.0;
  double se_nmse = 0.0;  // absent (not written) when trials == 1
  double median_nmse = 0.0;
};

struct TrialFailure {
  std::string algorithm;
  double mu = 0.0;
  int m = 0;
  int trial_index = 0;
  std::string message;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;
  std::vector<AggregateRow> aggregates;
  std::vector<TrialFailure> failures;  // solver hard-failures, non-fatal
};

// One (algorithm, mu, m, trial) grid sweep. Per trial: draw A, x0, noise with
// child seeds derived from (master_seed, m, trial); form y = A x0 + noise;
// BPDN uses the instantaneous eta = ||noise||_2. The same instance is served
// to every algorithm and, up to the +mu shift of A, to every mu, so curves
// are paired. Trials run in parallel; output is schedule-invariant.
ExperimentResult run_nmse_experiment(const ExperimentConfig& config);

std::vector<AggregateRow> aggregate_records(const std::vector<TrialRecord>& records);

// Column order: algorithm,mu,m,n,s,signal_kind,trial_index,nmse,residual,
// noise_norm,seed,wall_time_ms
void write_records_csv(const std::string& path, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_records_csv(const std::string& path);

// Aggregate table: one row per (algorithm, mu, m), stable column order.
std::string aggregates_to_csv(const std::vector<AggregateRow>& rows);
void write_aggregates_csv(const std::string& path, const std::vector<AggregateRow>& rows);

struct WidthSweepPoint {
  double mu = 0.0;
  double w_hat = 0.0;
  double std_err = 0.0;
};

// Fig.-1 style sweep: Monte Carlo width estimate per mu grid point.
std::vector<WidthSweepPoint> run_width_sweep(int n, int s, int m, double mu_lo, double mu_hi,
                                             int steps, int trials, std::uint64_t seed,
                                             bool debiased = false);

std::string width_sweep_to_csv(const std::vector<WidthSweepPoint>& points);

// Static SVG line chart of mean NMSE vs m, one series per (algorithm, mu),
// with standard-error bars. CSV stays the authoritative output.
void render_nmse_svg(const std::string& path, const std::vector<AggregateRow>& rows);

}  // namespace nnlscs::experiments
