#include "nnlscs/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "nnlscs/certificates.hpp"
#include "nnlscs/parallel.hpp"
#include "nnlscs/rng.hpp"
#include "nnlscs/solvers.hpp"

namespace nnlscs::experiments {

namespace {

constexpr std::uint64_t kMatrixTag = 0x4d41u;
constexpr std::uint64_t kSignalTag = 0x5349u;
constexpr std::uint64_t kNoiseTag = 0x4e4fu;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream ss(value);
  while (std::getline(ss, item, ',')) {
    std::istringstream trim(item);
    std::string word;
    trim >> word;
    if (!word.empty()) items.push_back(word);
  }
  return items;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n < 1 || s < 1 || s > n) throw std::invalid_argument("config: need 1 <= s <= n");
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (m_list.empty()) throw std::invalid_argument("config: m_list must be non-empty");
  for (int m : m_list)
    if (m < 1) throw std::invalid_argument("config: every m must be >= 1");
  if (mu_list.empty()) throw std::invalid_argument("config: mu_list must be non-empty");
  if (noise_variance < 0.0) throw std::invalid_argument("config: negative noise variance");
  if (algorithms.empty()) throw std::invalid_argument("config: no algorithms selected");
  for (const auto& alg : algorithms)
    if (alg != "nnls" && alg != "bpdn")
      throw std::invalid_argument("config: unknown algorithm " + alg);
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key, value = line.substr(eq + 1);
    {
      std::istringstream k(line.substr(0, eq));
      k >> key;
    }
    if (key.empty()) continue;
    if (key == "n") {
      cfg.n = std::stoi(value);
    } else if (key == "s") {
      cfg.s = std::stoi(value);
    } else if (key == "m_list") {
      cfg.m_list.clear();
      for (const auto& item : split_list(value)) cfg.m_list.push_back(std::stoi(item));
    } else if (key == "mu_list") {
      cfg.mu_list.clear();
      for (const auto& item : split_list(value)) cfg.mu_list.push_back(std::stod(item));
    } else if (key == "signal_kind") {
      std::istringstream v(value);
      std::string word;
      v >> word;
      cfg.signal_kind = ensembles::signal_kind_from_string(word);
    } else if (key == "noise_variance") {
      cfg.noise_variance = std::stod(value);
    } else if (key == "trials") {
      cfg.trials = std::stoi(value);
    } else if (key == "algorithms") {
      cfg.algorithms = split_list(value);
    } else if (key == "master_seed") {
      cfg.master_seed = std::stoull(value);
    } else if (key == "output_path") {
      std::istringstream v(value);
      v >> cfg.output_path;
    } else if (key == "solver_tolerance") {
      cfg.solver_tolerance = std::stod(value);
    } else {
      throw std::invalid_argument("config: unknown key " + key);
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

ExperimentResult run_nmse_experiment(const ExperimentConfig& config) {
  config.validate();

  struct Task {
    std::string algorithm;
    double mu;
    int m;
    int trial;
  };
  std::vector<Task> tasks;
  for (const auto& alg : config.algorithms)
    for (double mu : config.mu_list)
      for (int m : config.m_list)
        for (int t = 0; t < config.trials; ++t) tasks.push_back({alg, mu, m, t});

  std::vector<TrialRecord> records(tasks.size());
  std::vector<std::string> errors(tasks.size());

  parallel_for(tasks.size(), [&](std::size_t i) {
    const Task& task = tasks[i];
    TrialRecord rec;
    rec.algorithm = task.algorithm;
    rec.mu = task.mu;
    rec.m = task.m;
    rec.n = config.n;
    rec.s = config.s;
    rec.signal_kind = ensembles::to_string(config.signal_kind);
    rec.trial_index = task.trial;

    // Child seeds keyed on (m, trial) only: mu enters through the matrix
    // shift alone and both algorithms see the same instance.
    const std::uint64_t cell = derive_seed(config.master_seed, static_cast<std::uint64_t>(task.m),
                                           static_cast<std::uint64_t>(task.trial));
    rec.seed = cell;
    ensembles::EnsembleSpec mat{ensembles::MatrixKind::gaussian, task.mu, task.m, config.n,
                                derive_seed(cell, kMatrixTag)};
    ensembles::SignalSpec sig{config.signal_kind, config.n, config.s,
                              derive_seed(cell, kSignalTag)};
    try {
      const auto instance =
          ensembles::make_instance(mat, sig, config.noise_variance, derive_seed(cell, kNoiseTag));
      rec.noise_norm = instance.noise.norm();

      solvers::SolverOptions opts;
      opts.tolerance = config.solver_tolerance;
      const auto start = std::chrono::steady_clock::now();
      solvers::SolveResult sol;
      if (task.algorithm == "nnls") {
        sol = solvers::solve_nnls(instance.A, instance.y, opts);
      } else {
        sol = solvers::solve_bpdn(instance.A, instance.y, rec.noise_norm, opts);
      }
      const auto stop = std::chrono::steady_clock::now();
      rec.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
      rec.nmse = solvers::nmse(sol.x_hat, instance.x0);
      rec.residual = sol.residual_norm;
      records[i] = std::move(rec);
    } catch (const std::exception& ex) {
      errors[i] = ex.what();
      records[i] = std::move(rec);
    }
  });

  ExperimentResult result;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (errors[i].empty()) {
      result.records.push_back(std::move(records[i]));
    } else {
      result.failures.push_back(
          {tasks[i].algorithm, tasks[i].mu, tasks[i].m, tasks[i].trial, errors[i]});
    }
  }
  result.aggregates = aggregate_records(result.records);
  return result;
}

std::vector<AggregateRow> aggregate_records(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");
  // Key order fixes the output row order: algorithm, then mu, then m.
  std::map<std::tuple<std::string, double, int>, std::vector<const TrialRecord*>> cells;
  for (const auto& rec : records) cells[{rec.algorithm, rec.mu, rec.m}].push_back(&rec);

  std::vector<AggregateRow> rows;
  for (const auto& [key, recs] : cells) {
    AggregateRow row;
    row.algorithm = std::get<0>(key);
    row.mu = std::get<1>(key);
    row.m = std::get<2>(key);
    row.n = recs.front()->n;
    row.s = recs.front()->s;
    row.trials = static_cast<int>(recs.size());
    double sum = 0.0;
    std::vector<double> values;
    values.reserve(recs.size());
    for (const auto* r : recs) {
      sum += r->nmse;
      values.push_back(r->nmse);
    }
    row.mean_nmse = sum / row.trials;
    if (row.trials > 1) {
      double ssd = 0.0;
      for (double v : values) ssd += (v - row.mean_nmse) * (v - row.mean_nmse);
      row.se_nmse = std::sqrt(ssd / (row.trials - 1)) / std::sqrt(static_cast<double>(row.trials));
    }
    std::sort(values.begin(), values.end());
    const std::size_t half = values.size() / 2;
    row.median_nmse = values.size() % 2 ? values[half] : 0.5 * (values[half - 1] + values[half]);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_records_csv(const std::string& path, const std::vector<TrialRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("records: cannot open " + path);
  out << "algorithm,mu,m,n,s,signal_kind,trial_index,nmse,residual,noise_norm,seed,"
         "wall_time_ms\n";
  for (const auto& r : records) {
    out << r.algorithm << "," << format_double(r.mu) << "," << r.m << "," << r.n << "," << r.s
        << "," << r.signal_kind << "," << r.trial_index << "," << format_double(r.nmse) << ","
        << format_double(r.residual) << "," << format_double(r.noise_norm) << "," << r.seed << ","
        << format_double(r.wall_time_ms) << "\n";
  }
}

std::vector<TrialRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("records: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("records: empty file " + path);
  std::vector<TrialRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 12) throw std::runtime_error("records: malformed row in " + path);
    TrialRecord r;
    r.algorithm = cells[0];
    r.mu = std::stod(cells[1]);
    r.m = std::stoi(cells[2]);
    r.n = std::stoi(cells[3]);
    r.s = std::stoi(cells[4]);
    r.signal_kind = cells[5];
    r.trial_index = std::stoi(cells[6]);
    r.nmse = std::stod(cells[7]);
    r.residual = std::stod(cells[8]);
    r.noise_norm = std::stod(cells[9]);
    r.seed = std::stoull(cells[10]);
    r.wall_time_ms = std::stod(cells[11]);
    records.push_back(std::move(r));
  }
  return records;
}

std::string aggregates_to_csv(const std::vector<AggregateRow>& rows) {
  std::ostringstream out;
  out << "algorithm,mu,m,n,s,trials,mean_nmse,se_nmse,median_nmse\n";
  for (const auto& row : rows) {
    out << row.algorithm << "," << format_double(row.mu) << "," << row.m << "," << row.n << ","
        << row.s << "," << row.trials << "," << format_double(row.mean_nmse) << ",";
    if (row.trials > 1) out << format_double(row.se_nmse);
    out << "," << format_double(row.median_nmse) << "\n";
  }
  return out.str();
}

void write_aggregates_csv(const std::string& path, const std::vector<AggregateRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("aggregates: cannot open " + path);
  out << aggregates_to_csv(rows);
}

std::vector<WidthSweepPoint> run_width_sweep(int n, int s, int m, double mu_lo, double mu_hi,
                                             int steps, int trials, std::uint64_t seed,
                                             bool debiased) {
  if (steps < 1) throw std::invalid_argument("width sweep: steps must be >= 1");
  if (mu_hi < mu_lo) throw std::invalid_argument("width sweep: empty mu range");
  std::vector<WidthSweepPoint> points(steps);
  // Common random numbers across the grid: mu enters only through the shift,
  // which keeps the series smooth and makes debiased sweeps exactly flat.
  const std::uint64_t sweep_seed = derive_seed(seed, 0x7773776570ull);
  for (int k = 0; k < steps; ++k) {
    const double mu =
        steps == 1 ? mu_lo : mu_lo + (mu_hi - mu_lo) * static_cast<double>(k) / (steps - 1);
    certificates::RowSource source;
    source.spec = {ensembles::MatrixKind::gaussian, mu, m, n, sweep_seed};
    source.debiased = debiased;
    certificates::WidthOptions opts;
    opts.s = s;
    opts.q = 2.0;
    const auto est = certificates::estimate_W(source, opts, trials);
    points[k] = {mu, est.mean, est.std_err};
  }
  return points;
}

std::string width_sweep_to_csv(const std::vector<WidthSweepPoint>& points) {
  std::ostringstream out;
  out << "mu,w_hat,std_err\n";
  for (const auto& p : points)
    out << format_double(p.mu) << "," << format_double(p.w_hat) << ","
        << format_double(p.std_err) << "\n";
  return out.str();
}

namespace {

struct SeriesKey {
  std::string algorithm;
  double mu;
  bool operator<(const SeriesKey& other) const {
    if (algorithm != other.algorithm) return algorithm < other.algorithm;
    return mu < other.mu;
  }
};

const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                               "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

}  // namespace

void render_nmse_svg(const std::string& path, const std::vector<AggregateRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("svg: no rows");
  std::map<SeriesKey, std::vector<const AggregateRow*>> series;
  double x_min = 1e300, x_max = -1e300, y_max = 0.0;
  for (const auto& row : rows) {
    series[{row.algorithm, row.mu}].push_back(&row);
    x_min = std::min(x_min, static_cast<double>(row.m));
    x_max = std::max(x_max, static_cast<double>(row.m));
    y_max = std::max(y_max, row.mean_nmse + row.se_nmse);
  }
  if (x_max <= x_min) x_max = x_min + 1.0;
  if (y_max <= 0.0) y_max = 1.0;
  y_max *= 1.05;

  const double width = 840, height = 600;
  const double left = 80, right = 30, top = 40, bottom = 70;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  auto sx = [&](double m) { return left + (m - x_min) / (x_max - x_min) * plot_w; };
  auto sy = [&](double v) { return top + (1.0 - v / y_max) * plot_h; };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("svg: cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // axes
  out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double xv = x_min + (x_max - x_min) * k / 5.0;
    const double yv = y_max * k / 5.0;
    out << "<text x=\"" << sx(xv) << "\" y=\"" << top + plot_h + 22
        << "\" font-size=\"12\" text-anchor=\"middle\">" << static_cast<int>(xv + 0.5)
        << "</text>\n";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", yv);
    out << "<text x=\"" << left - 8 << "\" y=\"" << sy(yv) + 4
        << "\" font-size=\"12\" text-anchor=\"end\">" << buf << "</text>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << sy(yv) << "\" x2=\"" << left + plot_w
        << "\" y2=\"" << sy(yv) << "\" stroke=\"#dddddd\"/>\n";
  }
  out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 20
      << "\" font-size=\"14\" text-anchor=\"middle\">m</text>\n"
      << "<text x=\"22\" y=\"" << top + plot_h / 2
      << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 22 "
      << top + plot_h / 2 << ")\">mean NMSE</text>\n";

  int color_index = 0;
  double legend_y = top + 8;
  for (auto& [key, points] : series) {
    std::vector<const AggregateRow*> sorted = points;
    std::sort(sorted.begin(), sorted.end(),
              [](const AggregateRow* a, const AggregateRow* b) { return a->m < b->m; });
    const char* color = kSeriesColors[color_index % 8];
    std::ostringstream poly;
    for (const auto* p : sorted) poly << sx(p->m) << "," << sy(p->mean_nmse) << " ";
    out << "<polyline points=\"" << poly.str() << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    for (const auto* p : sorted) {
      out << "<circle cx=\"" << sx(p->m) << "\" cy=\"" << sy(p->mean_nmse)
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      if (p->se_nmse > 0.0) {
        out << "<line x1=\"" << sx(p->m) << "\" y1=\"" << sy(p->mean_nmse - p->se_nmse)
            << "\" x2=\"" << sx(p->m) << "\" y2=\"" << sy(p->mean_nmse + p->se_nmse)
            << "\" stroke=\"" << color << "\"/>\n";
      }
    }
    out << "<text x=\"" << left + plot_w - 180 << "\" y=\"" << legend_y
        << "\" font-size=\"13\" fill=\"" << color << "\">" << key.algorithm
        << " mu=" << key.mu << "</text>\n";
    legend_y += 18;
    ++color_index;
  }
  out << "</svg>\n";
}

}  // namespace nnlscs::experiments
