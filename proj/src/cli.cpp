#include "nnlscs/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <random>
#include <string>

#include "nnlscs/bounds.hpp"
#include "nnlscs/certificates.hpp"
#include "nnlscs/csv.hpp"
#include "nnlscs/ensembles.hpp"
#include "nnlscs/errors.hpp"
#include "nnlscs/experiments.hpp"
#include "nnlscs/geometry.hpp"
#include "nnlscs/solvers.hpp"

namespace nnlscs::cli {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitSolverFailure = 4;

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json solve_result_to_json(const solvers::SolveResult& r) {
  return json{{"x_hat", vector_to_json(r.x_hat)},
              {"residual_norm", r.residual_norm},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"kkt_violation", r.kkt_violation}};
}

struct Emitter {
  std::ostream& out;
  bool pretty = false;

  int emit(const std::string& status, const json& payload, int code) const {
    json doc{{"status", status}, {"payload", payload}};
    if (pretty)
      out << doc.dump(2) << "\n";
    else
      out << doc.dump() << "\n";
    return code;
  }
  int ok(const json& payload) const { return emit("ok", payload, kExitOk); }
};

// Parses "lo:hi:steps".
void parse_range(const std::string& text, double& lo, double& hi, int& steps) {
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw CLI::ValidationError("range", "expected lo:hi:steps");
  lo = std::stod(text.substr(0, c1));
  hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
  steps = std::stoi(text.substr(c2 + 1));
  if (steps < 1) throw CLI::ValidationError("range", "steps must be >= 1");
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"nnlscs: sparse non-negative recovery, certificates and experiments"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed_flag;
  bool pretty = false;
  app.add_option("--seed", seed_flag, "Master seed; omitted -> random, logged to stderr");
  app.add_flag("--pretty", pretty, "Indent JSON output");

  // ---- generate ----
  auto* generate = app.add_subcommand("generate", "Write matrices/signals/noise as CSV");
  generate->require_subcommand(1);

  struct {
    std::string kind = "gaussian";
    double mu = 0.0;
    int m = 0, n = 0;
    std::string out_path;
  } gm;
  auto* gen_matrix = generate->add_subcommand("matrix", "Random measurement matrix");
  gen_matrix->add_option("--kind", gm.kind, "gaussian|rademacher");
  gen_matrix->add_option("--mu", gm.mu, "Bias added to every entry");
  gen_matrix->add_option("--m", gm.m, "Rows")->required();
  gen_matrix->add_option("--n", gm.n, "Columns")->required();
  gen_matrix->add_option("--out", gm.out_path, "Output CSV")->required();

  struct {
    std::string kind = "binary";
    int n = 0, s = 0;
    std::string out_path;
  } gs;
  auto* gen_signal = generate->add_subcommand("signal", "Sparse non-negative signal");
  gen_signal->add_option("--kind", gs.kind, "binary|half_normal");
  gen_signal->add_option("--n", gs.n, "Length")->required();
  gen_signal->add_option("--s", gs.s, "Sparsity")->required();
  gen_signal->add_option("--out", gs.out_path, "Output CSV")->required();

  struct {
    int m = 0;
    double variance = 0.0;
    std::string out_path;
  } gn;
  auto* gen_noise = generate->add_subcommand("noise", "Gaussian noise vector");
  gen_noise->add_option("--m", gn.m, "Length")->required();
  gen_noise->add_option("--variance", gn.variance, "Per-component variance")->required();
  gen_noise->add_option("--out", gn.out_path, "Output CSV")->required();

  struct {
    std::string kind = "gaussian";
    std::string signal_kind = "binary";
    double mu = 0.0, variance = 0.0;
    int m = 0, n = 0, s = 0;
    std::string prefix;
  } gi;
  auto* gen_instance = generate->add_subcommand("instance", "A, x0, noise, y files");
  gen_instance->add_option("--kind", gi.kind, "gaussian|rademacher");
  gen_instance->add_option("--signal-kind", gi.signal_kind, "binary|half_normal");
  gen_instance->add_option("--mu", gi.mu, "Bias");
  gen_instance->add_option("--variance", gi.variance, "Noise variance");
  gen_instance->add_option("--m", gi.m, "Rows")->required();
  gen_instance->add_option("--n", gi.n, "Columns")->required();
  gen_instance->add_option("--s", gi.s, "Sparsity")->required();
  gen_instance->add_option("--out-prefix", gi.prefix, "Prefix for A/x0/noise/y CSVs")->required();

  // ---- solve ----
  auto* solve = app.add_subcommand("solve", "Run a recovery program");
  solve->require_subcommand(1);

  struct {
    std::string matrix, y;
    double tol = 1e-9;
    int max_iter = 0;
  } sn;
  auto* solve_nnls_cmd = solve->add_subcommand("nnls", "Non-negative least squares");
  solve_nnls_cmd->add_option("--matrix", sn.matrix, "Matrix CSV")->required();
  solve_nnls_cmd->add_option("--y", sn.y, "Measurement CSV")->required();
  solve_nnls_cmd->add_option("--tol", sn.tol, "KKT tolerance");
  solve_nnls_cmd->add_option("--max-iter", sn.max_iter, "Outer iteration cap (0 = default)");

  struct {
    std::string matrix, y;
    double eta = 0.0, tol = 1e-9;
    int max_iter = 0;
  } sb;
  auto* solve_bpdn_cmd = solve->add_subcommand("bpdn", "l1 minimization with residual budget");
  solve_bpdn_cmd->add_option("--matrix", sb.matrix, "Matrix CSV")->required();
  solve_bpdn_cmd->add_option("--y", sb.y, "Measurement CSV")->required();
  solve_bpdn_cmd->add_option("--eta", sb.eta, "Residual budget")->required();
  solve_bpdn_cmd->add_option("--tol", sb.tol, "Duality-gap tolerance");
  solve_bpdn_cmd->add_option("--max-iter", sb.max_iter, "Iteration cap (0 = default)");

  // ---- certify ----
  auto* certify = app.add_subcommand("certify", "Recovery certificates");
  certify->require_subcommand(1);
  struct {
    std::string matrix;
    std::optional<double> mu;
  } cm;
  auto* certify_mplus = certify->add_subcommand("mplus", "M+ criterion / witness certificate");
  certify_mplus->add_option("--matrix", cm.matrix, "Matrix CSV")->required();
  certify_mplus->add_option("--mu", cm.mu,
                            "Bias level: also emit the 1/(m mu) witness certificate");

  // ---- estimate ----
  auto* estimate = app.add_subcommand("estimate", "Monte Carlo estimators");
  estimate->require_subcommand(1);

  struct {
    int s = 1, n = 0, m = 0, trials = 1000;
    double mu = 0.0, q = 2.0;
    bool debiased = false;
    std::string mu_sweep;  // lo:hi:steps -> CSV output
    std::string out_path;
  } ew;
  auto* estimate_width = estimate->add_subcommand("width", "W_m over sparse vectors");
  estimate_width->add_option("--s", ew.s, "Sparsity")->required();
  estimate_width->add_option("--n", ew.n, "Dimension")->required();
  estimate_width->add_option("--m", ew.m, "Rows per replicate")->required();
  estimate_width->add_option("--mu", ew.mu, "Bias");
  estimate_width->add_option("--q", ew.q, "Sparse-ball exponent");
  estimate_width->add_option("--trials", ew.trials, "Replicates");
  estimate_width->add_flag("--debiased", ew.debiased, "Estimate over debiased b-rows");
  estimate_width->add_option("--mu-sweep", ew.mu_sweep, "lo:hi:steps; emits CSV instead");
  estimate_width->add_option("--out", ew.out_path, "Write CSV here instead of stdout");

  struct {
    int s = 1, n = 0, m = 0, q_trials = 100000, w_trials = 1000;
    double mu = 0.0, q = 2.0, rho = 0.5, xi = 0.0, t_param = 0.0;
    bool debiased = false;
  } es;
  auto* estimate_smallball =
      estimate->add_subcommand("smallball", "Assembled small-ball lower bound");
  estimate_smallball->add_option("--s", es.s, "Sparsity")->required();
  estimate_smallball->add_option("--n", es.n, "Dimension")->required();
  estimate_smallball->add_option("--m", es.m, "Measurement count")->required();
  estimate_smallball->add_option("--mu", es.mu, "Bias");
  estimate_smallball->add_option("--q", es.q, "NSP exponent");
  estimate_smallball->add_option("--rho", es.rho, "Cone parameter");
  estimate_smallball->add_option("--xi", es.xi, "Level xi (0 = plug-in default)");
  estimate_smallball->add_option("--t", es.t_param, "Deviation t (0 = plug-in default)");
  estimate_smallball->add_option("--q-trials", es.q_trials, "Row draws per direction");
  estimate_smallball->add_option("--w-trials", es.w_trials, "Width replicates");
  estimate_smallball->add_flag("--debiased", es.debiased, "Use the debiased bound");

  // ---- threshold ----
  struct {
    std::string kind = "debiased";
    int s = 1, n = 0;
    double q = 2.0, rho = 0.5, mu = 0.0;
  } th;
  auto* threshold = app.add_subcommand("threshold", "Closed-form sample-complexity threshold");
  threshold->add_option("--kind", th.kind, "debiased|naive_biased");
  threshold->add_option("--s", th.s, "Sparsity")->required();
  threshold->add_option("--n", th.n, "Dimension")->required();
  threshold->add_option("--q", th.q, "NSP exponent");
  threshold->add_option("--rho", th.rho, "NSP parameter");
  threshold->add_option("--mu", th.mu, "Bias (naive_biased only)");

  // ---- probe ----
  auto* probe = app.add_subcommand("probe", "Sampled necessary-condition probes");
  probe->require_subcommand(1);
  struct {
    std::string matrix;
    int s = 1, trials = 1000;
    double q = 2.0, rho = 0.5;
  } pn;
  auto* probe_nsp = probe->add_subcommand("nsp", "Worst sampled ||A v|| over the cone");
  probe_nsp->add_option("--matrix", pn.matrix, "Matrix CSV")->required();
  probe_nsp->add_option("--s", pn.s, "Sparsity")->required();
  probe_nsp->add_option("--q", pn.q, "NSP exponent");
  probe_nsp->add_option("--rho", pn.rho, "Cone parameter");
  probe_nsp->add_option("--trials", pn.trials, "Cone samples");

  // ---- bound ----
  auto* bound = app.add_subcommand("bound", "Recovery error bounds");
  bound->require_subcommand(1);
  struct {
    double rho = 0.5, tau = 0.0, kappa = 1.0, w_inv_norm = 1.0, t_norm = 0.0;
    double p = 2.0, q = 2.0, sigma_s1 = 0.0, noise_norm = 0.0;
    int s = 1;
    bool scaled_t = false;
    std::string certificate;  // JSON from `certify mplus --mu`
    std::string probe_json;   // JSON from `probe nsp`
    std::string matrix, x0, x_hat;
  } be;
  auto* bound_evaluate = bound->add_subcommand("evaluate", "Evaluate the NNLS error bound");
  bound_evaluate->add_option("--rho", be.rho, "NSP rho")->required();
  bound_evaluate->add_option("--tau", be.tau, "NSP tau (alternative to --probe-json)");
  bound_evaluate->add_option("--kappa", be.kappa, "Witness condition number");
  bound_evaluate->add_option("--w-inv-norm", be.w_inv_norm, "1/min(w) of the witness");
  bound_evaluate->add_option("--t-norm", be.t_norm, "||t||_2 of the witness");
  bound_evaluate->add_option("--certificate", be.certificate,
                             "Witness certificate JSON; fills kappa/w-inv-norm/t-norm");
  bound_evaluate->add_option("--probe-json", be.probe_json, "NSP probe JSON; fills tau");
  bound_evaluate->add_option("--s", be.s, "Sparsity")->required();
  bound_evaluate->add_option("--p", be.p, "Error norm exponent");
  bound_evaluate->add_option("--q", be.q, "NSP exponent");
  bound_evaluate->add_option("--sigma-s1", be.sigma_s1, "sigma_s(x0)_1");
  bound_evaluate->add_option("--noise-norm", be.noise_norm, "||n||_2");
  bound_evaluate->add_flag("--scaled-t", be.scaled_t, "Use t_norm / s^{1-1/q} variant");
  bound_evaluate->add_option("--matrix", be.matrix, "Optional: validate against instance");
  bound_evaluate->add_option("--x0", be.x0, "Optional: true signal CSV");
  bound_evaluate->add_option("--x-hat", be.x_hat, "Optional: solver output CSV");

  // ---- experiment ----
  auto* experiment = app.add_subcommand("experiment", "Reproduce the numerical studies");
  experiment->require_subcommand(1);
  struct {
    std::string config;
    std::string out_records, out_aggregates, out_svg;
  } en;
  auto* experiment_nmse = experiment->add_subcommand("nmse", "NMSE vs m sweep");
  experiment_nmse->add_option("--config", en.config, "Config file")->required();
  experiment_nmse->add_option("--out-records", en.out_records, "Override records CSV path");
  experiment_nmse->add_option("--out-aggregates", en.out_aggregates, "Aggregate CSV path");
  experiment_nmse->add_option("--out-svg", en.out_svg, "Optional SVG chart path");

  struct {
    int s = 128, n = 1000, m = 256, trials = 500;
    std::string mu_range = "0:30:31";
    bool debiased = false;
    std::string out_path;
  } ws;
  auto* experiment_width = experiment->add_subcommand("width-sweep", "Width vs mu series");
  experiment_width->add_option("--s", ws.s, "Sparsity");
  experiment_width->add_option("--n", ws.n, "Dimension");
  experiment_width->add_option("--m", ws.m, "Rows per replicate");
  experiment_width->add_option("--mu", ws.mu_range, "lo:hi:steps");
  experiment_width->add_option("--trials", ws.trials, "Replicates per point");
  experiment_width->add_flag("--debiased", ws.debiased, "Sweep over debiased rows");
  experiment_width->add_option("--out", ws.out_path, "CSV path (stdout when omitted)");

  // ---- plot ----
  struct {
    std::string input, out_path;
  } pl;
  auto* plot = app.add_subcommand("plot", "Aggregate a records CSV into CSV or SVG");
  plot->add_option("--input", pl.input, "Records CSV")->required();
  plot->add_option("--out", pl.out_path, "Output .csv or .svg")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help() << std::flush;
      return kExitOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help() << std::flush;
    return kExitUsage;
  }

  std::uint64_t seed;
  if (seed_flag) {
    seed = *seed_flag;
  } else {
    std::random_device rd;
    seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd() ^
           static_cast<std::uint64_t>(
               std::chrono::steady_clock::now().time_since_epoch().count());
    err << "seed: " << seed << "\n";
  }
  Emitter emitter{out, pretty};

  try {
    if (gen_matrix->parsed()) {
      ensembles::EnsembleSpec spec{ensembles::matrix_kind_from_string(gm.kind), gm.mu, gm.m,
                                   gm.n, seed};
      CsvMeta meta;
      meta.kind = gm.kind;
      meta.mu = gm.mu;
      meta.seed = seed;
      write_matrix_csv(gm.out_path, ensembles::generate_matrix(spec), meta);
      return emitter.ok({{"path", gm.out_path}, {"rows", gm.m}, {"cols", gm.n}, {"seed", seed}});
    }
    if (gen_signal->parsed()) {
      ensembles::SignalSpec spec{ensembles::signal_kind_from_string(gs.kind), gs.n, gs.s, seed};
      CsvMeta meta;
      meta.kind = gs.kind;
      meta.seed = seed;
      write_vector_csv(gs.out_path, ensembles::generate_signal(spec), meta);
      return emitter.ok({{"path", gs.out_path}, {"n", gs.n}, {"s", gs.s}, {"seed", seed}});
    }
    if (gen_noise->parsed()) {
      CsvMeta meta;
      meta.seed = seed;
      write_vector_csv(gn.out_path, ensembles::generate_noise(gn.m, gn.variance, seed), meta);
      return emitter.ok({{"path", gn.out_path}, {"m", gn.m}, {"seed", seed}});
    }
    if (gen_instance->parsed()) {
      ensembles::EnsembleSpec mat{ensembles::matrix_kind_from_string(gi.kind), gi.mu, gi.m,
                                  gi.n, derive_seed(seed, 1)};
      ensembles::SignalSpec sig{ensembles::signal_kind_from_string(gi.signal_kind), gi.n, gi.s,
                                derive_seed(seed, 2)};
      const auto inst = ensembles::make_instance(mat, sig, gi.variance, derive_seed(seed, 3));
      write_matrix_csv(gi.prefix + "_A.csv", inst.A, {gi.kind, gi.mu, seed});
      write_vector_csv(gi.prefix + "_x0.csv", inst.x0);
      write_vector_csv(gi.prefix + "_noise.csv", inst.noise);
      write_vector_csv(gi.prefix + "_y.csv", inst.y);
      return emitter.ok({{"prefix", gi.prefix}, {"seed", seed}});
    }

    if (solve_nnls_cmd->parsed()) {
      const auto a = read_matrix_csv(sn.matrix);
      const auto y = read_vector_csv(sn.y);
      solvers::SolverOptions opts;
      opts.tolerance = sn.tol;
      opts.max_iterations = sn.max_iter;
      const auto result = solvers::solve_nnls(a, y, opts);
      return emitter.emit(result.converged ? "ok" : "solver_failure",
                          solve_result_to_json(result),
                          result.converged ? kExitOk : kExitSolverFailure);
    }
    if (solve_bpdn_cmd->parsed()) {
      const auto a = read_matrix_csv(sb.matrix);
      const auto y = read_vector_csv(sb.y);
      solvers::SolverOptions opts;
      opts.tolerance = sb.tol;
      opts.max_iterations = sb.max_iter;
      const auto result = solvers::solve_bpdn(a, y, sb.eta, opts);
      return emitter.emit(result.converged ? "ok" : "solver_failure",
                          solve_result_to_json(result),
                          result.converged ? kExitOk : kExitSolverFailure);
    }

    if (certify_mplus->parsed()) {
      const auto a = read_matrix_csv(cm.matrix);
      json payload;
      if (cm.mu) {
        const auto cert = certificates::certify_mplus_biased(a, *cm.mu);
        payload = {{"t", vector_to_json(cert.t)},      {"w", vector_to_json(cert.w)},
                   {"valid", cert.valid},              {"t_norm", cert.t_norm},
                   {"prob_bound", cert.prob_bound}};
        payload["kappa_upper"] = cert.valid ? json(cert.kappa_upper) : json(nullptr);
        return emitter.emit(cert.valid ? "ok" : "infeasible", payload,
                            cert.valid ? kExitOk : kExitInfeasible);
      }
      const auto feas = certificates::mplus_feasible(a);
      payload["delta"] = feas.delta;
      switch (feas.status) {
        case certificates::MPlusFeasibility::Status::feasible:
          payload["feasible"] = true;
          payload["t"] = vector_to_json(feas.t);
          return emitter.ok(payload);
        case certificates::MPlusFeasibility::Status::infeasible:
          payload["feasible"] = false;
          return emitter.emit("infeasible", payload, kExitInfeasible);
        default:
          return emitter.emit("indeterminate", payload, kExitSolverFailure);
      }
    }

    if (estimate_width->parsed()) {
      if (!ew.mu_sweep.empty()) {
        double lo, hi;
        int steps;
        parse_range(ew.mu_sweep, lo, hi, steps);
        const auto points = experiments::run_width_sweep(ew.n, ew.s, ew.m, lo, hi, steps,
                                                         ew.trials, seed, ew.debiased);
        const std::string csv = experiments::width_sweep_to_csv(points);
        if (ew.out_path.empty()) {
          out << csv;
        } else {
          std::ofstream f(ew.out_path);
          f << csv;
        }
        return kExitOk;
      }
      certificates::RowSource source;
      source.spec = {ensembles::MatrixKind::gaussian, ew.mu, ew.m, ew.n, seed};
      source.debiased = ew.debiased;
      certificates::WidthOptions wopts;
      wopts.s = ew.s;
      wopts.q = ew.q;
      const auto est = certificates::estimate_W(source, wopts, ew.trials);
      return emitter.ok({{"w_hat", est.mean},
                         {"std_err_w", est.std_err},
                         {"trials", est.trials},
                         {"s", ew.s},
                         {"n", ew.n},
                         {"m", ew.m},
                         {"mu", ew.mu},
                         {"q", ew.q},
                         {"debiased", ew.debiased},
                         {"analytic_bound", certificates::analytic_W_bound(
                                                ew.s, static_cast<double>(ew.n), ew.mu)}});
    }

    if (estimate_smallball->parsed()) {
      // Plug-in defaults from the threshold derivations.
      const double xi = es.xi > 0.0 ? es.xi
                        : es.debiased ? 1.0 / std::sqrt(2.0)
                                      : 1.0 / (2.0 * std::sqrt(2.0));
      const double t_param = es.t_param > 0.0 ? es.t_param
                             : es.debiased
                                 ? std::sqrt(static_cast<double>(es.m) - 1.0) / (8.0 * std::sqrt(2.0))
                                 : std::sqrt(static_cast<double>(es.m)) / 24.0;
      certificates::RowSource source;
      source.spec = {ensembles::MatrixKind::gaussian, es.mu, es.m, es.n, seed};
      source.debiased = es.debiased;
      certificates::DirectionPlan plan;
      plan.s = es.s;
      plan.q = es.q;
      plan.rho = es.rho;
      plan.seed = derive_seed(seed, 7);
      const double q_hat = certificates::estimate_Q(source, plan, 2.0 * xi, es.q_trials);
      certificates::WidthOptions wopts;
      wopts.s = es.s;
      wopts.q = es.q;
      wopts.cone_scaled = true;
      wopts.rho = es.rho;
      const auto west = certificates::estimate_W(source, wopts, es.w_trials);
      certificates::SmallBallEstimate sbst;
      sbst.q_hat = q_hat;
      sbst.w_hat = west.mean;
      sbst.xi = xi;
      sbst.t_param = t_param;
      sbst.trials = es.w_trials;
      sbst.std_err_w = west.std_err;
      sbst.lower_bound =
          es.debiased
              ? certificates::smallball_lower_bound_debiased(q_hat, west.mean, xi, t_param, es.m)
              : certificates::smallball_lower_bound(q_hat, west.mean, xi, t_param, es.m);
      return emitter.ok({{"q_hat", sbst.q_hat},
                         {"w_hat", sbst.w_hat},
                         {"xi", sbst.xi},
                         {"t_param", sbst.t_param},
                         {"lower_bound", sbst.lower_bound},
                         {"trials", sbst.trials},
                         {"std_err_w", sbst.std_err_w},
                         {"debiased", es.debiased},
                         {"implied_tau", sbst.lower_bound > 0.0 ? json(1.0 / sbst.lower_bound)
                                                                : json(nullptr)}});
    }

    if (threshold->parsed()) {
      const auto kind = th.kind == "debiased" ? certificates::ThresholdKind::debiased
                        : th.kind == "naive_biased"
                            ? certificates::ThresholdKind::naive_biased
                            : throw std::invalid_argument("threshold: unknown kind " + th.kind);
      const auto m_required = certificates::sample_complexity(kind, th.s, th.n, th.q, th.rho, th.mu);
      return emitter.ok({{"kind", th.kind},
                         {"s", th.s},
                         {"n", th.n},
                         {"q", th.q},
                         {"rho", th.rho},
                         {"mu", th.mu},
                         {"m_required", m_required}});
    }

    if (probe_nsp->parsed()) {
      const auto a = read_matrix_csv(pn.matrix);
      geometry::NspParams params;
      params.s = pn.s;
      params.q = pn.q;
      params.rho = pn.rho;
      params.tau = 1.0;  // placeholder; the probe reports the implied tau
      const auto res = certificates::empirical_nsp_probe(a, params, pn.trials, seed);
      json payload{{"accepted", res.accepted}, {"requested", res.requested}};
      payload["min_norm"] = res.accepted ? json(res.min_norm) : json(nullptr);
      payload["implied_tau"] =
          res.accepted && std::isfinite(res.implied_tau) ? json(res.implied_tau) : json(nullptr);
      return emitter.ok(payload);
    }

    if (bound_evaluate->parsed()) {
      bounds::BoundInputs in;
      in.rho = be.rho;
      in.tau = be.tau;
      in.kappa = be.kappa;
      in.w_inv_norm = be.w_inv_norm;
      in.t_norm = be.t_norm;
      in.s = be.s;
      in.p = be.p;
      in.q = be.q;
      in.sigma_s1 = be.sigma_s1;
      in.noise_norm = be.noise_norm;
      in.scaled_t_variant = be.scaled_t;
      if (!be.certificate.empty()) {
        std::ifstream f(be.certificate);
        if (!f) throw std::runtime_error("cannot open " + be.certificate);
        json doc = json::parse(f);
        const json& cert = doc.contains("payload") ? doc["payload"] : doc;
        if (!cert.value("valid", false))
          throw InfeasibleError("bound: certificate is not valid (min w <= 0)");
        if (cert.contains("kappa_upper") && !cert["kappa_upper"].is_null())
          in.kappa = cert["kappa_upper"].get<double>();
        in.t_norm = cert.value("t_norm", in.t_norm);
        double w_min = std::numeric_limits<double>::infinity();
        for (const auto& wi : cert["w"]) w_min = std::min(w_min, wi.get<double>());
        in.w_inv_norm = 1.0 / w_min;
      }
      if (!be.probe_json.empty()) {
        std::ifstream f(be.probe_json);
        if (!f) throw std::runtime_error("cannot open " + be.probe_json);
        json doc = json::parse(f);
        const json& probe_payload = doc.contains("payload") ? doc["payload"] : doc;
        if (probe_payload["implied_tau"].is_null())
          throw InfeasibleError("bound: probe found no finite tau");
        in.tau = probe_payload["implied_tau"].get<double>();
      }
      const auto rep = bounds::nnls_bound(in);
      json payload{{"rho", rep.rho},
                   {"tau", rep.tau},
                   {"kappa", rep.kappa},
                   {"s", rep.s},
                   {"p", rep.p},
                   {"q", rep.q},
                   {"C", rep.c},
                   {"D", rep.d},
                   {"t_norm", rep.t_norm},
                   {"sigma_term", rep.sigma_term},
                   {"noise_term", rep.noise_term},
                   {"total", rep.total},
                   {"applicable", rep.applicable}};
      if (!be.matrix.empty() && !be.x0.empty() && !be.x_hat.empty()) {
        ensembles::RecoveryInstance inst;
        inst.A = read_matrix_csv(be.matrix);
        inst.x0 = read_vector_csv(be.x0);
        solvers::SolveResult sol;
        sol.x_hat = read_vector_csv(be.x_hat);
        const auto v = bounds::validate_bound(inst, sol, rep, be.p);
        payload["validation"] = {{"holds", v.holds}, {"error", v.error}, {"margin", v.margin}};
      }
      return emitter.ok(payload);
    }

    if (experiment_nmse->parsed()) {
      auto config = experiments::parse_config_file(en.config);
      if (seed_flag) config.master_seed = seed;  // explicit --seed overrides the file
      const auto result = experiments::run_nmse_experiment(config);
      std::string records_path = !en.out_records.empty() ? en.out_records : config.output_path;
      if (records_path.empty()) records_path = "nmse_records.csv";
      experiments::write_records_csv(records_path, result.records);
      std::string agg_path = !en.out_aggregates.empty()
                                 ? en.out_aggregates
                                 : records_path + ".aggregates.csv";
      experiments::write_aggregates_csv(agg_path, result.aggregates);
      if (!en.out_svg.empty()) experiments::render_nmse_svg(en.out_svg, result.aggregates);
      json failures = json::array();
      for (const auto& f : result.failures)
        failures.push_back({{"algorithm", f.algorithm},
                            {"mu", f.mu},
                            {"m", f.m},
                            {"trial_index", f.trial_index},
                            {"message", f.message}});
      return emitter.ok({{"records", records_path},
                         {"aggregates", agg_path},
                         {"trials", config.trials},
                         {"cells", result.aggregates.size()},
                         {"failures", failures},
                         {"master_seed", config.master_seed}});
    }

    if (experiment_width->parsed()) {
      double lo, hi;
      int steps;
      parse_range(ws.mu_range, lo, hi, steps);
      const auto points = experiments::run_width_sweep(ws.n, ws.s, ws.m, lo, hi, steps,
                                                       ws.trials, seed, ws.debiased);
      const std::string csv = experiments::width_sweep_to_csv(points);
      if (ws.out_path.empty()) {
        out << csv;
      } else {
        std::ofstream f(ws.out_path);
        f << csv;
      }
      return kExitOk;
    }

    if (plot->parsed()) {
      const auto records = experiments::read_records_csv(pl.input);
      const auto aggregates = experiments::aggregate_records(records);
      if (pl.out_path.size() >= 4 && pl.out_path.substr(pl.out_path.size() - 4) == ".svg") {
        experiments::render_nmse_svg(pl.out_path, aggregates);
      } else {
        experiments::write_aggregates_csv(pl.out_path, aggregates);
      }
      return emitter.ok({{"out", pl.out_path}, {"rows", aggregates.size()}});
    }
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return emitter.emit("infeasible", {{"message", e.what()}}, kExitInfeasible);
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return emitter.emit("invalid_input", {{"message", e.what()}}, kExitUsage);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return emitter.emit("solver_failure", {{"message", e.what()}}, kExitSolverFailure);
  }

  err << "error: no subcommand handled\n";
  return kExitUsage;
}

}  // namespace nnlscs::cli
