#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "nnlscs/cli.hpp"
#include "nnlscs/csv.hpp"

using nlohmann::json;

namespace {

struct CliRun {
  int exit_code = 0;
  std::string out;
  std::string err;
  json payload;
  std::string status;
};

CliRun run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("nnlscs");
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.exit_code = nnlscs::cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  if (!r.out.empty() && r.out[0] == '{') {
    const json doc = json::parse(r.out);
    r.status = doc.value("status", "");
    if (doc.contains("payload")) r.payload = doc["payload"];
  }
  return r;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& p) : path(p) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("cli solves nnls end to end through csv files") {
  TempFile a_csv("/tmp/nnlscs_cli_A.csv"), y_csv("/tmp/nnlscs_cli_y.csv");
  {
    std::ofstream a(a_csv.path);
    a << "# rows=2 cols=2\n1,0\n0,1\n";
    std::ofstream y(y_csv.path);
    y << "# rows=2 cols=1\n1\n-1\n";
  }
  const auto r = run_cli({"--seed", "1", "solve", "nnls", "--matrix", a_csv.path, "--y",
                          y_csv.path});
  REQUIRE(r.exit_code == 0);
  CHECK(r.status == "ok");
  CHECK(r.payload["x_hat"][0].get<double>() == doctest::Approx(1.0));
  CHECK(r.payload["x_hat"][1].get<double>() == 0.0);
  CHECK(r.payload["converged"].get<bool>());
  CHECK(r.payload.contains("residual_norm"));
  CHECK(r.payload.contains("iterations"));
  CHECK(r.payload.contains("kkt_violation"));
}

TEST_CASE("cli reports infeasible mplus with exit 3") {
  TempFile a_csv("/tmp/nnlscs_cli_row.csv");
  {
    std::ofstream a(a_csv.path);
    a << "# rows=1 cols=2\n1,-1\n";
  }
  const auto r = run_cli({"--seed", "1", "certify", "mplus", "--matrix", a_csv.path});
  CHECK(r.exit_code == 3);
  CHECK(r.status == "infeasible");
  CHECK_FALSE(r.payload["feasible"].get<bool>());
}

TEST_CASE("cli bound evaluate rejects kappa rho >= 1 with exit 3") {
  const auto r = run_cli({"--seed", "1", "bound", "evaluate", "--rho", "0.5", "--tau", "1.0",
                          "--kappa", "2.0", "--s", "4", "--noise-norm", "1.0"});
  CHECK(r.exit_code == 3);
  CHECK(r.status == "infeasible");
  const std::string message = r.payload["message"].get<std::string>();
  CHECK(message.find("kappa*rho < 1") != std::string::npos);
}

TEST_CASE("cli threshold matches the frozen corner value") {
  const auto r = run_cli({"--seed", "1", "threshold", "--kind", "debiased", "--s", "1", "--n",
                          "1", "--q", "2", "--rho", "1.0"});
  REQUIRE(r.exit_code == 0);
  CHECK(r.payload["m_required"].get<std::int64_t>() == 2654209);
}

TEST_CASE("cli usage errors exit with 2") {
  const auto bad = run_cli({"frobnicate"});
  CHECK(bad.exit_code == 2);
  const auto help = run_cli({"--help"});
  CHECK(help.exit_code == 0);
}

TEST_CASE("cli logs a random seed when none is given") {
  TempFile out_csv("/tmp/nnlscs_cli_gen.csv");
  const auto r = run_cli({"generate", "matrix", "--m", "3", "--n", "2", "--out", out_csv.path});
  REQUIRE(r.exit_code == 0);
  CHECK(r.err.find("seed:") != std::string::npos);
}

TEST_CASE("cli generation is deterministic under --seed") {
  TempFile f1("/tmp/nnlscs_cli_g1.csv"), f2("/tmp/nnlscs_cli_g2.csv");
  run_cli({"--seed", "42", "generate", "matrix", "--kind", "rademacher", "--m", "4", "--n", "3",
           "--out", f1.path});
  run_cli({"--seed", "42", "generate", "matrix", "--kind", "rademacher", "--m", "4", "--n", "3",
           "--out", f2.path});
  std::ifstream s1(f1.path), s2(f2.path);
  std::stringstream b1, b2;
  b1 << s1.rdbuf();
  b2 << s2.rdbuf();
  CHECK(b1.str() == b2.str());
  CHECK(b1.str().find("kind=rademacher") != std::string::npos);
}

TEST_CASE("cli width sweep emits csv on stdout") {
  const auto r = run_cli({"--seed", "3", "estimate", "width", "--s", "2", "--n", "20", "--m",
                          "8", "--trials", "30", "--mu-sweep", "0:2:3"});
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.rfind("mu,w_hat,std_err\n", 0) == 0);
}

TEST_CASE("cli pipeline: generate instance, solve, certify, probe, bound") {
  const std::string prefix = "/tmp/nnlscs_cli_pipe";
  TempFile fa(prefix + "_A.csv"), fx(prefix + "_x0.csv"), fn(prefix + "_noise.csv"),
      fy(prefix + "_y.csv"), fcert("/tmp/nnlscs_cli_cert.json"),
      fprobe("/tmp/nnlscs_cli_probe.json"), fsol("/tmp/nnlscs_cli_sol.csv");

  auto gen = run_cli({"--seed", "11", "generate", "instance", "--mu", "20", "--m", "40", "--n",
                      "24", "--s", "3", "--variance", "0.01", "--out-prefix", prefix});
  REQUIRE(gen.exit_code == 0);

  auto solve = run_cli({"--seed", "11", "solve", "nnls", "--matrix", fa.path, "--y", fy.path});
  REQUIRE(solve.exit_code == 0);
  {
    Eigen::VectorXd x_hat(solve.payload["x_hat"].size());
    for (Eigen::Index i = 0; i < x_hat.size(); ++i)
      x_hat[i] = solve.payload["x_hat"][i].get<double>();
    nnlscs::write_vector_csv(fsol.path, x_hat);
  }

  auto cert = run_cli({"--seed", "11", "certify", "mplus", "--matrix", fa.path, "--mu", "20"});
  REQUIRE(cert.exit_code == 0);
  {
    std::ofstream f(fcert.path);
    f << cert.out;
  }

  auto probe = run_cli({"--seed", "11", "probe", "nsp", "--matrix", fa.path, "--s", "3", "--rho",
                        "0.5", "--trials", "150"});
  REQUIRE(probe.exit_code == 0);
  {
    std::ofstream f(fprobe.path);
    f << probe.out;
  }

  // noise norm of the generated instance
  const Eigen::VectorXd noise = nnlscs::read_vector_csv(fn.path);
  auto bound = run_cli({"--seed", "11", "bound", "evaluate", "--rho", "0.5", "--s", "3",
                        "--certificate", fcert.path, "--probe-json", fprobe.path, "--noise-norm",
                        std::to_string(noise.norm()), "--matrix", fa.path, "--x0", fx.path,
                        "--x-hat", fsol.path});
  REQUIRE(bound.exit_code == 0);
  CHECK(bound.payload["applicable"].get<bool>());
  CHECK(bound.payload.contains("C"));
  CHECK(bound.payload.contains("D"));
  CHECK(bound.payload["total"].get<double>() > 0.0);
  CHECK(bound.payload.contains("validation"));
  CHECK(bound.payload["validation"]["holds"].get<bool>());
}

TEST_CASE("cli experiment nmse runs from a config file") {
  TempFile fcfg("/tmp/nnlscs_cli_cfg.txt"), frec("/tmp/nnlscs_cli_rec.csv"),
      fagg("/tmp/nnlscs_cli_rec.csv.aggregates.csv"), fsvg("/tmp/nnlscs_cli_chart.svg");
  {
    std::ofstream f(fcfg.path);
    f << "n = 10\ns = 2\nm_list = 8\nmu_list = 0, 2\ntrials = 2\n"
      << "noise_variance = 0.01\nalgorithms = nnls\nmaster_seed = 5\n"
      << "output_path = " << frec.path << "\n";
  }
  const auto r = run_cli({"experiment", "nmse", "--config", fcfg.path, "--out-svg", fsvg.path});
  REQUIRE(r.exit_code == 0);
  CHECK(r.payload["cells"].get<int>() == 2);
  std::ifstream rec(frec.path);
  CHECK(rec.good());
  std::ifstream agg(fagg.path);
  CHECK(agg.good());
  std::ifstream svg(fsvg.path);
  CHECK(svg.good());
}

TEST_CASE("cli plot aggregates records into csv") {
  TempFile frec("/tmp/nnlscs_cli_plotrec.csv"), fout("/tmp/nnlscs_cli_plotout.csv");
  {
    std::ofstream f(frec.path);
    f << "algorithm,mu,m,n,s,signal_kind,trial_index,nmse,residual,noise_norm,seed,"
         "wall_time_ms\n";
    f << "nnls,0,20,100,5,binary,0,0.5,1,1,7,3\n";
    f << "nnls,0,20,100,5,binary,1,0.7,1,1,8,3\n";
  }
  const auto r = run_cli({"plot", "--input", frec.path, "--out", fout.path});
  REQUIRE(r.exit_code == 0);
  std::ifstream in(fout.path);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "algorithm,mu,m,n,s,trials,mean_nmse,se_nmse,median_nmse");
  CHECK(row.rfind("nnls,0,20,100,5,2,0.59", 0) == 0);
}
