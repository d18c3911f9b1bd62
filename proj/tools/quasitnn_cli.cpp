// SPDX-License-Identifier: Apache-2.0
#include "quasitnn/config.hpp"
#include "quasitnn/experiments.hpp"
#include "quasitnn/invariants.hpp"
#include "quasitnn/spectral_oracle.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace quasitnn;
namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

std::string format_error(const std::optional<double>& e) {
  if (!e) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4e", *e);
  return buf;
}

// Value of the `problem` key, read ahead so the example's schedule can serve as defaults.
std::optional<std::string> problem_in_config(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    line = line.substr(0, line.find('#'));
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::istringstream key(line.substr(0, eq)), value(line.substr(eq + 1));
    std::string k, v;
    key >> k;
    value >> v;
    if (k == "problem" && !v.empty()) return v;
  }
  return std::nullopt;
}

int run_verb(std::optional<int> example, const std::string& config_path, std::optional<std::uint64_t> seed,
             const fs::path& out, bool no_residual, int plot_samples, int progress) {
  TrainConfig cfg;
  int id = 0;
  if (example) {
    id = *example;
    cfg = example_config(id, !no_residual);
  }
  if (!config_path.empty()) {
    if (!example) {
      if (const auto name = problem_in_config(config_path)) {
        id = parse_example_id(*name);
        cfg = example_config(id, !no_residual);
      }
    }
    cfg = load_config(config_path, cfg);
    if (!cfg.problem.empty()) id = parse_example_id(cfg.problem);
  }
  if (id == 0) throw std::invalid_argument("run: give --example or a config with a problem key");
  if (seed) cfg.seed = *seed;
  cfg.problem = "example" + std::to_string(id);
  validate(cfg);

  const ProblemSpec prob = registry(id);
  fs::create_directories(out);
  const auto start = std::chrono::steady_clock::now();
  const TrainResult result = run_algorithm_1(prob, cfg, [&](const HistoryRow& row) {
    if (progress > 0 && row.step % progress == 0)
      std::cerr << "step " << row.step << " phase " << row.phase << " loss " << row.loss << " e_L2 "
                << format_error(row.e_L2) << '\n';
  });
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  auto metrics = open_out(out / "metrics.csv");
  write_history_csv(metrics, result.history);
  const fs::path ckpt = out / "model.ckpt";
  auto model = open_out(ckpt);
  save_checkpoint(model, result.tnn);
  auto cfg_echo = open_out(out / "config.txt");
  write_config(cfg_echo, cfg);

  ExperimentResult summary = summarize(id, prob, cfg, result, seconds, cfg.seed);
  summary.checkpoint = ckpt.string();
  auto json = open_out(out / "summary.json");
  write_summary_json(json, summary);

  if (prob.P.d() <= 2 && plot_samples > 1) {
    PlotSpec spec;
    spec.lo.assign(prob.P.d(), 0.0);
    spec.hi.assign(prob.P.d(), 10.0);
    spec.samples = prob.P.d() == 1 ? plot_samples : std::max(2, static_cast<int>(std::sqrt(plot_samples * 100.0)));
    auto plot = open_out(out / "plot.csv");
    emit_plot_data(result.tnn, prob, spec, plot);
  }

  std::cout << prob.name << "  seed " << cfg.seed << "  " << seconds << " s\n";
  for (std::size_t k = 0; k < summary.phases.size(); ++k) {
    const auto& ph = summary.phases[k];
    std::cout << "  phase " << k << " " << ph.loss << "/" << ph.optimizer << "/" << ph.iterations
              << "  e_L2 " << format_error(ph.e_L2) << "  e_test " << format_error(ph.e_test) << '\n';
  }
  return 0;
}

int oracle_verb(int id, double K, const fs::path& out) {
  const ProblemSpec prob = registry(id);
  const FourierSeries A = to_fourier(prob.A), F = to_fourier(prob.F);
  const FourierSeries U = solve_truncated(A, F, prob.P, K);
  fs::create_directories(out);
  auto series = open_out(out / "oracle_U.txt");
  write_series(series, U);
  std::vector<double> Ks;
  for (int k = 1; k <= static_cast<int>(K); ++k) Ks.push_back(k);
  auto cond = open_out(out / "conditioning.csv");
  write_conditioning_csv(cond, conditioning_report(A, prob.P, Ks));
  const FourierSeries exact = to_fourier(*prob.exact_U);
  const SpaceTag l2{SpaceFamily::H, 0.0};
  const double err = norm(U - exact, l2) / norm(exact, l2);
  std::cout << prob.name << "  K " << K << "  modes " << ball_modes(prob.P.n(), K).size()
            << "  relative L2 distance to exact U " << err << '\n';
  return 0;
}

int verify_verb(int instances, std::uint64_t seed, const fs::path& out) {
  const auto checks = run_invariant_suite(instances, seed);
  bool ok = true;
  std::ostringstream report;
  report << "invariant,instances,failures,worst\n";
  for (const auto& c : checks) {
    std::cout << (c.passed() ? "PASS " : "FAIL ") << c.name << "  (" << c.instances << " instances, worst "
              << c.worst << ")\n";
    report << c.name << ',' << c.instances << ',' << c.failures << ',' << c.worst << '\n';
    ok = ok && c.passed();
  }
  if (!out.empty()) {
    fs::create_directories(out);
    auto os = open_out(out / "verify.csv");
    os << report.str();
  }
  return ok ? 0 : 1;
}

int diophantine_verb(std::optional<int> example, const std::vector<double>& columns, int K, double tau,
                     const fs::path& out) {
  const ProjectionMatrix P = example ? registry(*example).P : ProjectionMatrix::row(columns);
  std::ostringstream csv;
  csv << "K,min_norm_Pk,k,diophantine_constant\n";
  csv.precision(17);
  for (int r = 1; r <= K; ++r) {
    const SmallFrequency s = min_projected_magnitude(P, r);
    csv << r << ',' << s.magnitude << ",\"";
    for (std::size_t i = 0; i < s.k.size(); ++i) csv << (i ? " " : "") << s.k[i];
    csv << "\"," << estimate_diophantine_constant(P, r, tau) << '\n';
  }
  const IndependenceCertificate cert = certify_rational_independence(P, K);
  std::cout << csv.str();
  std::cout << "certificate: box " << cert.K << "  min |Pk| " << cert.min_magnitude << "  "
            << (cert.independent ? "no integer relation found" : "integer relation found") << '\n';
  if (!out.empty()) {
    fs::create_directories(out);
    auto os = open_out(out / "diophantine.csv");
    os << csv.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor neural network solver for quasiperiodic elliptic problems"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "train on an example and write metrics, summary, checkpoint and plot data");
  std::optional<int> run_example;
  std::string run_config;
  std::optional<std::uint64_t> run_seed;
  std::string run_out = "out";
  bool no_residual = false;
  int plot_samples = 2000, progress = 0;
  run->add_option("--example,-e", run_example, "example id 1-8")->check(CLI::Range(1, kExampleCount));
  run->add_option("--config,-c", run_config, "config file")->check(CLI::ExistingFile);
  run->add_option("--seed", run_seed, "overrides the configured seed");
  run->add_option("--out,-o", run_out, "output directory");
  run->add_flag("--no-residual", no_residual, "skip the residual phase of the default schedule");
  run->add_option("--plot-samples", plot_samples, "samples per plot axis (d = 1)");
  run->add_option("--progress", progress, "print every N steps to stderr");

  auto* oracle = app.add_subcommand("oracle", "spectral Galerkin solve and conditioning report");
  int oracle_example = 2;
  double oracle_K = 8;
  std::string oracle_out = "out", oracle_config;
  std::uint64_t oracle_seed = 0;
  oracle->add_option("--example,-e", oracle_example)->check(CLI::Range(1, kExampleCount));
  oracle->add_option("--K", oracle_K, "ball radius");
  oracle->add_option("--out,-o", oracle_out);
  oracle->add_option("--config,-c", oracle_config, "config file (problem key)")->check(CLI::ExistingFile);
  oracle->add_option("--seed", oracle_seed, "unused, accepted for uniformity");

  auto* verify = app.add_subcommand("verify", "seeded invariant suite");
  int instances = 100;
  std::uint64_t verify_seed = 2024;
  std::string verify_out, verify_config;
  verify->add_option("--instances", instances);
  verify->add_option("--seed", verify_seed);
  verify->add_option("--out,-o", verify_out);
  verify->add_option("--config,-c", verify_config, "unused, accepted for uniformity");

  auto* dio = app.add_subcommand("diophantine", "small projected frequencies and Diophantine estimates");
  std::optional<int> dio_example;
  std::vector<double> columns{1.0, std::sqrt(2.0)};
  int dio_K = 20;
  double tau = 1.0;
  std::string dio_out, dio_config;
  std::uint64_t dio_seed = 0;
  dio->add_option("--example,-e", dio_example)->check(CLI::Range(1, kExampleCount));
  dio->add_option("--columns", columns, "columns of a 1 x n projection")->delimiter(',');
  dio->add_option("--K", dio_K, "largest box radius");
  dio->add_option("--tau", tau);
  dio->add_option("--out,-o", dio_out);
  dio->add_option("--config,-c", dio_config, "unused, accepted for uniformity");
  dio->add_option("--seed", dio_seed, "unused, accepted for uniformity");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return run_verb(run_example, run_config, run_seed, run_out, no_residual, plot_samples, progress);
    if (*oracle) {
      if (!oracle_config.empty()) {
        const TrainConfig cfg = load_config(oracle_config, example_config(oracle_example));
        if (!cfg.problem.empty()) oracle_example = parse_example_id(cfg.problem);
      }
      return oracle_verb(oracle_example, oracle_K, oracle_out);
    }
    if (*verify) return verify_verb(instances, verify_seed, verify_out);
    if (*dio) return diophantine_verb(dio_example, columns, dio_K, tau, dio_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
