// SPDX-License-Identifier: Apache-2.0
#include "quasitnn/experiments.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

namespace quasitnn {

namespace {

using std::numbers::pi;

// sum_i cos(2 pi y_i) + shift  and  sum_i sin(2 pi y_i)
RankSum cos_sum(int n, double shift) {
  RankSum A = RankSum::constant(n, shift);
  for (int i = 0; i < n; ++i) {
    std::vector<Factor1D> f(n);
    f[i] = Factor1D::cosine(1);
    A.add_term(1.0, std::move(f));
  }
  return A;
}

RankSum sin_sum(int n) {
  RankSum U(n);
  for (int i = 0; i < n; ++i) {
    std::vector<Factor1D> f(n);
    f[i] = Factor1D::sine(1);
    U.add_term(1.0, std::move(f));
  }
  return U;
}

ProjectionMatrix circle_columns(int count, double angle, double scale = 1.0) {
  Eigen::MatrixXd P(2, count);
  for (int i = 0; i < count; ++i) {
    P(0, i) = scale * std::cos(i * angle);
    P(1, i) = scale * std::sin(i * angle);
  }
  return ProjectionMatrix(P);
}

ProblemSpec build(int id, ProjectionMatrix P, double shift) {
  const int n = P.n();
  return make_problem("example" + std::to_string(id), std::move(P), cos_sum(n, shift), sin_sum(n));
}

PhaseConfig phase(LossKind loss, OptimizerKind opt, int iterations) {
  return {loss, opt, iterations, opt == OptimizerKind::Adam ? 0.003 : 1.0};
}

}  // namespace

ProblemSpec registry(int id) {
  switch (id) {
    case 1:
      return build(1, ProjectionMatrix::row({1.0, std::sqrt(2.0)}), 6.0);
    case 2:
      return build(2, ProjectionMatrix::row({1.0, pi}), 6.0);
    case 3: {
      Eigen::MatrixXd P(2, 4);
      P << 1.0, std::sqrt(2.0), 0.0, 0.0, 0.0, 0.0, 1.0, std::sqrt(3.0);
      return build(3, ProjectionMatrix(P), 12.0);
    }
    case 4:
      return build(4, ProjectionMatrix::row({1.0, std::sqrt(2.0), std::sqrt(3.0), std::sqrt(5.0), std::sqrt(7.0)}),
                   12.0);
    case 5: {
      std::vector<double> cols{1.0};
      for (int prime : {2, 3, 5, 7, 11, 13, 17, 19, 23}) cols.push_back(std::sqrt(static_cast<double>(prime)));
      return build(5, ProjectionMatrix::row(cols), 12.0);
    }
    case 6:
      return build(6, circle_columns(6, 1.0), 12.0);
    case 7: {
      const ProjectionMatrix P1 = circle_columns(6, 1.0);
      Eigen::MatrixXd P(2, 12);
      P << P1.entries(), pi * P1.entries();
      return build(7, ProjectionMatrix(P), 12.0);
    }
    case 8:
      return build(8, circle_columns(13, pi / 13.0), 12.0);
    default:
      throw std::out_of_range("unknown example id " + std::to_string(id) + " (expected 1-8)");
  }
}

int parse_example_id(const std::string& name) {
  std::string digits = name;
  for (const std::string prefix : {"example", "ex"})
    if (digits.rfind(prefix, 0) == 0) {
      digits = digits.substr(prefix.size());
      break;
    }
  std::size_t used = 0;
  int id = 0;
  try {
    id = std::stoi(digits, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != digits.size()) throw std::invalid_argument("unknown problem '" + name + "'");
  if (id < 1 || id > kExampleCount) throw std::out_of_range("unknown example id " + std::to_string(id));
  return id;
}

TrainConfig example_config(int id, bool with_residual) {
  if (id < 1 || id > kExampleCount) throw std::out_of_range("unknown example id " + std::to_string(id));
  TrainConfig cfg;
  cfg.problem = "example" + std::to_string(id);
  cfg.lbfgs_inner = 20;
  int lbfgs = 0, residual = 0;
  switch (id) {
    case 1:
    case 2:
      lbfgs = 500;
      residual = 500;
      break;
    case 3:
    case 4:
      lbfgs = 1000;
      residual = 3000;
      break;
    case 6:
      lbfgs = 1000;
      residual = 2000;
      break;
    default:
      lbfgs = 2000;
      break;
  }
  cfg.phases = {phase(LossKind::Ritz, OptimizerKind::Adam, 1000), phase(LossKind::Ritz, OptimizerKind::Lbfgs, lbfgs)};
  if (with_residual && residual > 0) cfg.phases.push_back(phase(LossKind::Residual, OptimizerKind::Lbfgs, residual));
  return cfg;
}

double exact_pullback(const ProblemSpec& prob, const std::vector<double>& x) {
  if (!prob.exact_U) throw std::invalid_argument("exact solution not available");
  if (static_cast<int>(x.size()) != prob.P.d()) throw std::invalid_argument("exact_pullback: wrong dimension");
  const Eigen::VectorXd y = prob.P.entries().transpose() * Eigen::Map<const Eigen::VectorXd>(x.data(), prob.P.d());
  std::vector<double> yy(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) yy[i] = y(i) - std::floor(y(i));
  return eval(*prob.exact_U, yy);
}

double relative_l2_error(const TNNParams& tnn, const ProblemSpec& prob, const Quadrature1D& q) {
  if (!prob.exact_U) throw std::invalid_argument("relative_l2_error: exact solution not available");
  return relative_l2_error(normalized_basis(tnn, q), tnn.c, *prob.exact_U, q, prob.P);
}

double test_point_error(const TNNParams& tnn, const ProblemSpec& prob, int count, std::uint64_t seed) {
  if (!prob.exact_U) throw std::invalid_argument("test_point_error: exact solution not available");
  if (count < 1) throw std::invalid_argument("test_point_error: count must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = tnn.dim();
  double num = 0.0, den = 0.0;
  std::vector<double> y(n);
  for (int k = 0; k < count; ++k) {
    for (auto& v : y) v = unit(rng);
    const double u = eval(*prob.exact_U, y);
    const double diff = eval_torus(tnn, y) - u;
    num += diff * diff;
    den += u * u;
  }
  return std::sqrt(num / den);
}

std::size_t emit_plot_data(const TNNParams& tnn, const ProblemSpec& prob, const PlotSpec& spec, std::ostream& os) {
  const int d = prob.P.d();
  if (d > 2) throw std::invalid_argument("emit_plot_data: only d = 1 or 2");
  if (static_cast<int>(spec.lo.size()) != d || static_cast<int>(spec.hi.size()) != d || spec.samples < 2)
    throw std::invalid_argument("emit_plot_data: axis spec does not match the dimension");
  const auto old = os.precision(17);
  os << (d == 1 ? "x1" : "x1,x2") << ",u_exact,u_approx,error\n";
  auto coord = [&](int axis, int k) {
    return spec.lo[axis] + (spec.hi[axis] - spec.lo[axis]) * k / (spec.samples - 1);
  };
  std::size_t rows = 0;
  const int outer = d == 1 ? 1 : spec.samples;
  for (int a = 0; a < outer; ++a) {
    for (int b = 0; b < spec.samples; ++b) {
      std::vector<double> x = d == 1 ? std::vector<double>{coord(0, b)} : std::vector<double>{coord(0, a), coord(1, b)};
      const double u = exact_pullback(prob, x);
      const double v = eval_pullback(tnn, prob.P, x);
      for (double xi : x) os << xi << ',';
      os << u << ',' << v << ',' << u - v << '\n';
      ++rows;
    }
  }
  os.precision(old);
  return rows;
}

ExperimentResult summarize(int example, const ProblemSpec& prob, const TrainConfig& cfg, const TrainResult& run,
                           double seconds, std::uint64_t test_seed) {
  ExperimentResult r;
  r.example = example;
  r.seconds = seconds;
  r.config = cfg;
  const Quadrature1D q = build_grid(cfg.n_sub, cfg.n_gauss);
  for (std::size_t k = 0; k < cfg.phases.size(); ++k) {
    const auto& ph = cfg.phases[k];
    PhaseReport rep;
    rep.loss = ph.loss == LossKind::Ritz ? "ritz" : "residual";
    rep.optimizer = ph.optimizer == OptimizerKind::Adam ? "adam" : "lbfgs";
    rep.iterations = ph.iterations;
    if (prob.exact_U && k < run.phase_models.size()) {
      rep.e_L2 = relative_l2_error(run.phase_models[k], prob, q);
      rep.e_test = test_point_error(run.phase_models[k], prob, 5000, test_seed);
    }
    r.phases.push_back(rep);
  }
  return r;
}

void write_summary_json(std::ostream& os, const ExperimentResult& r) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["example"] = r.example;
  j["seconds"] = r.seconds;
  j["checkpoint"] = r.checkpoint;
  nlohmann::json phases = nlohmann::json::array();
  for (const auto& p : r.phases) {
    nlohmann::json e{{"loss", p.loss}, {"optimizer", p.optimizer}, {"iterations", p.iterations}};
    e["e_L2"] = p.e_L2 ? nlohmann::json(*p.e_L2) : nlohmann::json(nullptr);
    e["e_test"] = p.e_test ? nlohmann::json(*p.e_test) : nlohmann::json(nullptr);
    phases.push_back(e);
  }
  j["phases"] = phases;
  const auto& c = r.config;
  j["config"] = {{"problem", c.problem},
                 {"solve_every", c.solve_every},
                 {"ridge_lambda", c.ridge_lambda},
                 {"seed", c.seed},
                 {"quadrature", {{"n_sub", c.n_sub}, {"n_gauss", c.n_gauss}}},
                 {"tnn", {{"p", c.tnn.p}, {"width", c.tnn.width}, {"depth", c.tnn.depth}, {"freq_max", c.tnn.freq_max}}},
                 {"lbfgs_inner", c.lbfgs_inner}};
  os << j.dump(2) << '\n';
}

}  // namespace quasitnn
