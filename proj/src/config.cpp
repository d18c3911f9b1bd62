// SPDX-License-Identifier: Apache-2.0
#include "quasitnn/config.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <regex>
#include <stdexcept>

namespace quasitnn {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

long to_long(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long out = 0;
  try {
    out = std::stol(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size()) throw std::invalid_argument("config: " + key + " expects an integer, got '" + v + "'");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size()) throw std::invalid_argument("config: " + key + " expects a number, got '" + v + "'");
  return out;
}

}  // namespace

TrainConfig parse_config(std::istream& is, TrainConfig cfg) {
  static const std::regex phase_key(R"(phases\[(\d+)\]\.(loss|optimizer|iterations|lr))");
  std::string line;
  int lineno = 0;
  bool phases_reset = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    std::smatch m;
    if (std::regex_match(key, m, phase_key)) {
      if (!phases_reset) {
        cfg.phases.clear();
        phases_reset = true;
      }
      const auto idx = static_cast<std::size_t>(std::stoul(m[1].str()));
      if (idx > 64) throw std::invalid_argument("config: phase index too large");
      if (cfg.phases.size() <= idx) cfg.phases.resize(idx + 1);
      PhaseConfig& ph = cfg.phases[idx];
      const std::string field = m[2].str();
      if (field == "loss") {
        if (value == "ritz")
          ph.loss = LossKind::Ritz;
        else if (value == "residual")
          ph.loss = LossKind::Residual;
        else
          throw std::invalid_argument("config: " + key + " must be ritz or residual");
      } else if (field == "optimizer") {
        if (value == "adam")
          ph.optimizer = OptimizerKind::Adam;
        else if (value == "lbfgs")
          ph.optimizer = OptimizerKind::Lbfgs;
        else
          throw std::invalid_argument("config: " + key + " must be adam or lbfgs");
      } else if (field == "iterations") {
        ph.iterations = static_cast<int>(to_long(key, value));
      } else {
        ph.lr = to_double(key, value);
      }
    } else if (key == "problem") {
      cfg.problem = value;
    } else if (key == "solve_every") {
      cfg.solve_every = static_cast<int>(to_long(key, value));
    } else if (key == "ridge_lambda") {
      cfg.ridge_lambda = to_double(key, value);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(to_long(key, value));
    } else if (key == "quadrature.n_sub") {
      cfg.n_sub = static_cast<int>(to_long(key, value));
    } else if (key == "quadrature.n_gauss") {
      cfg.n_gauss = static_cast<int>(to_long(key, value));
    } else if (key == "tnn.p") {
      cfg.tnn.p = static_cast<int>(to_long(key, value));
    } else if (key == "tnn.width") {
      cfg.tnn.width = static_cast<int>(to_long(key, value));
    } else if (key == "tnn.depth") {
      cfg.tnn.depth = static_cast<int>(to_long(key, value));
    } else if (key == "tnn.freq_max") {
      cfg.tnn.freq_max = static_cast<int>(to_long(key, value));
    } else if (key == "lbfgs.inner") {
      cfg.lbfgs_inner = static_cast<int>(to_long(key, value));
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  validate(cfg);
  return cfg;
}

TrainConfig load_config(const std::string& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  return parse_config(in, std::move(base));
}

void write_config(std::ostream& os, const TrainConfig& cfg) {
  const auto old = os.precision(17);
  if (!cfg.problem.empty()) os << "problem = " << cfg.problem << '\n';
  for (std::size_t k = 0; k < cfg.phases.size(); ++k) {
    const auto& ph = cfg.phases[k];
    const std::string pre = "phases[" + std::to_string(k) + "].";
    os << pre << "loss = " << (ph.loss == LossKind::Ritz ? "ritz" : "residual") << '\n';
    os << pre << "optimizer = " << (ph.optimizer == OptimizerKind::Adam ? "adam" : "lbfgs") << '\n';
    os << pre << "iterations = " << ph.iterations << '\n';
    os << pre << "lr = " << ph.lr << '\n';
  }
  os << "solve_every = " << cfg.solve_every << '\n'
     << "ridge_lambda = " << cfg.ridge_lambda << '\n'
     << "seed = " << cfg.seed << '\n'
     << "quadrature.n_sub = " << cfg.n_sub << '\n'
     << "quadrature.n_gauss = " << cfg.n_gauss << '\n'
     << "tnn.p = " << cfg.tnn.p << '\n'
     << "tnn.width = " << cfg.tnn.width << '\n'
     << "tnn.depth = " << cfg.tnn.depth << '\n'
     << "tnn.freq_max = " << cfg.tnn.freq_max << '\n'
     << "lbfgs.inner = " << cfg.lbfgs_inner << '\n';
  os.precision(old);
}

}  // namespace quasitnn
