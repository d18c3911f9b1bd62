// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "quasitnn/galerkin.hpp"
#include "quasitnn/losses.hpp"
#include "quasitnn/optimizers.hpp"
#include "quasitnn/problem.hpp"
#include "quasitnn/tnn_model.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace quasitnn {

enum class OptimizerKind { Adam, Lbfgs };

struct PhaseConfig {
  LossKind loss = LossKind::Ritz;
  OptimizerKind optimizer = OptimizerKind::Adam;
  int iterations = 1;
  double lr = 0.003;
};

struct TrainConfig {
  std::string problem;
  std::vector<PhaseConfig> phases;
  int solve_every = 1;
  double ridge_lambda = 1e-5;
  std::uint64_t seed = 0;
  int n_sub = 100;
  int n_gauss = 4;
  TNNShape tnn;
  int lbfgs_inner = 1;  // L-BFGS steps per outer step
};

/// Throws std::invalid_argument on an empty phase list or out-of-range values.
void validate(const TrainConfig& cfg);

struct HistoryRow {
  long step = 0;
  int phase = 0;
  double loss = 0.0;
  std::optional<double> e_L2;
  double seconds = 0.0;
};

struct TrainResult {
  TNNParams tnn;
  std::vector<HistoryRow> history;
  std::vector<TNNParams> phase_models;            // after each phase, c re-solved
  std::vector<std::optional<double>> phase_e_L2;
};

using StepCallback = std::function<void(const HistoryRow&)>;

/// Alternates ridge c-solves with optimizer steps on the network weights,
/// phase by phase; the returned model is re-solved and normalized.
TrainResult run_algorithm_1(const ProblemSpec& prob, const TrainConfig& cfg,
                            const StepCallback& on_step = nullptr);
/// Same loop from a given starting model.
TrainResult run_algorithm_1(const ProblemSpec& prob, const TrainConfig& cfg, TNNParams start,
                            const StepCallback& on_step = nullptr);

/// Ridge solve for c on the current network, followed by normalize().
TNNParams resolve_coefficients(const TNNParams& tnn, const LossContext& ctx, double lambda);

/// ||U - Psi_hat|| / ||U|| on grid q for Psi = sum_j c_j phi_j. Tensor-grid
/// summation for n <= 2, rank-one contraction otherwise.
double relative_l2_error(const BasisBank& phi, const Eigen::VectorXd& c, const RankSum& U,
                         const Quadrature1D& q, const ProjectionMatrix& P);

/// CSV with header step,phase,loss,e_L2,seconds.
void write_history_csv(std::ostream& os, const std::vector<HistoryRow>& history);

}  // namespace quasitnn
