// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <deque>
#include <optional>
#include <functional>

namespace quasitnn {

/// Returns f(x) and writes the gradient into *grad when grad is non-null.
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam update of x in place.
void adam_step(AdamState& state, Eigen::VectorXd& x, const Eigen::VectorXd& grad, double lr);

struct LbfgsState {
  std::size_t history = 10;
  std::deque<Eigen::VectorXd> s;
  std::deque<Eigen::VectorXd> y;
  double armijo = 1e-4;
  double armijo_slack = 1e-10;  // |f| tolerance that switches to the derivative test
  int max_backtracks = 30;
  double curvature_eps = 1e-10;  // pairs need s.y > curvature_eps |s| |y|

  /// Value and gradient at the last accepted point, reused by the next step.
  /// Clear it whenever the objective changes.
  struct Evaluation {
    Eigen::VectorXd x;
    double f = 0.0;
    Eigen::VectorXd g;
  };
  std::optional<Evaluation> last;
};

struct LbfgsResult {
  double value = 0.0;      // objective after the step (or before, if rejected)
  bool accepted = false;
  int evaluations = 0;
};

/// Two-loop direction with Armijo backtracking from step lr. With an empty
/// history the direction is -grad scaled to lr * min(1, 1/|grad|_1). A
/// non-finite value or failed line search rejects the step and clears history.
LbfgsResult lbfgs_step(LbfgsState& state, Eigen::VectorXd& x, const Objective& f, double lr);

}  // namespace quasitnn
