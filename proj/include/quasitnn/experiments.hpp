// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "quasitnn/problem.hpp"
#include "quasitnn/training.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace quasitnn {

constexpr int kExampleCount = 8;

/// Examples 1-8. Throws std::out_of_range for an unknown id.
ProblemSpec registry(int id);
/// Accepts "3", "example3" or "ex3".
int parse_example_id(const std::string& name);

/// Phase schedules with p = 20, W = 50, depth 3, Adam lr 0.003, L-BFGS lr 1
/// and 20 L-BFGS iterations per outer step.
/// with_residual appends the residual phase for the examples that report one.
TrainConfig example_config(int id, bool with_residual = true);

/// u(x) = U(P^T x mod 1) for the exact parent U.
double exact_pullback(const ProblemSpec& prob, const std::vector<double>& x);

double relative_l2_error(const TNNParams& tnn, const ProblemSpec& prob, const Quadrature1D& q);
/// Uniform torus points, sqrt(sum (Psi_hat - U)^2) / sqrt(sum U^2).
double test_point_error(const TNNParams& tnn, const ProblemSpec& prob, int count = 5000,
                        std::uint64_t seed = 0);

/// Line (d = 1) or square grid (d = 2) in physical space.
struct PlotSpec {
  std::vector<double> lo;
  std::vector<double> hi;
  int samples = 2000;  // per axis
};
/// CSV columns x1[,x2],u_exact,u_approx,error; returns the number of rows.
std::size_t emit_plot_data(const TNNParams& tnn, const ProblemSpec& prob, const PlotSpec& spec,
                           std::ostream& os);

struct PhaseReport {
  std::string loss;
  std::string optimizer;
  int iterations = 0;
  std::optional<double> e_L2;
  std::optional<double> e_test;
};

struct ExperimentResult {
  int example = 0;
  std::vector<PhaseReport> phases;
  double seconds = 0.0;
  TrainConfig config;
  std::string checkpoint;
};

ExperimentResult summarize(int example, const ProblemSpec& prob, const TrainConfig& cfg,
                           const TrainResult& run, double seconds, std::uint64_t test_seed);
/// JSON object with "format_version": 1.
void write_summary_json(std::ostream& os, const ExperimentResult& r);

}  // namespace quasitnn
