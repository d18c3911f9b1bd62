// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "quasitnn/contraction.hpp"
#include "quasitnn/frequency_lattice.hpp"
#include "quasitnn/quadrature.hpp"
#include "quasitnn/rank_one.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace quasitnn {

/// One univariate sine MLP y -> (phi_1(y), ..., phi_p(y)). The first layer has
/// fixed input weights 2 pi m_r, so every output has period one.
struct SubnetworkParams {
  Eigen::VectorXi freqs;             // m_r >= 1, not trained
  Eigen::VectorXd b1;                // first-layer biases
  std::vector<Eigen::MatrixXd> W;    // hidden W x W weights (depth - 1 of them)
  std::vector<Eigen::VectorXd> b;
  Eigen::MatrixXd Wo;                // p x W
  Eigen::VectorXd bo;
};

struct TNNShape {
  int p = 20;
  int width = 50;
  int depth = 3;  // sine layers, the first one included
  int freq_max = 25;
};

struct TNNParams {
  int d = 1;  // physical dimension, carried for checkpoints
  int p = 0;
  std::vector<SubnetworkParams> subnets;
  Eigen::VectorXd c;
  Eigen::MatrixXd norms;  // n x p, L2 norms of the raw factors
  Eigen::MatrixXd means;  // n x p, integrals of the normalized factors

  int dim() const { return static_cast<int>(subnets.size()); }
};

/// Seeded initialisation: m_r = ((r-1) mod freq_max) + 1, biases of the first
/// layer uniform in [0, 2 pi), other weights uniform in +-1/sqrt(fan-in), c = 0.
TNNParams init_tnn(int n, const TNNShape& shape, std::uint64_t seed, int d = 1);

/// Factor values and first/second y-derivatives, each p x (number of points).
struct FactorValues {
  Eigen::MatrixXd val;
  Eigen::MatrixXd d1;
  Eigen::MatrixXd d2;
};

FactorValues forward_factors(const SubnetworkParams& net, const Quadrature1D& q);
FactorValues forward_factors_at(const SubnetworkParams& net, const Eigen::VectorXd& y);

/// Recomputes norms and means. Throws std::domain_error naming (i, j) when a
/// factor norm is <= 1e-13.
TNNParams normalize(const TNNParams& tnn, const Quadrature1D& q);

/// Normalized factor samples phi / ||phi||, orders 0..2, for the current weights.
BasisBank normalized_basis(const TNNParams& tnn, const Quadrature1D& q);

/// Psi - int Psi as a sampled rank sum of rank p + 1 (requires normalize()).
RankSum zero_mean_correct(const TNNParams& tnn, const Quadrature1D& q);

/// Zero-mean corrected TNN at a torus point (requires normalize()).
double eval_torus(const TNNParams& tnn, const std::vector<double>& y);
/// Phi(x) = Psi_hat(P^T x mod 1).
double eval_pullback(const TNNParams& tnn, const ProjectionMatrix& P, const std::vector<double>& x);

/// Trainable parameters, per subnet: b1, (W, b) per hidden layer, Wo, bo.
Eigen::Index parameter_count(const TNNParams& tnn);
Eigen::VectorXd flatten(const TNNParams& tnn);
void unflatten(TNNParams& tnn, const Eigen::VectorXd& theta);

/// A scalar function of the normalized basis samples; fills grad (pre-sized,
/// zeroed) with its partial derivatives when grad is non-null.
using BasisLoss = std::function<double(const BasisBank&, BasisSamples*)>;

/// Evaluates loss on the normalized basis of tnn and, when grad is non-null,
/// back-propagates through normalization and every subnet into a flat gradient.
double value_and_gradient(const TNNParams& tnn, const Quadrature1D& q, const BasisLoss& loss,
                          Eigen::VectorXd* grad);

/// Text checkpoint with hexadecimal floats (bit-exact round trip).
void save_checkpoint(std::ostream& os, const TNNParams& tnn);
TNNParams load_checkpoint(std::istream& is);

}  // namespace quasitnn
