// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "quasitnn/contraction.hpp"
#include "quasitnn/problem.hpp"
#include "quasitnn/tnn_model.hpp"

#include <Eigen/Dense>

namespace quasitnn {

enum class LossKind { Ritz, Residual };

/// Grid samples of the problem data, shared by every loss evaluation.
struct LossContext {
  LossContext(const ProblemSpec& prob, const Quadrature1D& q);

  ProjectionMatrix P;
  Quadrature1D q;
  FieldBank A;
  FieldBank F;
  FieldBank unit;
  BasisBank unit_basis;
  double f_norm2 = 0.0;  // ||F||^2 on the grid
};

/// 1/2 sum_i <A Y_i Psi, Y_i Psi> - <F, Psi> for Psi = sum_j c_j phi_j.
double ritz_loss(const LossContext& ctx, const BasisBank& phi, const Eigen::VectorXd& c,
                 BasisSamples* grad = nullptr);
/// ||F + div_P(A grad_P Psi)||^2 for Psi = sum_j c_j phi_j.
double residual_loss(const LossContext& ctx, const BasisBank& phi, const Eigen::VectorXd& c,
                     BasisSamples* grad = nullptr);
double loss(LossKind kind, const LossContext& ctx, const BasisBank& phi, const Eigen::VectorXd& c,
            BasisSamples* grad = nullptr);

/// The terms of a rank sum as basis functions (orders 0..2) and their coefficients.
/// Closed-form and sampled factors are both accepted.
BasisBank basis_from_rank_sum(const RankSum& V, const Quadrature1D& q, Eigen::VectorXd& coeffs);

double ritz_loss(const TNNParams& tnn, const ProblemSpec& prob, const Quadrature1D& q);
double residual_loss(const TNNParams& tnn, const ProblemSpec& prob, const Quadrature1D& q);
/// Losses of an arbitrary rank sum V. The residual of a closed-form V is formed
/// symbolically and measured by Parseval, so exact cancellation is preserved.
double ritz_loss(const RankSum& V, const ProblemSpec& prob, const Quadrature1D& q);
double residual_loss(const RankSum& V, const ProblemSpec& prob, const Quadrature1D& q);

/// Gradient of the selected loss over the flattened trainable parameters with c fixed.
Eigen::VectorXd loss_gradients(const TNNParams& tnn, const ProblemSpec& prob, LossKind kind,
                               const Quadrature1D& q, double* value = nullptr);
Eigen::VectorXd loss_gradients(const TNNParams& tnn, const LossContext& ctx, LossKind kind,
                               double* value = nullptr);

}  // namespace quasitnn
