// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "quasitnn/losses.hpp"

#include <Eigen/Dense>

namespace quasitnn {

struct GalerkinSystem {
  Eigen::MatrixXd stiffness;  // a(phi_n, phi_m)
  Eigen::VectorXd load;       // (F, phi_m)
};

GalerkinSystem assemble(const LossContext& ctx, const BasisBank& phi);
GalerkinSystem assemble(const TNNParams& tnn, const RankSum& A, const RankSum& F, const Quadrature1D& q,
                        const ProjectionMatrix& P);

/// Solves (stiffness + lambda I) c = load by Cholesky; throws
/// std::runtime_error("indefinite system") when the factorization fails.
Eigen::VectorXd ridge_solve(const GalerkinSystem& sys, double lambda = 1e-5);

}  // namespace quasitnn
