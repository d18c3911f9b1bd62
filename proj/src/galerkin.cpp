// SPDX-License-Identifier: Apache-2.0
#include "quasitnn/galerkin.hpp"

#include <stdexcept>

namespace quasitnn {

GalerkinSystem assemble(const LossContext& ctx, const BasisBank& phi) {
  GalerkinSystem sys;
  sys.stiffness = Eigen::MatrixXd::Zero(phi.p, phi.p);
  for (int i = 0; i < ctx.P.d(); ++i) {
    const Side L{&ctx.A, &phi, OperatorKind::Gradient, i, nullptr};
    const Side R{&ctx.unit, &phi, OperatorKind::Gradient, i, nullptr};
    sys.stiffness += contract(L, R, ctx.P, ctx.q);
  }
  sys.stiffness = 0.5 * (sys.stiffness + sys.stiffness.transpose()).eval();
  const Side L{&ctx.unit, &phi, OperatorKind::Identity, 0, nullptr};
  const Side R{&ctx.F, &ctx.unit_basis, OperatorKind::Identity, 0, nullptr};
  sys.load = contract(L, R, ctx.P, ctx.q).col(0);
  return sys;
}

GalerkinSystem assemble(const TNNParams& tnn, const RankSum& A, const RankSum& F, const Quadrature1D& q,
                        const ProjectionMatrix& P) {
  if (A.dim != tnn.dim() || F.dim != tnn.dim() || P.n() != tnn.dim())
    throw std::invalid_argument("assemble: dimension mismatch");
  ProblemSpec prob{"", P, A, F, std::nullopt};
  return assemble(LossContext(prob, q), normalized_basis(tnn, q));
}

Eigen::VectorXd ridge_solve(const GalerkinSystem& sys, double lambda) {
  const Eigen::Index p = sys.stiffness.rows();
  if (sys.stiffness.cols() != p || sys.load.size() != p)
    throw std::invalid_argument("ridge_solve: dimension mismatch");
  if (lambda < 0.0) throw std::invalid_argument("ridge_solve: lambda must be non-negative");
  Eigen::MatrixXd M = sys.stiffness;
  M.diagonal().array() += lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) throw std::runtime_error("indefinite system");
  return llt.solve(sys.load);
}

}  // namespace quasitnn
