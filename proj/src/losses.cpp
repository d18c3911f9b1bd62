// SPDX-License-Identifier: Apache-2.0
#include "quasitnn/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace quasitnn {

ProblemSpec make_problem(std::string name, ProjectionMatrix P, RankSum A, RankSum U) {
  RankSum F = build_manufactured_source(A, U, P);
  double constant = 0.0, spread = 0.0;
  for (const auto& t : A.terms) {
    bool is_constant = true;
    for (const auto& f : t.factors) is_constant = is_constant && f.kind == FactorKind::Constant;
    if (is_constant)
      constant += t.coeff;
    else
      spread += std::abs(t.coeff);
  }
  ProblemSpec prob{std::move(name), std::move(P), std::move(A), std::move(F), std::move(U)};
  prob.alpha0 = constant - spread;
  prob.alpha1 = constant + spread;
  prob.elliptic = prob.alpha0 > 0.0;
  return prob;
}

LossContext::LossContext(const ProblemSpec& prob, const Quadrature1D& quad)
    : P(prob.P),
      q(quad),
      A(FieldBank::from_rank_sum(prob.A, quad)),
      F(FieldBank::from_rank_sum(prob.F, quad)),
      unit(FieldBank::unit(prob.P.n(), quad)),
      unit_basis(BasisBank::unit(prob.P.n(), quad)) {
  const Side s{&F, &unit_basis, OperatorKind::Identity, 0, nullptr};
  f_norm2 = contract(s, s, P, q)(0, 0);
}

double ritz_loss(const LossContext& ctx, const BasisBank& phi, const Eigen::VectorXd& c,
                 BasisSamples* grad) {
  const Eigen::MatrixXd kbar = 0.5 * c * c.transpose();
  const Eigen::MatrixXd bbar = -c.transpose();
  double energy = 0.0;
  for (int i = 0; i < ctx.P.d(); ++i) {
    const Side L{&ctx.A, &phi, OperatorKind::Gradient, i, grad};
    const Side R{&ctx.unit, &phi, OperatorKind::Gradient, i, grad};
    energy += c.dot(contract(L, R, ctx.P, ctx.q, grad ? &kbar : nullptr) * c);
  }
  const Side L{&ctx.F, &ctx.unit_basis, OperatorKind::Identity, 0, nullptr};
  const Side R{&ctx.unit, &phi, OperatorKind::Identity, 0, grad};
  const double load = (contract(L, R, ctx.P, ctx.q, grad ? &bbar : nullptr) * c)(0);
  return 0.5 * energy - load;
}

double residual_loss(const LossContext& ctx, const BasisBank& phi, const Eigen::VectorXd& c,
                     BasisSamples* grad) {
  const Eigen::MatrixXd hbar = c * c.transpose();
  const Eigen::MatrixXd fbar = 2.0 * c.transpose();
  double quad = 0.0, cross = 0.0;
  for (int i = 0; i < ctx.P.d(); ++i) {
    for (int k = 0; k < ctx.P.d(); ++k) {
      const Side L{&ctx.A, &phi, OperatorKind::DivFlux, i, grad};
      const Side R{&ctx.A, &phi, OperatorKind::DivFlux, k, grad};
      quad += c.dot(contract(L, R, ctx.P, ctx.q, grad ? &hbar : nullptr) * c);
    }
    const Side L{&ctx.F, &ctx.unit_basis, OperatorKind::Identity, 0, nullptr};
    const Side R{&ctx.A, &phi, OperatorKind::DivFlux, i, grad};
    cross += (contract(L, R, ctx.P, ctx.q, grad ? &fbar : nullptr) * c)(0);
  }
  return ctx.f_norm2 + 2.0 * cross + quad;
}

double loss(LossKind kind, const LossContext& ctx, const BasisBank& phi, const Eigen::VectorXd& c,
            BasisSamples* grad) {
  return kind == LossKind::Ritz ? ritz_loss(ctx, phi, c, grad) : residual_loss(ctx, phi, c, grad);
}

BasisBank basis_from_rank_sum(const RankSum& V, const Quadrature1D& q, Eigen::VectorXd& coeffs) {
  BasisBank b;
  b.dim = V.dim;
  b.p = static_cast<int>(V.rank());
  const auto N = static_cast<Eigen::Index>(q.size());
  coeffs.resize(b.p);
  for (int l = 0; l < V.dim; ++l)
    b.samples.push_back({Eigen::MatrixXd(b.p, N), Eigen::MatrixXd(b.p, N), Eigen::MatrixXd(b.p, N)});
  for (int j = 0; j < b.p; ++j) {
    const RankOneTerm& t = V.terms[j];
    coeffs(j) = t.coeff;
    for (int l = 0; l < V.dim; ++l)
      for (int r = 0; r < 3; ++r) {
        const auto s = t.factors[l].sample(q, r);
        b.samples[l][r].row(j) = Eigen::Map<const Eigen::RowVectorXd>(s.data(), N);
      }
  }
  return b;
}

double ritz_loss(const TNNParams& tnn, const ProblemSpec& prob, const Quadrature1D& q) {
  const LossContext ctx(prob, q);
  return ritz_loss(ctx, normalized_basis(tnn, q), tnn.c);
}

double residual_loss(const TNNParams& tnn, const ProblemSpec& prob, const Quadrature1D& q) {
  const LossContext ctx(prob, q);
  return residual_loss(ctx, normalized_basis(tnn, q), tnn.c);
}

double ritz_loss(const RankSum& V, const ProblemSpec& prob, const Quadrature1D& q) {
  if (V.closed_form())
    return 0.5 * energy_inner_product(prob.A, V, V, prob.P, q) - l2_inner_product(prob.F, V, q);
  Eigen::VectorXd c;
  const BasisBank b = basis_from_rank_sum(V, q, c);
  return ritz_loss(LossContext(prob, q), b, c);
}

double residual_loss(const RankSum& V, const ProblemSpec& prob, const Quadrature1D& q) {
  if (!V.closed_form()) {
    Eigen::VectorXd c;
    const BasisBank b = basis_from_rank_sum(V, q, c);
    return residual_loss(LossContext(prob, q), b, c);
  }
  const auto grad_v = directional_gradient(V, prob.P);
  RankSum R = prob.F;
  for (int i = 0; i < prob.P.d(); ++i)
    R = R + directional_gradient(multiply(prob.A, grad_v[i]), prob.P)[i];
  const FourierSeries coeffs = to_fourier(simplify(R));
  double sum = 0.0;
  for (const auto& [k, v] : coeffs.coeffs) sum += std::norm(v);
  return sum;
}

Eigen::VectorXd loss_gradients(const TNNParams& tnn, const LossContext& ctx, LossKind kind, double* value) {
  Eigen::VectorXd g;
  const double v = value_and_gradient(
      tnn, ctx.q, [&](const BasisBank& b, BasisSamples* gb) { return loss(kind, ctx, b, tnn.c, gb); }, &g);
  if (value != nullptr) *value = v;
  return g;
}

Eigen::VectorXd loss_gradients(const TNNParams& tnn, const ProblemSpec& prob, LossKind kind,
                               const Quadrature1D& q, double* value) {
  return loss_gradients(tnn, LossContext(prob, q), kind, value);
}

}  // namespace quasitnn
