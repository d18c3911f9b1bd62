// SPDX-License-Identifier: Apache-2.0
#include "quasitnn/training.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace quasitnn {

void validate(const TrainConfig& cfg) {
  if (cfg.phases.empty()) throw std::invalid_argument("config: at least one phase is required");
  for (std::size_t k = 0; k < cfg.phases.size(); ++k) {
    if (cfg.phases[k].iterations < 1)
      throw std::invalid_argument("config: phases[" + std::to_string(k) + "].iterations must be >= 1");
    if (!(cfg.phases[k].lr > 0.0))
      throw std::invalid_argument("config: phases[" + std::to_string(k) + "].lr must be > 0");
  }
  if (cfg.solve_every < 1) throw std::invalid_argument("config: solve_every must be >= 1");
  if (cfg.ridge_lambda < 0.0) throw std::invalid_argument("config: ridge_lambda must be >= 0");
  if (cfg.lbfgs_inner < 1) throw std::invalid_argument("config: lbfgs.inner must be >= 1");
}

namespace {

// Psi_hat and U sampled on the tensor grid (n <= 2), as flat arrays.
Eigen::ArrayXXd tensor_samples(const std::vector<Eigen::MatrixXd>& factors, const Eigen::VectorXd& c) {
  if (factors.size() == 1) return (c.transpose() * factors[0]).array();
  return (factors[0].transpose() * c.asDiagonal() * factors[1]).array();
}

double dense_error(const BasisBank& phi, const Eigen::VectorXd& c, const RankSum& U, const Quadrature1D& q) {
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(q.weights.data(), q.size());
  std::vector<Eigen::MatrixXd> fac;
  double mean = 0.0;
  for (int j = 0; j < phi.p; ++j) {
    double mu = c(j);
    for (int i = 0; i < phi.dim; ++i) mu *= phi.samples[i][0].row(j).dot(w);
    mean += mu;
  }
  for (int i = 0; i < phi.dim; ++i) fac.push_back(phi.samples[i][0]);
  Eigen::VectorXd cu;
  const BasisBank ub = basis_from_rank_sum(U, q, cu);
  std::vector<Eigen::MatrixXd> ufac;
  for (int i = 0; i < ub.dim; ++i) ufac.push_back(ub.samples[i][0]);
  const Eigen::ArrayXXd psi = tensor_samples(fac, c) - mean;
  const Eigen::ArrayXXd u = tensor_samples(ufac, cu);
  Eigen::ArrayXXd W;
  if (phi.dim == 1)
    W = w.transpose().array();
  else
    W = (w * w.transpose()).array();
  const double num = (W * (u - psi).square()).sum();
  const double den = (W * u.square()).sum();
  return std::sqrt(num / den);
}

double contracted_error(const BasisBank& phi, const Eigen::VectorXd& c, const RankSum& U,
                        const Quadrature1D& q, const ProjectionMatrix& P) {
  const int n = phi.dim;
  const FieldBank fu = FieldBank::from_rank_sum(U, q);
  const FieldBank unit = FieldBank::unit(n, q);
  const BasisBank ub = BasisBank::unit(n, q);
  const Side su{&fu, &ub, OperatorKind::Identity, 0, nullptr};
  const Side sp{&unit, &phi, OperatorKind::Identity, 0, nullptr};
  const Side s1{&unit, &ub, OperatorKind::Identity, 0, nullptr};
  const double uu = contract(su, su, P, q)(0, 0);
  const double up = (contract(su, sp, P, q) * c)(0);
  const double pp = c.dot(contract(sp, sp, P, q) * c);
  const double mean_u = contract(su, s1, P, q)(0, 0);
  const double mean_p = (contract(s1, sp, P, q) * c)(0);
  const double num = uu - 2.0 * (up - mean_p * mean_u) + pp - mean_p * mean_p;
  return std::sqrt(std::max(num, 0.0) / uu);
}

}  // namespace

double relative_l2_error(const BasisBank& phi, const Eigen::VectorXd& c, const RankSum& U,
                         const Quadrature1D& q, const ProjectionMatrix& P) {
  if (U.dim != phi.dim || c.size() != phi.p) throw std::invalid_argument("relative_l2_error: dimension mismatch");
  if (phi.dim <= 2) return dense_error(phi, c, U, q);
  return contracted_error(phi, c, U, q, P);
}

TNNParams resolve_coefficients(const TNNParams& tnn, const LossContext& ctx, double lambda) {
  TNNParams out = tnn;
  out.c = ridge_solve(assemble(ctx, normalized_basis(tnn, ctx.q)), lambda);
  return normalize(out, ctx.q);
}

TrainResult run_algorithm_1(const ProblemSpec& prob, const TrainConfig& cfg, const StepCallback& on_step) {
  return run_algorithm_1(prob, cfg, init_tnn(prob.P.n(), cfg.tnn, cfg.seed, prob.P.d()), on_step);
}

TrainResult run_algorithm_1(const ProblemSpec& prob, const TrainConfig& cfg, TNNParams tnn,
                            const StepCallback& on_step) {
  validate(cfg);
  const Quadrature1D q = build_grid(cfg.n_sub, cfg.n_gauss);
  const LossContext ctx(prob, q);
  const auto start = std::chrono::steady_clock::now();
  TrainResult result;
  long step = 0;
  Eigen::VectorXd theta = flatten(tnn);

  for (std::size_t ph = 0; ph < cfg.phases.size(); ++ph) {
    const PhaseConfig& phase = cfg.phases[ph];
    AdamState adam;
    LbfgsState lbfgs;
    for (int it = 0; it < phase.iterations; ++it, ++step) {
      const BasisBank basis = normalized_basis(tnn, q);
      if (step % cfg.solve_every == 0) tnn.c = ridge_solve(assemble(ctx, basis), cfg.ridge_lambda);

      HistoryRow row;
      row.step = step;
      row.phase = static_cast<int>(ph);
      if (prob.exact_U) row.e_L2 = relative_l2_error(basis, tnn.c, *prob.exact_U, q, prob.P);

      const Eigen::VectorXd c = tnn.c;
      Objective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
        TNNParams trial = tnn;
        unflatten(trial, x);
        return value_and_gradient(
            trial, q, [&](const BasisBank& b, BasisSamples* gb) { return loss(phase.loss, ctx, b, c, gb); }, g);
      };
      if (phase.optimizer == OptimizerKind::Adam) {
        Eigen::VectorXd g;
        row.loss = f(theta, &g);
        if (std::isfinite(row.loss) && g.allFinite()) adam_step(adam, theta, g, phase.lr);
      } else {
        lbfgs.last.reset();
        for (int inner = 0; inner < cfg.lbfgs_inner; ++inner) {
          const LbfgsResult r = lbfgs_step(lbfgs, theta, f, phase.lr);
          if (inner == 0) row.loss = r.value;
        }
      }
      if (!std::isfinite(row.loss))
        throw std::runtime_error("non-finite " + std::string(phase.loss == LossKind::Ritz ? "ritz" : "residual") +
                                 " loss at step " + std::to_string(step));
      unflatten(tnn, theta);
      row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      result.history.push_back(row);
      if (on_step) on_step(row);
    }
    const TNNParams solved = resolve_coefficients(tnn, ctx, cfg.ridge_lambda);
    std::optional<double> err;
    if (prob.exact_U) err = relative_l2_error(normalized_basis(solved, q), solved.c, *prob.exact_U, q, prob.P);
    result.phase_e_L2.push_back(err);
    result.phase_models.push_back(solved);
  }
  result.tnn = result.phase_models.back();
  return result;
}

void write_history_csv(std::ostream& os, const std::vector<HistoryRow>& history) {
  os << "step,phase,loss,e_L2,seconds\n";
  const auto old = os.precision(17);
  for (const auto& r : history) {
    os << r.step << ',' << r.phase << ',' << r.loss << ',';
    if (r.e_L2) os << *r.e_L2;
    os << ',' << r.seconds << '\n';
  }
  os.precision(old);
}

}  // namespace quasitnn
