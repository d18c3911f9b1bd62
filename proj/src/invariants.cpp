// SPDX-License-Identifier: Apache-2.0
#include "quasitnn/invariants.hpp"

#include "quasitnn/fourier_field.hpp"
#include "quasitnn/tnn_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace quasitnn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Gen {
  std::mt19937_64 rng;
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
};

ProjectionMatrix random_projection(Gen& g, int d, int n) {
  Eigen::MatrixXd P(d, n);
  for (int i = 0; i < d; ++i)
    for (int m = 0; m < n; ++m) P(i, m) = g.real(-2.0, 2.0);
  return ProjectionMatrix(P);
}

// Zero-mean series with `modes` random nonzero indices in the box |k_i| <= K.
FourierSeries random_series(Gen& g, int n, int modes, int K) {
  FourierSeries U(n);
  while (static_cast<int>(U.coeffs.size()) < modes) {
    MultiIndex k(n);
    for (auto& v : k) v = g.integer(-K, K);
    if (std::all_of(k.begin(), k.end(), [](int v) { return v == 0; })) continue;
    U.coeffs[k] = Complex{g.real(-1, 1), g.real(-1, 1)};
  }
  return U;
}

void record(InvariantCheck& c, double violation) {
  ++c.instances;
  if (violation > 0.0) {
    ++c.failures;
    c.worst = std::max(c.worst, violation);
  }
}

// Every alpha in N^d with |alpha| = r.
void compositions(int d, int r, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == d - 1) {
    cur.push_back(r);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int a = 0; a <= r; ++a) {
    cur.push_back(a);
    compositions(d, r - a, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<InvariantCheck> run_invariant_suite(int instances, std::uint64_t seed) {
  Gen g{std::mt19937_64(seed)};
  InvariantCheck periodic{"periodicity"}, zero_mean{"zero-mean"}, normalized{"normalization"},
      parseval{"parseval-additivity"}, interp{"interpolation-inequality"}, equiv{"directional-norm-equivalence"};
  const Quadrature1D q = build_grid(25, 4);

  for (int it = 0; it < instances; ++it) {
    // small random TNN
    const int n = g.integer(2, 3);
    TNNShape shape{g.integer(2, 4), g.integer(4, 8), g.integer(1, 3), 5};
    TNNParams tnn = init_tnn(n, shape, g.rng());
    tnn.c = Eigen::VectorXd::NullaryExpr(shape.p, [&] { return g.real(-1, 1); });
    tnn = normalize(tnn, q);

    Eigen::VectorXd y(4);
    for (int k = 0; k < 4; ++k) y(k) = g.real(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const FactorValues a = forward_factors_at(tnn.subnets[i], y);
      const FactorValues b = forward_factors_at(tnn.subnets[i], (y.array() + 1.0).matrix());
      worst = std::max(worst, (a.val - b.val).cwiseAbs().maxCoeff() / std::max(1.0, a.val.cwiseAbs().maxCoeff()));
    }
    record(periodic, worst > 1e-12 ? worst : 0.0);

    const RankSum corrected = zero_mean_correct(tnn, q);
    const double mean = std::abs(mean_value(corrected, q));
    record(zero_mean, mean > 1e-12 ? mean : 0.0);

    const BasisBank basis = normalized_basis(tnn, q);
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(q.weights.data(), q.size());
    double norm_dev = 0.0;
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd nrm = (basis.samples[i][0].array().square().matrix() * w).cwiseSqrt();
      norm_dev = std::max(norm_dev, (nrm.array() - 1.0).abs().maxCoeff());
    }
    record(normalized, norm_dev > 1e-10 ? norm_dev : 0.0);

    // Parseval additivity on disjoint supports
    const int ns = g.integer(2, 4), d = g.integer(1, std::min(ns, 3));
    const ProjectionMatrix P = random_projection(g, d, ns);
    FourierSeries U = random_series(g, ns, g.integer(3, 12), 4);
    FourierSeries V(ns);
    for (const auto& [k, v] : random_series(g, ns, g.integer(3, 12), 4).coeffs)
      if (U.coeffs.find(k) == U.coeffs.end()) V.coeffs[k] = v;
    const SpaceTag tags[] = {{SpaceFamily::H, g.real(-1, 3)},
                             {SpaceFamily::H_P, g.real(-1, 3)},
                             {SpaceFamily::Hbar, g.real(0, 3), true},
                             {SpaceFamily::Hbar_P, g.real(0, 3), true}};
    double pv = 0.0;
    for (const auto& tag : tags) {
      const ProjectionMatrix* pp = (tag.family == SpaceFamily::H_P || tag.family == SpaceFamily::Hbar_P) ? &P : nullptr;
      const double lhs = std::pow(norm(U + V, tag, pp), 2);
      const double rhs = std::pow(norm(U, tag, pp), 2) + std::pow(norm(V, tag, pp), 2);
      pv = std::max(pv, std::abs(lhs - rhs) / std::max(rhs, 1e-300));
    }
    record(parseval, pv > 1e-12 ? pv : 0.0);

    // interpolation: ||F||_r <= ||F||_s^{1-theta} ||F||_t^theta
    const double s = g.real(0, 3), t = g.real(0, 3), theta = g.real(0, 1);
    const double r = (1 - theta) * s + theta * t;
    const double nr = norm(U, {SpaceFamily::Hbar_P, r, true}, &P);
    const double bound = std::pow(norm(U, {SpaceFamily::Hbar_P, s, true}, &P), 1 - theta) *
                         std::pow(norm(U, {SpaceFamily::Hbar_P, t, true}, &P), theta);
    record(interp, nr > bound * (1 + 1e-12) ? (nr - bound) / bound : 0.0);

    // (r!)^{-1/2} ||U||_{r+s} <= (sum_alpha ||Y^alpha U||_s^2)^{1/2} / (2 pi)^r <= ||U||_{r+s}
    const int order = g.integer(0, 3);
    const double so = g.real(0, 2);
    std::vector<std::vector<int>> alphas;
    std::vector<int> cur;
    compositions(P.d(), order, cur, alphas);
    double mid2 = 0.0;
    for (const auto& alpha : alphas) mid2 += std::pow(norm(directional_derivative(U, alpha, P), {SpaceFamily::Hbar_P, so, true}, &P), 2);
    const double mid = std::sqrt(mid2) / std::pow(kTwoPi, order);
    const double top = norm(U, {SpaceFamily::Hbar_P, order + so, true}, &P);
    const double fact = std::tgamma(order + 1.0);
    double ev = 0.0;
    if (mid > top * (1 + 1e-12)) ev = (mid - top) / top;
    if (top / std::sqrt(fact) > mid * (1 + 1e-12)) ev = std::max(ev, (top / std::sqrt(fact) - mid) / mid);
    record(equiv, ev);
  }
  return {periodic, zero_mean, normalized, parseval, interp, equiv};
}

}  // namespace quasitnn
