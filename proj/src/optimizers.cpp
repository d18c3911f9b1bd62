// SPDX-License-Identifier: Apache-2.0
#include "quasitnn/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace quasitnn {

void adam_step(AdamState& st, Eigen::VectorXd& x, const Eigen::VectorXd& grad, double lr) {
  if (st.m.size() != x.size()) {
    st.m = Eigen::VectorXd::Zero(x.size());
    st.v = Eigen::VectorXd::Zero(x.size());
    st.t = 0;
  }
  ++st.t;
  st.m = st.beta1 * st.m + (1.0 - st.beta1) * grad;
  st.v = st.beta2 * st.v + (1.0 - st.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.t));
  const double c2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.t));
  x.array() -= lr * (st.m.array() / c1) / ((st.v.array() / c2).sqrt() + st.eps);
}

namespace {
Eigen::VectorXd two_loop(const LbfgsState& st, const Eigen::VectorXd& g) {
  const std::size_t m = st.s.size();
  Eigen::VectorXd q = g;
  std::vector<double> alpha(m), rho(m);
  for (std::size_t k = m; k-- > 0;) {
    rho[k] = 1.0 / st.y[k].dot(st.s[k]);
    alpha[k] = rho[k] * st.s[k].dot(q);
    q -= alpha[k] * st.y[k];
  }
  const double gamma = st.s.back().dot(st.y.back()) / st.y.back().squaredNorm();
  Eigen::VectorXd r = gamma * q;
  for (std::size_t k = 0; k < m; ++k) {
    const double beta = rho[k] * st.y[k].dot(r);
    r += (alpha[k] - beta) * st.s[k];
  }
  return -r;
}
}  // namespace

LbfgsResult lbfgs_step(LbfgsState& st, Eigen::VectorXd& x, const Objective& f, double lr) {
  LbfgsResult res;
  Eigen::VectorXd g;
  double f0 = 0.0;
  if (st.last && st.last->x.size() == x.size() && st.last->x == x) {
    f0 = st.last->f;
    g = st.last->g;
  } else {
    f0 = f(x, &g);
    ++res.evaluations;
  }
  st.last.reset();
  res.value = f0;
  if (!std::isfinite(f0) || !g.allFinite()) {
    st.s.clear();
    st.y.clear();
    return res;
  }
  Eigen::VectorXd dir;
  double step = lr;
  if (!st.s.empty()) {
    dir = two_loop(st, g);
    if (!(dir.dot(g) < 0.0)) {
      st.s.clear();
      st.y.clear();
    }
  }
  if (st.s.empty()) {
    dir = -g;
    const double g1 = g.lpNorm<1>();
    step = lr * std::min(1.0, g1 > 0.0 ? 1.0 / g1 : 1.0);
  }
  const double slope = g.dot(dir);
  if (slope == 0.0) {
    res.accepted = true;
    return res;
  }
  for (int k = 0; k <= st.max_backtracks; ++k, step *= 0.5) {
    const Eigen::VectorXd xn = x + step * dir;
    Eigen::VectorXd gn;
    const double fn = f(xn, &gn);
    ++res.evaluations;
    if (!std::isfinite(fn) || !gn.allFinite()) continue;
    const bool armijo = fn <= f0 + st.armijo * step * slope;
    // Approximate Armijo test on the directional derivative once f stops resolving the decrease.
    const bool approx = std::abs(fn - f0) <= st.armijo_slack * std::abs(f0) &&
                        gn.dot(dir) <= (2.0 * st.armijo - 1.0) * slope;
    if (armijo || approx) {
      const Eigen::VectorXd s = xn - x, y = gn - g;
      if (s.dot(y) > st.curvature_eps * s.norm() * y.norm()) {
        st.s.push_back(s);
        st.y.push_back(y);
        if (st.s.size() > st.history) {
          st.s.pop_front();
          st.y.pop_front();
        }
      }
      x = xn;
      st.last = LbfgsState::Evaluation{xn, fn, std::move(gn)};
      res.value = fn;
      res.accepted = true;
      return res;
    }
  }
  st.s.clear();
  st.y.clear();
  return res;
}

}  // namespace quasitnn
