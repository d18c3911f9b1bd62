// SPDX-License-Identifier: Apache-2.0
#include "quasitnn/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace quasitnn {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess for the i-th largest root, then Newton.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = wi;
    w[n - 1 - i] = wi;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

Quadrature1D build_grid(int n_sub, int n_gauss) {
  if (n_sub < 1) throw std::invalid_argument("quadrature: n_sub must be >= 1");
  if (n_gauss < 2 || n_gauss > 10)
    throw std::invalid_argument("quadrature: unsupported n_gauss " + std::to_string(n_gauss) +
                                " (expected 2..10)");
  std::vector<double> x, w;
  gauss_legendre(n_gauss, x, w);

  Quadrature1D q;
  q.n_sub = n_sub;
  q.n_gauss = n_gauss;
  q.nodes.reserve(static_cast<std::size_t>(n_sub) * n_gauss);
  q.weights.reserve(q.nodes.capacity());
  const double h = 1.0 / n_sub;
  for (int s = 0; s < n_sub; ++s) {
    const double a = s * h;
    for (int g = 0; g < n_gauss; ++g) {
      q.nodes.push_back(a + 0.5 * h * (x[g] + 1.0));
      q.weights.push_back(0.5 * h * w[g]);
    }
  }
  return q;
}

double integrate(const Quadrature1D& q, std::span<const double> samples) {
  if (samples.size() != q.size())
    throw std::invalid_argument("quadrature: sample count " + std::to_string(samples.size()) +
                                " does not match node count " + std::to_string(q.size()));
  double acc = 0.0;
  for (std::size_t j = 0; j < samples.size(); ++j) acc += q.weights[j] * samples[j];
  return acc;
}

}  // namespace quasitnn
