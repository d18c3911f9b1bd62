// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

namespace quasitnn {

/// Composite Gauss-Legendre rule on [0,1]: a uniform partition into n_sub
/// cells with n_gauss points in each cell. Nodes are strictly increasing and
/// the weights sum to one.
struct Quadrature1D {
  int n_sub = 0;
  int n_gauss = 0;
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Reference Gauss-Legendre points and weights on [-1,1], ascending.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

/// Throws std::invalid_argument for n_sub < 1 or n_gauss outside [2,10].
Quadrature1D build_grid(int n_sub = 100, int n_gauss = 4);

/// Weighted sum  sum_j w_j f_j.
double integrate(const Quadrature1D& q, std::span<const double> samples);

}  // namespace quasitnn
