// SPDX-License-Identifier: Apache-2.0
#include "quasitnn/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

using namespace quasitnn;
using std::numbers::pi;

TEST(Quadrature, DefaultGridHas400NodesAndUnitMass) {
  const Quadrature1D q = build_grid(100, 4);
  ASSERT_EQ(q.size(), 400u);
  EXPECT_NEAR(std::accumulate(q.weights.begin(), q.weights.end(), 0.0), 1.0, 1e-14);
  for (std::size_t j = 1; j < q.size(); ++j) EXPECT_LT(q.nodes[j - 1], q.nodes[j]);
  EXPECT_GT(q.nodes.front(), 0.0);
  EXPECT_LT(q.nodes.back(), 1.0);
  for (double w : q.weights) EXPECT_GT(w, 0.0);
}

TEST(Quadrature, TwoPointRule) {
  const Quadrature1D q = build_grid(1, 2);
  ASSERT_EQ(q.size(), 2u);
  EXPECT_NEAR(q.nodes[0], (3.0 - std::sqrt(3.0)) / 6.0, 1e-15);
  EXPECT_NEAR(q.nodes[1], (3.0 + std::sqrt(3.0)) / 6.0, 1e-15);
  EXPECT_NEAR(q.weights[0], 0.5, 1e-15);
  EXPECT_NEAR(q.weights[1], 0.5, 1e-15);
}

TEST(Quadrature, CompositeTwoPointIsExactForCubics) {
  const Quadrature1D q = build_grid(2, 2);
  ASSERT_EQ(q.size(), 4u);
  std::vector<double> f(q.size());
  for (std::size_t j = 0; j < q.size(); ++j) {
    const double x = q.nodes[j];
    f[j] = 4 * x * x * x - 3 * x * x + 2 * x - 1;
  }
  EXPECT_NEAR(integrate(q, f), 1.0 - 1.0 + 1.0 - 1.0, 1e-15);
}

TEST(Quadrature, PolynomialExactnessPerSubinterval) {
  for (int ng = 2; ng <= 10; ++ng) {
    const Quadrature1D q = build_grid(3, ng);
    for (int deg = 0; deg <= 2 * ng - 1; ++deg) {
      std::vector<double> f(q.size());
      for (std::size_t j = 0; j < q.size(); ++j) f[j] = std::pow(q.nodes[j], deg);
      EXPECT_NEAR(integrate(q, f), 1.0 / (deg + 1), 1e-14) << "n_gauss " << ng << " degree " << deg;
    }
  }
}

TEST(Quadrature, AnalyticTrigIntegrals) {
  const Quadrature1D q = build_grid();
  std::vector<double> ones(q.size(), 1.0), s2(q.size()), c7(q.size());
  for (std::size_t j = 0; j < q.size(); ++j) {
    s2[j] = std::pow(std::sin(2 * pi * q.nodes[j]), 2);
    c7[j] = std::pow(std::cos(2 * pi * 7 * q.nodes[j]), 2);
  }
  EXPECT_NEAR(integrate(q, ones), 1.0, 1e-14);
  EXPECT_NEAR(integrate(q, s2), 0.5, 1e-14);
  EXPECT_NEAR(integrate(q, c7), 0.5, 1e-13);
}

TEST(Quadrature, Errors) {
  EXPECT_THROW(build_grid(0, 4), std::invalid_argument);
  EXPECT_THROW(build_grid(10, 1), std::invalid_argument);
  EXPECT_THROW(build_grid(10, 11), std::invalid_argument);
  const Quadrature1D q = build_grid(2, 2);
  std::vector<double> bad(3, 1.0);
  EXPECT_THROW(integrate(q, bad), std::invalid_argument);
}
