// SPDX-License-Identifier: Apache-2.0
#include "quasitnn/fourier_field.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace quasitnn;
using std::numbers::pi;

namespace {
const double kSqrt2 = std::sqrt(2.0);

FourierSeries sine_y1(int n) {
  FourierSeries U(n, true);
  MultiIndex k(n, 0);
  k[0] = 1;
  U.add(k, Complex{0.0, -0.5});  // sin = (e - e^-1) / 2i
  return U;
}

FourierSeries random_series(std::mt19937_64& rng, int n, int modes, int K, bool zero_mean = true) {
  std::uniform_int_distribution<int> pick(-K, K);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  FourierSeries U(n);
  while (static_cast<int>(U.coeffs.size()) < modes) {
    MultiIndex k(n);
    bool zero = true;
    for (auto& v : k) {
      v = pick(rng);
      zero = zero && v == 0;
    }
    if (zero && zero_mean) continue;
    U.coeffs[k] = Complex{val(rng), val(rng)};
  }
  return U;
}
}  // namespace

TEST(FourierField, MeanValue) {
  FourierSeries U = sine_y1(2);
  EXPECT_EQ(mean_value(U), Complex{});
  U.coeffs[{0, 0}] = 3.0;
  EXPECT_EQ(mean_value(U), Complex{3.0});
  std::mt19937_64 rng(1);
  FourierSeries V = random_series(rng, 3, 5, 3);
  V.coeffs[{0, 0, 0}] = Complex{2.0, 0.0};
  EXPECT_EQ(mean_value(V), Complex{2.0});
}

TEST(FourierField, HermitianInvariant) {
  const FourierSeries U = sine_y1(2);
  EXPECT_TRUE(U.is_hermitian());
  FourierSeries V(2);
  V.coeffs[{1, 0}] = 1.0;
  EXPECT_FALSE(V.is_hermitian());
}

TEST(FourierField, NormExamples) {
  const auto P = ProjectionMatrix::row({1.0, kSqrt2});
  FourierSeries e(2);
  e.coeffs[{3, -2}] = 1.0;
  for (double s : {-1.0, 0.5, 2.0})
    EXPECT_NEAR(norm(e, {SpaceFamily::Hbar_P, s, true}, &P), std::pow(3 - 2 * kSqrt2, s), 1e-13);
  const FourierSeries zero(2);
  for (auto fam : {SpaceFamily::H, SpaceFamily::Hbar}) EXPECT_EQ(norm(zero, {fam, 1.3}), 0.0);
  for (auto fam : {SpaceFamily::H_P, SpaceFamily::Hbar_P}) EXPECT_EQ(norm(zero, {fam, 1.3}, &P), 0.0);
  FourierSeries two(2);
  two.coeffs[{1, 0}] = 1.0;
  two.coeffs[{0, 4}] = Complex{0.0, 1.0};
  EXPECT_NEAR(norm(two, {SpaceFamily::H, 0.0}), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(norm(two, {SpaceFamily::H, 1.0}), std::sqrt(2.0 + 17.0), 1e-13);
}

TEST(FourierField, NormErrors) {
  const auto P = ProjectionMatrix::row({1.0, kSqrt2});
  FourierSeries U = sine_y1(2);
  U.coeffs[{0, 0}] = 1.0;
  EXPECT_THROW(norm(U, {SpaceFamily::H, 0.0, true}), std::domain_error);
  EXPECT_THROW(norm(U, {SpaceFamily::Hbar_P, -1.0, false}, &P), std::domain_error);
  EXPECT_THROW(norm(U, {SpaceFamily::H_P, 0.0}), std::invalid_argument);
  EXPECT_THROW(norm(U, {SpaceFamily::H, 0.0}, &P), std::invalid_argument);
}

TEST(FourierField, DirectionalDerivative) {
  const auto P = ProjectionMatrix::row({1.0, kSqrt2});
  std::mt19937_64 rng(2);
  const FourierSeries U = random_series(rng, 2, 6, 4);
  const FourierSeries same = directional_derivative(U, {0}, P);
  for (const auto& [k, v] : U.coeffs) EXPECT_EQ(same.coeff(k), v);

  FourierSeries e(2);
  e.coeffs[{3, -2}] = 1.0;
  const FourierSeries de = directional_derivative(e, {1}, P);
  EXPECT_NEAR(std::abs(de.coeff({3, -2}) - Complex{0.0, 2 * pi * (3 - 2 * kSqrt2)}), 0.0, 1e-13);

  // d/dy1 sin(2 pi y1) = 2 pi cos(2 pi y1): coefficients pi at +-e1
  const FourierSeries ds = directional_derivative(sine_y1(2), {1}, P);
  EXPECT_NEAR(std::abs(ds.coeff({1, 0}) - Complex{pi, 0.0}), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(ds.coeff({-1, 0}) - Complex{pi, 0.0}), 0.0, 1e-14);
}

TEST(FourierField, Truncate) {
  FourierSeries U(2);
  U.coeffs[{0, 0}] = 5.0;
  U.coeffs[{1, 0}] = 1.0;
  U.coeffs[{2, 2}] = 2.0;
  U.coeffs[{0, -4}] = 3.0;
  const FourierSeries all = truncate(U, 10.0);
  EXPECT_EQ(all.coeffs.size(), 4u);
  const FourierSeries low = truncate(U, 0.5);
  EXPECT_EQ(low.coeffs.size(), 1u);
  EXPECT_EQ(low.coeff({0, 0}), Complex{5.0});
  const FourierSeries mid = truncate(U, 3.0);
  EXPECT_EQ(mid.coeffs.size(), 3u);
  EXPECT_EQ(mid.coeff({0, -4}), Complex{});
}

TEST(FourierField, TruncationMonotone) {
  std::mt19937_64 rng(3);
  const auto P = ProjectionMatrix::row({1.0, kSqrt2, std::sqrt(3.0)});
  const FourierSeries U = random_series(rng, 3, 40, 6);
  for (const SpaceTag tag : {SpaceTag{SpaceFamily::H, 1.0}, SpaceTag{SpaceFamily::Hbar_P, 0.5, true}}) {
    double prev = INFINITY;
    for (double K = 0.5; K < 12; K += 0.5) {
      const double e = norm(U - truncate(U, K), tag, tag.family == SpaceFamily::Hbar_P ? &P : nullptr);
      EXPECT_LE(e, prev + 1e-15);
      prev = e;
    }
  }
}

TEST(FourierField, PullbackMatchesTorus) {
  const auto P = ProjectionMatrix::row({1.0, kSqrt2});
  std::mt19937_64 rng(4);
  const FourierSeries U = random_series(rng, 2, 8, 5, false);
  Complex sum{};
  for (const auto& [k, v] : U.coeffs) sum += v;
  EXPECT_NEAR(std::abs(pullback_eval(U, P, {0.0}) - sum), 0.0, 1e-14);
  for (double x : {0.37, 3.21, 17.9}) {
    const double y1 = x - std::floor(x), y2 = kSqrt2 * x - std::floor(kSqrt2 * x);
    EXPECT_NEAR(std::abs(pullback_eval(U, P, {x}) - torus_eval(U, {y1, y2})), 0.0, 1e-12);
  }
  FourierSeries e(2);
  e.coeffs[{3, -2}] = 1.0;
  EXPECT_NEAR(std::abs(pullback_eval(e, P, {1.234})), 1.0, 1e-15);
}

TEST(FourierField, SlowSequenceTelescopes) {
  const auto P = ProjectionMatrix::row({1.0, kSqrt2});
  const std::vector<double> eta{1.0, 0.5, 0.25};
  const FourierSeries U = construct_slow_sequence(eta, 1.0, 1.0, P, {1, 0});
  const SpaceTag tag{SpaceFamily::Hbar_P, 1.0, true};
  EXPECT_NEAR(norm(U, tag, &P), 1.0, 1e-15);
  for (int K = 1; K <= 3; ++K) EXPECT_NEAR(norm(U - truncate(U, K), tag, &P), eta[K - 1], 1e-15);
  // a_m = (3/4, 3/16, 1/16) at modes 2, 3, 4
  EXPECT_NEAR(U.coeff({2, 0}).real(), std::sqrt(0.75) / 2.0, 1e-15);
  EXPECT_NEAR(U.coeff({3, 0}).real(), std::sqrt(3.0 / 16.0) / 3.0, 1e-15);
  EXPECT_NEAR(U.coeff({4, 0}).real(), std::sqrt(1.0 / 16.0) / 4.0, 1e-15);
}

TEST(FourierField, SlowSequenceErrors) {
  const auto P = ProjectionMatrix::row({1.0, kSqrt2});
  EXPECT_THROW(construct_slow_sequence({1.0, 2.0}, 0.0, 1.0, P, {1, 0}), std::invalid_argument);
  EXPECT_THROW(construct_slow_sequence({1.0, 0.5}, 2.0, 1.0, P, {1, 0}), std::invalid_argument);
  EXPECT_THROW(construct_slow_sequence({1.0, 0.5}, 0.0, 1.0, P, {1, 1}), std::invalid_argument);
}

TEST(FourierField, SlowSequenceOnDiophantineModes) {
  const auto P = ProjectionMatrix::row({1.0, kSqrt2});
  const std::vector<MultiIndex> modes{{1, -1}, {3, -2}, {7, -5}, {17, -12}};
  const std::vector<double> eta{1.0, 0.8, 0.6, 0.3};
  const FourierSeries U = construct_slow_sequence_on_modes(eta, 2.0, P, modes);
  EXPECT_NEAR(norm(U, {SpaceFamily::Hbar_P, 2.0, true}, &P), 1.0, 1e-14);
}

TEST(FourierField, SeriesRoundTrip) {
  std::mt19937_64 rng(5);
  const FourierSeries U = random_series(rng, 3, 10, 4, false);
  std::stringstream ss;
  write_series(ss, U);
  const FourierSeries V = read_series(ss, 3);
  ASSERT_EQ(V.coeffs.size(), U.coeffs.size());
  for (const auto& [k, v] : U.coeffs) EXPECT_EQ(V.coeff(k), v);
}

TEST(FourierField, ParsevalAdditivity) {
  std::mt19937_64 rng(6);
  const auto P = ProjectionMatrix::row({1.0, kSqrt2, std::sqrt(5.0)});
  for (int t = 0; t < 20; ++t) {
    const FourierSeries U = random_series(rng, 3, 6, 3);
    FourierSeries V(3);
    for (const auto& [k, v] : random_series(rng, 3, 6, 3).coeffs)
      if (!U.coeffs.count(k)) V.coeffs[k] = v;
    const SpaceTag tag{SpaceFamily::Hbar_P, 1.5, true};
    const double lhs = std::pow(norm(U + V, tag, &P), 2);
    const double rhs = std::pow(norm(U, tag, &P), 2) + std::pow(norm(V, tag, &P), 2);
    EXPECT_NEAR(lhs, rhs, 1e-12 * rhs);
  }
}
