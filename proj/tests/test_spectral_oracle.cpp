// SPDX-License-Identifier: Apache-2.0
#include "quasitnn/problem.hpp"
#include "quasitnn/spectral_oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace quasitnn;
using std::numbers::pi;

namespace {
const double kSqrt2 = std::sqrt(2.0);
const double kFourPi2 = 4 * pi * pi;

RankSum sum_of(int n, FactorKind kind, double shift = 0.0) {
  RankSum R(n);
  for (int i = 0; i < n; ++i) {
    std::vector<Factor1D> f(n, Factor1D::constant());
    f[i] = kind == FactorKind::Sine ? Factor1D::sine(1) : Factor1D::cosine(1);
    R.add_term(1.0, f);
  }
  if (shift != 0.0) R = R + RankSum::constant(n, shift);
  return R;
}

FourierSeries mode(int n, const MultiIndex& k, Complex v = 1.0) {
  FourierSeries F(n);
  F.coeffs[k] = v;
  return F;
}

double max_diff(const FourierSeries& a, const FourierSeries& b) {
  double m = 0.0;
  for (const auto& [k, v] : a.coeffs) m = std::max(m, std::abs(v - b.coeff(k)));
  for (const auto& [k, v] : b.coeffs) m = std::max(m, std::abs(v - a.coeff(k)));
  return m;
}
}  // namespace

TEST(SpectralOracle, BallModes) {
  const auto m = ball_modes(2, 1.0);
  ASSERT_EQ(m.size(), 4u);
  EXPECT_EQ(m[0], (MultiIndex{-1, 0}));
  EXPECT_EQ(m[3], (MultiIndex{1, 0}));
  EXPECT_EQ(ball_modes(2, std::sqrt(2.0)).size(), 8u);
  EXPECT_EQ(ball_modes(3, 1.0).size(), 6u);
  EXPECT_TRUE(ball_modes(2, 0.5).empty());
}

TEST(SpectralOracle, HermitianSystem) {
  const auto P = ProjectionMatrix::row({1.0, kSqrt2});
  const SpectralSystem sys =
      assemble_spectral(to_fourier(sum_of(2, FactorKind::Cosine, 6.0)), FourierSeries(2), P, 4.0);
  EXPECT_LE((sys.matrix - sys.matrix.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(assemble_spectral(FourierSeries(2), FourierSeries(2), P, 50.0, 100), std::invalid_argument);
}

TEST(SpectralOracle, ConstantCoefficientTruncatedSolve) {
  const auto P = ProjectionMatrix::row({1.0, kSqrt2});
  const FourierSeries A = mode(2, {0, 0});
  FourierSeries F(2, true);
  F.add({2, -1}, Complex{0.3, -0.4});
  const FourierSeries U = solve_truncated(A, F, P, 5.0);
  const double pk = 2 - kSqrt2;
  EXPECT_NEAR(std::abs(U.coeff({2, -1}) - Complex{0.3, -0.4} / (kFourPi2 * pk * pk)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(U.coeff({-2, 1}) - Complex{0.3, 0.4} / (kFourPi2 * pk * pk)), 0.0, 1e-12);
  double rest = 0.0;
  for (const auto& [k, v] : U.coeffs)
    if (k != MultiIndex{2, -1} && k != MultiIndex{-2, 1}) rest = std::max(rest, std::abs(v));
  EXPECT_LE(rest, 1e-14);
  for (const auto& [k, v] : solve_truncated(A, FourierSeries(2, true), P, 3.0).coeffs) EXPECT_EQ(v, Complex{});
}

TEST(SpectralOracle, SingularSystem) {
  const auto P = ProjectionMatrix::row({1.0, kSqrt2});
  EXPECT_THROW(solve_truncated(mode(2, {0, 0}, -1.0), mode(2, {1, 0}), P, 2.0), std::runtime_error);
}

TEST(SpectralOracle, ExampleTwoTruncatedMatchesExact) {
  const auto P = ProjectionMatrix::row({1.0, pi});
  const ProblemSpec prob = make_problem("ex2", P, sum_of(2, FactorKind::Cosine, 6.0), sum_of(2, FactorKind::Sine));
  const FourierSeries A = to_fourier(prob.A), F = to_fourier(prob.F);
  const FourierSeries UK = solve_truncated(A, F, P, 8.0);
  EXPECT_LE(max_diff(UK, to_fourier(*prob.exact_U)), 1e-10);
  EXPECT_TRUE(UK.is_hermitian(1e-12));
  const FourierSeries R = apply_operator(A, UK, P) + F;
  for (const auto& [k, v] : R.coeffs)
    if (euclidean_norm(k) <= 8.0) EXPECT_LE(std::abs(v), 1e-9);
}

TEST(SpectralOracle, OracleAgreesWithRankOneGalerkinForm) {
  const auto P = ProjectionMatrix::row({1.0, kSqrt2});
  RankSum A = sum_of(2, FactorKind::Cosine, 6.0);
  RankSum U(2);
  U.add_term(1.0, {Factor1D::sine(1), Factor1D::cosine(2)});
  U.add_term(0.5, {Factor1D::cosine(1), Factor1D::constant()});
  const ProblemSpec prob = make_problem("mixed", P, A, U);
  const FourierSeries UK = solve_truncated(to_fourier(A), to_fourier(prob.F), P, 4.0);
  const RankSum V = from_fourier(UK);
  const Quadrature1D q = build_grid(100, 4);
  RankSum phi(2);
  for (const auto& [f1, f2] : {std::pair{Factor1D::sine(1), Factor1D::cosine(2)},
                               std::pair{Factor1D::cosine(2), Factor1D::sine(1)},
                               std::pair{Factor1D::constant(), Factor1D::sine(3)}}) {
    RankSum t(2);
    t.add_term(1.0, {f1, f2});
    EXPECT_NEAR(energy_inner_product(A, V, t, P, q), l2_inner_product(prob.F, t, q), 1e-10);
  }
}

TEST(SpectralOracle, ConstantCoeffSolveExamples) {
  const auto P = ProjectionMatrix::row({1.0, kSqrt2});
  EXPECT_NEAR(constant_coeff_solve(1.0, mode(2, {1, 0}), P).coeff({1, 0}).real(), 0.0253303, 1e-7);
  EXPECT_NEAR(constant_coeff_solve(1.0, mode(2, {1, 0}), P).coeff({1, 0}).real(), 1.0 / kFourPi2, 1e-17);
  const double pk = 3 - 2 * kSqrt2;
  const double u = constant_coeff_solve(1.0, mode(2, {3, -2}), P).coeff({3, -2}).real();
  EXPECT_NEAR(u, 1.0 / (kFourPi2 * pk * pk), 1e-12);
  EXPECT_NEAR(u, 0.8604, 1e-4);
  const FourierSeries one = constant_coeff_solve(1.0, mode(2, {3, -2}), P);
  const FourierSeries two = constant_coeff_solve(2.0, mode(2, {3, -2}), P);
  EXPECT_NEAR(two.coeff({3, -2}).real(), 0.5 * one.coeff({3, -2}).real(), 1e-15);
}

TEST(SpectralOracle, ConstantCoeffSolveErrors) {
  const auto P = ProjectionMatrix::row({1.0, 1.0});
  try {
    constant_coeff_solve(1.0, mode(2, {1, -1}), P);
    FAIL() << "expected domain_error";
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("near-resonant mode"), std::string::npos);
  }
  EXPECT_THROW(constant_coeff_solve(1.0, mode(2, {0, 0}), P), std::invalid_argument);
  EXPECT_THROW(constant_coeff_solve(0.0, mode(2, {1, 0}), P), std::invalid_argument);
}

TEST(SpectralOracle, ConstantCoeffSolveInvertsOperator) {
  const auto P = ProjectionMatrix::row({1.0, kSqrt2});
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> pick(-20, 20);
  for (int t = 0; t < 20; ++t) {
    MultiIndex k{pick(rng), pick(rng)};
    if (k == MultiIndex{0, 0}) continue;
    const FourierSeries F = mode(2, k, Complex{0.7, 0.2});
    const FourierSeries U = constant_coeff_solve(3.0, F, P);
    const FourierSeries back = apply_operator(mode(2, {0, 0}, 3.0), U, P);
    EXPECT_LE(std::abs(back.coeff(k) + F.coeff(k)), 1e-12);
  }
}

TEST(SpectralOracle, TruncationDecay) {
  const auto P = ProjectionMatrix::row({1.0, kSqrt2});
  const FourierSeries inside = mode(2, {1, 0});
  for (const auto& [K, e] : measure_truncation_decay(inside, {1, 2, 5}, {SpaceFamily::H, 0.0}, nullptr)) EXPECT_EQ(e, 0.0);

  const std::vector<double> eta{1.0, 0.7, 0.4, 0.2, 0.1};
  const FourierSeries slow = construct_slow_sequence(eta, 1.0, 1.0, P, {1, 0});
  const auto d = measure_truncation_decay(slow, {1, 2, 3, 4, 5}, {SpaceFamily::Hbar_P, 1.0, true}, &P);
  for (std::size_t K = 0; K < d.size(); ++K) EXPECT_NEAR(d[K].second, eta[K], 1e-15);

  FourierSeries tail(1);
  for (int m = 1; m <= 4000; ++m) tail.coeffs[{m}] = std::pow(m, -4.0);
  const auto decay = measure_truncation_decay(tail, {100, 150, 200, 300, 400}, {SpaceFamily::H, 0.0}, nullptr);
  EXPECT_NEAR(fit_decay_rate(decay), -3.5, 0.05);
}

TEST(SpectralOracle, EllipticityBounds) {
  const auto P = ProjectionMatrix::row({1.0, kSqrt2});
  const ProblemSpec prob = make_problem("ex1", P, sum_of(2, FactorKind::Cosine, 6.0), sum_of(2, FactorKind::Sine));
  EXPECT_EQ(prob.alpha0, 4.0);
  EXPECT_EQ(prob.alpha1, 8.0);
  const FourierSeries A = to_fourier(prob.A);
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> pick(-4, 4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    FourierSeries V(2, true);
    for (int j = 0; j < 5; ++j) {
      const MultiIndex k{pick(rng), pick(rng)};
      if (k != MultiIndex{0, 0}) V.add(k, Complex{u(rng), u(rng)});
    }
    const double a = bilinear_form(A, V, V, P).real();
    const double h1 = kFourPi2 * std::pow(norm(V, {SpaceFamily::Hbar_P, 1.0, true}, &P), 2);
    EXPECT_GE(a, prob.alpha0 * h1 * (1 - 1e-12));
    EXPECT_LE(a, prob.alpha1 * h1 * (1 + 1e-12));
  }
}

TEST(SpectralOracle, ConditioningGrowsAndCsv) {
  const auto P = ProjectionMatrix::row({1.0, kSqrt2});
  const auto report = conditioning_report(to_fourier(sum_of(2, FactorKind::Cosine, 6.0)), P, {2, 4, 8, 16});
  ASSERT_EQ(report.size(), 4u);
  for (std::size_t i = 1; i < report.size(); ++i) {
    EXPECT_GT(report[i].modes, report[i - 1].modes);
    EXPECT_GE(report[i].condition, report[i - 1].condition);
  }
  EXPECT_GT(report.back().lambda_min, 0.0);
  std::ostringstream os;
  write_conditioning_csv(os, report);
  const std::string csv = os.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "K,modes,lambda_min,lambda_max,cond");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

TEST(SpectralOracle, ResidualBlindspot) {
  const auto P = ProjectionMatrix::row({1.0, kSqrt2});
  for (const MultiIndex& k : {MultiIndex{1, 0}, MultiIndex{3, -2}, MultiIndex{17, -12}}) {
    const double pk = projected_frequency(P, k).norm();
    EXPECT_NEAR(residual_blindspot_ratio(1.0, P, k), kFourPi2 * pk * pk, 1e-12 * kFourPi2 * pk * pk);
    EXPECT_NEAR(residual_blindspot_ratio(2.5, P, k), 6.25 * kFourPi2 * pk * pk, 1e-12 * kFourPi2 * pk * pk * 6.25);
  }
}
