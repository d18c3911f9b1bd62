// SPDX-License-Identifier: Apache-2.0
#include "quasitnn/contraction.hpp"
#include "quasitnn/galerkin.hpp"
#include "quasitnn/losses.hpp"
#include "quasitnn/spectral_oracle.hpp"
#include "quasitnn/tnn_model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace quasitnn;
using std::numbers::pi;

namespace {
const double kSqrt2 = std::sqrt(2.0);

RankSum single(double c, std::vector<Factor1D> f) {
  RankSum R(static_cast<int>(f.size()));
  R.add_term(c, std::move(f));
  return R;
}

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

RankSum random_trig(std::mt19937_64& rng, int n, int rank, int fmax) {
  std::uniform_real_distribution<double> c(-1.0, 1.0), ph(0.0, 2 * pi);
  std::uniform_int_distribution<int> f(1, fmax), kind(0, 2);
  RankSum R(n);
  for (int e = 0; e < rank; ++e) {
    std::vector<Factor1D> fs;
    for (int i = 0; i < n; ++i) {
      switch (kind(rng)) {
        case 0: fs.push_back(Factor1D::constant()); break;
        case 1: fs.push_back(Factor1D::cosine(f(rng), ph(rng))); break;
        default: fs.push_back(Factor1D::sine(f(rng), ph(rng))); break;
      }
    }
    R.add_term(c(rng), fs);
  }
  return R;
}

// Applies the operator of a Side symbolically to the j-th term of V.
RankSum apply_symbolic(OperatorKind op, const RankSum& f, const RankSum& V, std::size_t j, int dir,
                       const ProjectionMatrix& P) {
  const RankSum phi = single(1.0, V.terms[j].factors);
  switch (op) {
    case OperatorKind::Identity: return multiply(f, phi);
    case OperatorKind::Gradient: return multiply(f, directional_gradient(phi, P)[dir]);
    case OperatorKind::DivFlux:
      return directional_gradient(multiply(f, directional_gradient(phi, P)[dir]), P)[dir];
  }
  return RankSum(f.dim);
}

double dense_integral(const RankSum& a, const RankSum& b, const Quadrature1D& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j)
      s += q.weights[i] * q.weights[j] * eval(a, {q.nodes[i], q.nodes[j]}) * eval(b, {q.nodes[i], q.nodes[j]});
  return s;
}

BasisBank random_basis(std::mt19937_64& rng, int n, int p, std::size_t N) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  BasisBank b;
  b.dim = n;
  b.p = p;
  b.samples.resize(n);
  for (auto& s : b.samples)
    for (auto& m : s) m = Eigen::MatrixXd::NullaryExpr(p, static_cast<Eigen::Index>(N), [&] { return u(rng); });
  return b;
}
}  // namespace

TEST(Contraction, MatchesDenseGridForEveryOperatorPair) {
  const Quadrature1D q = build_grid(20, 4);
  const auto P = ProjectionMatrix::row({1.0, kSqrt2});
  std::mt19937_64 rng(1);
  const RankSum fL = random_trig(rng, 2, 2, 2) + RankSum::constant(2, 3.0);
  const RankSum fR = random_trig(rng, 2, 2, 2);
  const RankSum VL = random_trig(rng, 2, 3, 3), VR = random_trig(rng, 2, 2, 3);
  const FieldBank FL = FieldBank::from_rank_sum(fL, q), FR = FieldBank::from_rank_sum(fR, q);
  Eigen::VectorXd cL, cR;
  const BasisBank BL = basis_from_rank_sum(VL, q, cL), BR = basis_from_rank_sum(VR, q, cR);

  for (auto opL : {OperatorKind::Identity, OperatorKind::Gradient, OperatorKind::DivFlux})
    for (auto opR : {OperatorKind::Identity, OperatorKind::Gradient, OperatorKind::DivFlux}) {
      const Eigen::MatrixXd M = contract({&FL, &BL, opL, 0, nullptr}, {&FR, &BR, opR, 0, nullptr}, P, q);
      ASSERT_EQ(M.rows(), 3);
      ASSERT_EQ(M.cols(), 2);
      for (int m = 0; m < 3; ++m)
        for (int k = 0; k < 2; ++k) {
          const double ref = dense_integral(apply_symbolic(opL, fL, VL, m, 0, P),
                                            apply_symbolic(opR, fR, VR, k, 0, P), q);
          EXPECT_NEAR(M(m, k), ref, 1e-10 * std::max(1.0, std::abs(ref)))
              << static_cast<int>(opL) << " " << static_cast<int>(opR) << " (" << m << "," << k << ")";
        }
    }
}

TEST(Contraction, AdjointMatchesFiniteDifferences) {
  const Quadrature1D q = build_grid(3, 4);
  const auto P = ProjectionMatrix(Eigen::MatrixXd{{1.0, kSqrt2}, {0.5, -1.0}});
  std::mt19937_64 rng(2);
  const FieldBank FL = FieldBank::from_rank_sum(random_trig(rng, 2, 2, 2) + RankSum::constant(2, 2.0), q);
  const FieldBank FR = FieldBank::from_rank_sum(random_trig(rng, 2, 2, 2), q);
  BasisBank BL = random_basis(rng, 2, 3, q.size()), BR = random_basis(rng, 2, 2, q.size());
  const Eigen::MatrixXd mbar = Eigen::MatrixXd::Random(3, 2);

  for (auto opL : {OperatorKind::Identity, OperatorKind::Gradient, OperatorKind::DivFlux})
    for (auto opR : {OperatorKind::Gradient, OperatorKind::DivFlux}) {
      BasisSamples gL = BasisBank::zeros_like(BL), gR = BasisBank::zeros_like(BR);
      contract({&FL, &BL, opL, 1, &gL}, {&FR, &BR, opR, 1, &gR}, P, q, &mbar);
      auto value = [&] {
        return (mbar.array() *
                contract({&FL, &BL, opL, 1, nullptr}, {&FR, &BR, opR, 1, nullptr}, P, q).array())
            .sum();
      };
      for (int l = 0; l < 2; ++l)
        for (int r = 0; r < 3; ++r)
          for (auto [B, g] : {std::pair{&BL, &gL}, std::pair{&BR, &gR}}) {
            double& x = B->samples[l][r](0, 5);
            const double keep = x, h = 1e-4;
            x = keep + h;
            const double up = value();
            x = keep - h;
            const double down = value();
            x = keep;
            const double fd = (up - down) / (2 * h);
            EXPECT_NEAR((*g)[l][r](0, 5), fd, 1e-8 * std::max(1.0, std::abs(fd)));
          }
    }
}

TEST(Galerkin, NormalizedProductExample) {
  const Quadrature1D q = build_grid(100, 4);
  const auto P = ProjectionMatrix::row({1.0, kSqrt2});
  const RankSum phi = single(2.0, {Factor1D::sine(1), Factor1D::sine(1)});
  const ProblemSpec prob = make_problem("unit", P, RankSum::constant(2, 1.0), phi);
  const LossContext ctx(prob, q);
  Eigen::VectorXd c;
  const BasisBank B = basis_from_rank_sum(phi, q, c);
  const GalerkinSystem sys = assemble(ctx, B);
  EXPECT_NEAR(c(0) * c(0) * sys.stiffness(0, 0), 3 * 4 * pi * pi, 1e-9);
  EXPECT_NEAR(c(0) * c(0) * sys.stiffness(0, 0), 118.4353, 1e-4);
}

TEST(Galerkin, FourierModesOrthogonalAndZeroLoadOnConstants) {
  const Quadrature1D q = build_grid(100, 4);
  const auto P = ProjectionMatrix::row({1.0, kSqrt2});
  RankSum two(2);
  two.add_term(1.0, {Factor1D::sine(1), Factor1D::sine(1)});
  two.add_term(1.0, {Factor1D::cosine(2), Factor1D::sine(3)});
  const ProblemSpec prob = make_problem("unit", P, RankSum::constant(2, 1.0), two);
  const LossContext ctx(prob, q);
  Eigen::VectorXd c;
  const GalerkinSystem sys = assemble(ctx, basis_from_rank_sum(two, q, c));
  EXPECT_NEAR(sys.stiffness(0, 1), 0.0, 1e-12);
  EXPECT_NEAR(sys.stiffness(1, 0), 0.0, 1e-12);
  EXPECT_NEAR(assemble(ctx, BasisBank::unit(2, q)).load(0), 0.0, 1e-12);
}

TEST(Galerkin, MatchesConvolutionFormula) {
  const Quadrature1D q = build_grid(100, 4);
  const auto P = ProjectionMatrix::row({1.0, pi});
  const RankSum A = sum_of(2, FactorKind::Cosine, 6.0);
  const ProblemSpec prob = make_problem("ex2", P, A, sum_of(2, FactorKind::Sine));
  const LossContext ctx(prob, q);
  RankSum modes(2);
  modes.add_term(1.0, {Factor1D::sine(1), Factor1D::constant()});
  modes.add_term(1.0, {Factor1D::cosine(1), Factor1D::sine(2)});
  modes.add_term(1.0, {Factor1D::sine(3), Factor1D::cosine(1)});
  modes.add_term(1.0, {Factor1D::constant(), Factor1D::sine(2)});
  Eigen::VectorXd c;
  const GalerkinSystem sys = assemble(ctx, basis_from_rank_sum(modes, q, c));
  const FourierSeries Ah = to_fourier(A), Fh = to_fourier(prob.F);
  for (int m = 0; m < 4; ++m) {
    const FourierSeries fm = to_fourier(single(1.0, modes.terms[m].factors));
    Complex load{};
    for (const auto& [k, v] : Fh.coeffs) load += v * std::conj(fm.coeff(k));
    EXPECT_NEAR(sys.load(m), load.real(), 1e-10);
    for (int n = 0; n < 4; ++n) {
      const FourierSeries fn = to_fourier(single(1.0, modes.terms[n].factors));
      EXPECT_NEAR(sys.stiffness(m, n), bilinear_form(Ah, fn, fm, P).real(), 1e-10);
    }
  }
}

TEST(Galerkin, RidgeSolveExamples) {
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(5, -1.0, 3.0);
  EXPECT_TRUE(ridge_solve({Eigen::MatrixXd::Identity(5, 5), b}, 0.0).isApprox(b, 1e-15));
  EXPECT_TRUE(ridge_solve({Eigen::MatrixXd::Zero(5, 5), b}, 1e-5).isApprox(b * 1e5, 1e-12));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  const Eigen::MatrixXd X = Eigen::MatrixXd::NullaryExpr(20, 20, [&] { return g(rng); });
  const GalerkinSystem sys{X * X.transpose() + 0.1 * Eigen::MatrixXd::Identity(20, 20),
                           Eigen::VectorXd::NullaryExpr(20, [&] { return g(rng); })};
  const Eigen::VectorXd c = ridge_solve(sys);
  const Eigen::MatrixXd K = sys.stiffness + 1e-5 * Eigen::MatrixXd::Identity(20, 20);
  EXPECT_LE((K * c - sys.load).norm(), 1e-10 * sys.load.norm());
  EXPECT_THROW(ridge_solve({-Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Ones(3)}), std::runtime_error);
}

TEST(Galerkin, TnnSubspaceOptimality) {
  const Quadrature1D q = build_grid(100, 4);
  const auto P = ProjectionMatrix::row({1.0, kSqrt2});
  const ProblemSpec prob = make_problem("ex1", P, sum_of(2, FactorKind::Cosine, 6.0), sum_of(2, FactorKind::Sine));
  const LossContext ctx(prob, q);
  TNNShape shape;
  shape.p = 20;
  const TNNParams tnn = normalize(init_tnn(2, shape, 11), q);
  const BasisBank B = normalized_basis(tnn, q);
  const GalerkinSystem sys = assemble(ctx, B);
  const double asym = (sys.stiffness - sys.stiffness.transpose()).cwiseAbs().maxCoeff();
  EXPECT_LE(asym, 1e-12 * sys.stiffness.cwiseAbs().maxCoeff());
  const Eigen::VectorXd c = ridge_solve(sys, 0.0);
  const double L = ritz_loss(ctx, B, c);
  EXPECT_NEAR(L, -0.5 * c.dot(sys.stiffness * c), 1e-10 * std::abs(L));
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int t = 0; t < 50; ++t) {
    const Eigen::VectorXd delta = 1e-3 * Eigen::VectorXd::NullaryExpr(20, [&] { return g(rng); });
    EXPECT_GE(ritz_loss(ctx, B, c + delta), L - 1e-12);
  }
}

TEST(Losses, ContractionAgreesWithClosedForm) {
  const Quadrature1D q = build_grid(100, 4);
  const auto P = ProjectionMatrix::row({1.0, kSqrt2});
  const ProblemSpec prob = make_problem("ex1", P, sum_of(2, FactorKind::Cosine, 6.0), sum_of(2, FactorKind::Sine));
  const LossContext ctx(prob, q);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 5; ++t) {
    const RankSum V = random_trig(rng, 2, 4, 3);
    Eigen::VectorXd c;
    const BasisBank B = basis_from_rank_sum(V, q, c);
    const double rc = ritz_loss(V, prob, q), rb = ritz_loss(ctx, B, c);
    EXPECT_NEAR(rb, rc, 1e-10 * std::max(1.0, std::abs(rc)));
    const double sc = residual_loss(V, prob, q), sb = residual_loss(ctx, B, c);
    EXPECT_NEAR(sb, sc, 1e-9 * std::max(1.0, std::abs(sc)));
  }
  EXPECT_LE(residual_loss(*prob.exact_U, prob, q), 1e-20);
}

TEST(Losses, RitzAndResidualGradientsAgainstFiniteDifferences) {
  const Quadrature1D q = build_grid(10, 4);
  const auto P = ProjectionMatrix::row({1.0, pi});
  const ProblemSpec prob = make_problem("ex2", P, sum_of(2, FactorKind::Cosine, 6.0), sum_of(2, FactorKind::Sine));
  const LossContext ctx(prob, q);
  std::mt19937_64 rng(6);
  BasisBank B = random_basis(rng, 2, 3, q.size());
  const Eigen::VectorXd c = Eigen::VectorXd::Random(3);
  for (LossKind kind : {LossKind::Ritz, LossKind::Residual}) {
    BasisSamples g = BasisBank::zeros_like(B);
    loss(kind, ctx, B, c, &g);
    for (int l = 0; l < 2; ++l)
      for (int r = 0; r < 3; ++r) {
        double& x = B.samples[l][r](1, 7);
        const double keep = x, h = 1e-3;
        x = keep + h;
        const double up = loss(kind, ctx, B, c);
        x = keep - h;
        const double down = loss(kind, ctx, B, c);
        x = keep;
        const double fd = (up - down) / (2 * h);
        EXPECT_NEAR(g[l][r](1, 7), fd, 1e-6 * std::max(1.0, std::abs(fd)));
      }
  }
}
