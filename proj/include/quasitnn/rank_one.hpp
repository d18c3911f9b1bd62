// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "quasitnn/fourier_field.hpp"
#include "quasitnn/frequency_lattice.hpp"
#include "quasitnn/quadrature.hpp"

#include <memory>
#include <vector>

namespace quasitnn {

enum class FactorKind { Constant, Cosine, Sine, Sampled };

/// Grid samples of a univariate function and of its derivatives:
/// derivs[r][j] = f^{(r)}(node_j).
struct FactorSamples1D {
  std::vector<std::vector<double>> derivs;
  int max_order() const { return static_cast<int>(derivs.size()) - 1; }
};

/// A univariate, period-one factor. Trig kinds evaluate cos/sin(2 pi f y + phase);
/// the constant kind is identically one (scales live in term coefficients);
/// the sampled kind only exists on a quadrature grid.
struct Factor1D {
  FactorKind kind = FactorKind::Constant;
  int frequency = 0;
  double phase = 0.0;
  std::shared_ptr<const FactorSamples1D> samples;

  static Factor1D constant() { return {}; }
  static Factor1D cosine(int f, double phase = 0.0) { return {FactorKind::Cosine, f, phase, nullptr}; }
  static Factor1D sine(int f, double phase = 0.0) { return {FactorKind::Sine, f, phase, nullptr}; }
  static Factor1D sampled(std::shared_ptr<const FactorSamples1D> s) {
    return {FactorKind::Sampled, 0, 0.0, std::move(s)};
  }

  bool closed_form() const { return kind != FactorKind::Sampled; }
  /// r-th derivative at y. Throws for sampled factors.
  double eval(double y, int order = 0) const;
  /// r-th derivative on the grid nodes.
  std::vector<double> sample(const Quadrature1D& q, int order = 0) const;
};

/// Structural equality (kind, frequency, phase within tol; sampled by identity).
bool same_factor(const Factor1D& a, const Factor1D& b, double tol = 1e-13);

struct RankOneTerm {
  double coeff = 0.0;
  std::vector<Factor1D> factors;
};

/// sum_e coeff_e prod_i factor_{i,e}(y_i) on T^dim.
struct RankSum {
  int dim = 0;
  std::vector<RankOneTerm> terms;

  explicit RankSum(int n = 0) : dim(n) {}
  static RankSum constant(int n, double value);

  void add_term(double coeff, std::vector<Factor1D> factors);
  std::size_t rank() const { return terms.size(); }
  bool closed_form() const;
};

RankSum operator+(const RankSum& a, const RankSum& b);
RankSum operator*(double s, const RankSum& a);
/// Pointwise product; trig factors in the same coordinate are expanded with
/// product-to-sum identities. Closed-form inputs only.
RankSum multiply(const RankSum& a, const RankSum& b);
/// Canonical trig factors, like terms merged, exact zeros removed.
RankSum simplify(const RankSum& r);

double eval(const RankSum& R, const std::vector<double>& y);

/// d/dy_m R.
RankSum partial(const RankSum& R, int m);
/// Y_i R = sum_m P_{i,m} d/dy_m R for i = 0..d-1.
std::vector<RankSum> directional_gradient(const RankSum& R, const ProjectionMatrix& P);

/// F = -div(P^T A P grad U) = -(A Lap_P U + grad_P A . grad_P U), expanded to a
/// closed-form rank sum with zero mean.
RankSum build_manufactured_source(const RankSum& A, const RankSum& U, const ProjectionMatrix& P);

/// int_{T^n} R1 R2 dy by products of 1-D composite Gauss integrals.
double l2_inner_product(const RankSum& R1, const RankSum& R2, const Quadrature1D& q);
/// int_{T^n} W R1 R2 dy.
double weighted_inner_product(const RankSum& W, const RankSum& R1, const RankSum& R2,
                              const Quadrature1D& q);
/// a(V1, V2) = sum_i int A (Y_i V1)(Y_i V2) for closed-form inputs.
double energy_inner_product(const RankSum& A, const RankSum& V1, const RankSum& V2,
                            const ProjectionMatrix& P, const Quadrature1D& q);
double mean_value(const RankSum& R, const Quadrature1D& q);

/// Exact Fourier coefficients of a closed-form rank sum.
FourierSeries to_fourier(const RankSum& R);
/// Real (Hermitian) series as a closed-form rank sum.
RankSum from_fourier(const FourierSeries& U);

}  // namespace quasitnn
