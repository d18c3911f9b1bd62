// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "quasitnn/frequency_lattice.hpp"

#include <complex>
#include <iosfwd>
#include <map>
#include <vector>

namespace quasitnn {

using Complex = std::complex<double>;

/// Finitely supported Fourier series on the unit torus T^n with basis
/// e_k(y) = exp(2 pi i k.y). Absent indices are zero.
struct FourierSeries {
  int dim = 0;
  std::map<MultiIndex, Complex> coeffs;
  bool real_valued = false;

  explicit FourierSeries(int n = 0, bool real = false) : dim(n), real_valued(real) {}

  Complex coeff(const MultiIndex& k) const;
  /// Adds v to the coefficient at k (and conj(v) at -k when real_valued and k != 0).
  void add(const MultiIndex& k, Complex v);
  /// True when coeff(-k) == conj(coeff(k)) within tol for every k.
  bool is_hermitian(double tol = 1e-14) const;
};

FourierSeries operator+(const FourierSeries& a, const FourierSeries& b);
FourierSeries operator-(const FourierSeries& a, const FourierSeries& b);
FourierSeries operator*(double s, const FourierSeries& a);

enum class SpaceFamily { H, H_P, Hbar, Hbar_P };

/// Selects one of the weighted l2 norms: weights (1+|k|^2)^{s/2},
/// (1+|Pk|^2)^{s/2}, |k|^s, |Pk|^s for H, H_P, Hbar, Hbar_P.
struct SpaceTag {
  SpaceFamily family = SpaceFamily::H;
  double s = 0.0;
  bool zero_mean = false;
};

Complex mean_value(const FourierSeries& U);

/// P must be non-null exactly for the H_P / Hbar_P families.
double norm(const FourierSeries& U, const SpaceTag& tag, const ProjectionMatrix* P = nullptr);

/// Y^alpha U, multiplying mode k by prod_j (2 pi i (Pk)_j)^{alpha_j}.
FourierSeries directional_derivative(const FourierSeries& U, const std::vector<int>& alpha,
                                     const ProjectionMatrix& P);

/// Keeps 0 < |k|_2 <= K plus the k = 0 coefficient when present.
FourierSeries truncate(const FourierSeries& U, double K);

/// U evaluated on the torus at y.
Complex torus_eval(const FourierSeries& U, const std::vector<double>& y);

/// u(x) = U(P^T x) = sum_k U_k exp(2 pi i (Pk).x).
Complex pullback_eval(const FourierSeries& U, const ProjectionMatrix& P,
                      const std::vector<double>& x);

/// Series with modes k_m = (m+1) ell, m = 1..M, and coefficients
/// sqrt(eta_m^2 - eta_{m+1}^2) / |P k_m|^t (eta_{M+1} = 0), so that
/// ||U - truncate(U, K)|| in Hbar_P^t equals eta_K for K = 1..M.
/// Requires s <= t, eta positive and non-increasing, |ell|_2 = 1.
FourierSeries construct_slow_sequence(const std::vector<double>& eta, double s, double t,
                                      const ProjectionMatrix& P, const MultiIndex& ell);

/// Variant for the s > t case: the caller supplies modes of strictly
/// increasing |k| (e.g. successive minimisers of |Pk| over growing boxes).
/// Mode j carries sqrt(eta_j^2 - eta_{j+1}^2) / |P k_j|^t.
FourierSeries construct_slow_sequence_on_modes(const std::vector<double>& eta, double t,
                                               const ProjectionMatrix& P,
                                               const std::vector<MultiIndex>& modes);

/// Text format: one line per mode, `k_1 ... k_n  re  im`.
void write_series(std::ostream& os, const FourierSeries& U);
FourierSeries read_series(std::istream& is, int dim, bool real_valued = false);

double euclidean_norm(const MultiIndex& k);
MultiIndex negate(const MultiIndex& k);

}  // namespace quasitnn
