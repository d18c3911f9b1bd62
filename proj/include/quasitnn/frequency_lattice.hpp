// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace quasitnn {

/// Integer frequency vector k in Z^n.
using MultiIndex = std::vector<int>;

/// The d x n projection matrix P whose columns generate the frequency module
/// of a quasiperiodic function. Immutable once built.
class ProjectionMatrix {
 public:
  explicit ProjectionMatrix(Eigen::MatrixXd entries);

  /// Row-vector shorthand for d = 1.
  static ProjectionMatrix row(const std::vector<double>& columns);

  int d() const { return static_cast<int>(entries_.rows()); }
  int n() const { return static_cast<int>(entries_.cols()); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  double operator()(int i, int m) const { return entries_(i, m); }

  /// Largest singular value of P, so |Pk| <= c_lambda |k|.
  double c_lambda() const { return c_lambda_; }

 private:
  Eigen::MatrixXd entries_;
  double c_lambda_ = 0.0;
};

/// Pk. Throws on a length mismatch.
Eigen::VectorXd projected_frequency(const ProjectionMatrix& P, const MultiIndex& k);

struct SmallFrequency {
  MultiIndex k;
  double magnitude = 0.0;
};

/// Nonzero k with |k|_inf <= K minimising |Pk|. Ties (always present between
/// k and -k) resolve to the representative whose first nonzero component is
/// positive, then lexicographically.
SmallFrequency min_projected_magnitude(const ProjectionMatrix& P, int K);

/// min over 0 < |k|_inf <= K of |Pk| * |k|_2^tau.
double estimate_diophantine_constant(const ProjectionMatrix& P, int K, double tau);

struct IndependenceCertificate {
  int K = 0;               // box radius actually enumerated
  double min_magnitude = 0.0;
  bool independent = false;  // min |Pk| > threshold on the box
};

/// Finite-box certificate of rational independence of P's columns. The box
/// radius is reduced below K when (2K+1)^n would exceed max_points.
IndependenceCertificate certify_rational_independence(const ProjectionMatrix& P, int K = 50,
                                                      std::uint64_t max_points = 2'000'000,
                                                      double threshold = 1e-12);

/// Calls visit(k) for every k in the half box {0 < |k|_inf <= K, first nonzero
/// component positive}, in lexicographic order.
template <class Visit>
void for_each_half_box(int n, int K, Visit&& visit) {
  MultiIndex k(n, -K);
  while (true) {
    int first = 0;
    while (first < n && k[first] == 0) ++first;
    if (first < n && k[first] > 0) visit(static_cast<const MultiIndex&>(k));
    int pos = n - 1;
    while (pos >= 0 && k[pos] == K) {
      k[pos] = -K;
      --pos;
    }
    if (pos < 0) break;
    ++k[pos];
  }
}

}  // namespace quasitnn
