// SPDX-License-Identifier: Apache-2.0
#include "quasitnn/frequency_lattice.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace quasitnn {

ProjectionMatrix::ProjectionMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.cols() < entries_.rows())
    throw std::invalid_argument("ProjectionMatrix: need n >= d >= 1, got d=" +
                                std::to_string(entries_.rows()) +
                                " n=" + std::to_string(entries_.cols()));
  if (!entries_.allFinite()) throw std::invalid_argument("ProjectionMatrix: non-finite entry");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(entries_ * entries_.transpose());
  c_lambda_ = std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

ProjectionMatrix ProjectionMatrix::row(const std::vector<double>& columns) {
  Eigen::MatrixXd m(1, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) m(0, static_cast<Eigen::Index>(j)) = columns[j];
  return ProjectionMatrix(std::move(m));
}

Eigen::VectorXd projected_frequency(const ProjectionMatrix& P, const MultiIndex& k) {
  if (static_cast<int>(k.size()) != P.n())
    throw std::invalid_argument("projected_frequency: index length " + std::to_string(k.size()) +
                                " != n=" + std::to_string(P.n()));
  Eigen::VectorXd out = Eigen::VectorXd::Zero(P.d());
  for (int m = 0; m < P.n(); ++m)
    if (k[m] != 0) out += P.entries().col(m) * static_cast<double>(k[m]);
  return out;
}

SmallFrequency min_projected_magnitude(const ProjectionMatrix& P, int K) {
  if (K < 1) throw std::invalid_argument("min_projected_magnitude: K must be >= 1");
  SmallFrequency best;
  best.magnitude = std::numeric_limits<double>::infinity();
  // Half box in lexicographic order: the strict comparison keeps the first
  // (lexicographically smallest) canonical representative among exact ties.
  for_each_half_box(P.n(), K, [&](const MultiIndex& k) {
    const double v = projected_frequency(P, k).norm();
    if (v < best.magnitude) {
      best.magnitude = v;
      best.k = k;
    }
  });
  return best;
}

double estimate_diophantine_constant(const ProjectionMatrix& P, int K, double tau) {
  if (K < 1) throw std::invalid_argument("estimate_diophantine_constant: K must be >= 1");
  double best = std::numeric_limits<double>::infinity();
  for_each_half_box(P.n(), K, [&](const MultiIndex& k) {
    double k2 = 0.0;
    for (int c : k) k2 += static_cast<double>(c) * c;
    const double v = projected_frequency(P, k).norm() * std::pow(std::sqrt(k2), tau);
    best = std::min(best, v);
  });
  return best;
}

IndependenceCertificate certify_rational_independence(const ProjectionMatrix& P, int K,
                                                      std::uint64_t max_points,
                                                      double threshold) {
  int radius = K;
  while (radius > 1) {
    const double pts = std::pow(2.0 * radius + 1.0, P.n());
    if (pts <= static_cast<double>(max_points)) break;
    --radius;
  }
  IndependenceCertificate cert;
  cert.K = radius;
  cert.min_magnitude = min_projected_magnitude(P, radius).magnitude;
  cert.independent = cert.min_magnitude > threshold;
  return cert;
}

}  // namespace quasitnn
