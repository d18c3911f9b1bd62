// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "quasitnn/fourier_field.hpp"
#include "quasitnn/frequency_lattice.hpp"

#include <Eigen/Dense>
#include <iosfwd>
#include <utility>
#include <vector>

namespace quasitnn {

/// Modes k with 0 < |k|_2 <= K, sorted by |k| and then lexicographically.
std::vector<MultiIndex> ball_modes(int n, double K);

/// C_{kl} = A_{k-l} (2 pi)^2 (Pk).(Pl) and rhs F_k over ball_modes(n, K).
struct SpectralSystem {
  std::vector<MultiIndex> modes;
  Eigen::MatrixXcd matrix;
  Eigen::VectorXcd rhs;
};

/// Throws std::invalid_argument when the ball holds more than max_modes modes.
SpectralSystem assemble_spectral(const FourierSeries& A, const FourierSeries& F, const ProjectionMatrix& P,
                                 double K, std::size_t max_modes = 4000);

/// Galerkin solution on the ball. Throws std::runtime_error("singular system")
/// when the Hermitian matrix is not positive definite.
FourierSeries solve_truncated(const FourierSeries& A, const FourierSeries& F, const ProjectionMatrix& P,
                              double K);

/// U_k = F_k / (A0 (2 pi)^2 |Pk|^2). Throws std::domain_error("near-resonant mode ...")
/// when a supported mode has |Pk| < 1e-12, std::invalid_argument for a nonzero mean.
FourierSeries constant_coeff_solve(double A0, const FourierSeries& F, const ProjectionMatrix& P);

/// (K, ||U - truncate(U, K)||) for every K.
std::vector<std::pair<double, double>> measure_truncation_decay(const FourierSeries& U,
                                                                const std::vector<double>& Ks,
                                                                const SpaceTag& tag,
                                                                const ProjectionMatrix* P = nullptr);

/// Least-squares slope of log(error) against log(K) over points with error > 0.
double fit_decay_rate(const std::vector<std::pair<double, double>>& decay);

/// a(U, V) = sum_{k,l} U_l conj(V_k) (2 pi)^2 (Pk).(Pl) A_{k-l}.
Complex bilinear_form(const FourierSeries& A, const FourierSeries& U, const FourierSeries& V,
                      const ProjectionMatrix& P);

/// div_P(A grad_P U) as a series (exact convolution).
FourierSeries apply_operator(const FourierSeries& A, const FourierSeries& U, const ProjectionMatrix& P);

struct ConditionPoint {
  double K = 0.0;
  std::size_t modes = 0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double condition = 0.0;
};

std::vector<ConditionPoint> conditioning_report(const FourierSeries& A, const ProjectionMatrix& P,
                                                const std::vector<double>& Ks);
/// CSV with header K,modes,lambda_min,lambda_max,cond.
void write_conditioning_csv(std::ostream& os, const std::vector<ConditionPoint>& report);

/// ||div_P(A0 grad_P e_k)||^2 / sum_i ||Y_i e_k||^2 for constant A0, computed from
/// the operator applied to the single mode e_k.
double residual_blindspot_ratio(double A0, const ProjectionMatrix& P, const MultiIndex& k);

}  // namespace quasitnn
