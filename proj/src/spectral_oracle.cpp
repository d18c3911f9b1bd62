// SPDX-License-Identifier: Apache-2.0
#include "quasitnn/spectral_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace quasitnn {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void enumerate_ball(int n, int pos, double left, int bound, MultiIndex& k, std::vector<MultiIndex>& out) {
  if (pos == n) {
    if (std::any_of(k.begin(), k.end(), [](int v) { return v != 0; })) out.push_back(k);
    return;
  }
  for (int v = -bound; v <= bound; ++v) {
    const double rest = left - static_cast<double>(v) * v;
    if (rest < -1e-9) continue;
    k[pos] = v;
    enumerate_ball(n, pos + 1, rest, bound, k, out);
  }
  k[pos] = 0;
}

double norm2(const MultiIndex& k) {
  double s = 0.0;
  for (int v : k) s += static_cast<double>(v) * v;
  return s;
}

MultiIndex difference(const MultiIndex& a, const MultiIndex& b) {
  MultiIndex d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

void check_dims(const FourierSeries& A, const FourierSeries& F, const ProjectionMatrix& P) {
  if (A.dim != P.n() || F.dim != P.n()) throw std::invalid_argument("spectral: dimension mismatch");
}
}  // namespace

std::vector<MultiIndex> ball_modes(int n, double K) {
  std::vector<MultiIndex> out;
  if (K < 1.0) return out;
  MultiIndex k(n, 0);
  enumerate_ball(n, 0, K * K, static_cast<int>(std::floor(K + 1e-9)), k, out);
  std::stable_sort(out.begin(), out.end(), [](const MultiIndex& a, const MultiIndex& b) {
    const double na = norm2(a), nb = norm2(b);
    if (na != nb) return na < nb;
    return a < b;
  });
  return out;
}

SpectralSystem assemble_spectral(const FourierSeries& A, const FourierSeries& F, const ProjectionMatrix& P,
                                 double K, std::size_t max_modes) {
  check_dims(A, F, P);
  SpectralSystem sys;
  sys.modes = ball_modes(P.n(), K);
  if (sys.modes.size() > max_modes)
    throw std::invalid_argument("assemble_spectral: " + std::to_string(sys.modes.size()) +
                                " modes exceed the cap");
  const auto m = static_cast<Eigen::Index>(sys.modes.size());
  std::vector<Eigen::VectorXd> pk;
  pk.reserve(m);
  for (const auto& k : sys.modes) pk.push_back(projected_frequency(P, k));
  sys.matrix = Eigen::MatrixXcd::Zero(m, m);
  sys.rhs.resize(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    sys.rhs(a) = F.coeff(sys.modes[a]);
    for (Eigen::Index b = 0; b < m; ++b) {
      const Complex ak = A.coeff(difference(sys.modes[a], sys.modes[b]));
      if (ak == Complex{}) continue;
      sys.matrix(a, b) = ak * (kTwoPi * kTwoPi * pk[a].dot(pk[b]));
    }
  }
  return sys;
}

FourierSeries solve_truncated(const FourierSeries& A, const FourierSeries& F, const ProjectionMatrix& P,
                              double K) {
  const SpectralSystem sys = assemble_spectral(A, F, P, K);
  FourierSeries U(P.n(), A.real_valued && F.real_valued);
  if (sys.modes.empty()) return U;
  Eigen::LLT<Eigen::MatrixXcd> llt(sys.matrix);
  if (llt.info() != Eigen::Success) throw std::runtime_error("singular system");
  const Eigen::VectorXcd x = llt.solve(sys.rhs);
  for (std::size_t a = 0; a < sys.modes.size(); ++a)
    if (x(a) != Complex{}) U.coeffs[sys.modes[a]] = x(a);
  return U;
}

FourierSeries constant_coeff_solve(double A0, const FourierSeries& F, const ProjectionMatrix& P) {
  if (!(A0 > 0.0)) throw std::invalid_argument("constant_coeff_solve: A0 must be positive");
  if (F.dim != P.n()) throw std::invalid_argument("constant_coeff_solve: dimension mismatch");
  FourierSeries U(F.dim, F.real_valued);
  for (const auto& [k, v] : F.coeffs) {
    const double pk = projected_frequency(P, k).norm();
    if (std::all_of(k.begin(), k.end(), [](int x) { return x == 0; })) {
      if (v != Complex{}) throw std::invalid_argument("constant_coeff_solve: source has nonzero mean");
      continue;
    }
    if (pk < 1e-12) throw std::domain_error("near-resonant mode: |Pk| = " + std::to_string(pk));
    U.coeffs[k] = v / (A0 * kTwoPi * kTwoPi * pk * pk);
  }
  return U;
}

std::vector<std::pair<double, double>> measure_truncation_decay(const FourierSeries& U,
                                                                const std::vector<double>& Ks,
                                                                const SpaceTag& tag, const ProjectionMatrix* P) {
  std::vector<std::pair<double, double>> out;
  out.reserve(Ks.size());
  for (double K : Ks) out.emplace_back(K, norm(U - truncate(U, K), tag, P));
  return out;
}

double fit_decay_rate(const std::vector<std::pair<double, double>>& decay) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (const auto& [K, e] : decay) {
    if (!(e > 0.0) || !(K > 0.0)) continue;
    const double x = std::log(K), y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) throw std::invalid_argument("fit_decay_rate: need two positive points");
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

Complex bilinear_form(const FourierSeries& A, const FourierSeries& U, const FourierSeries& V,
                      const ProjectionMatrix& P) {
  check_dims(A, U, P);
  if (V.dim != P.n()) throw std::invalid_argument("bilinear_form: dimension mismatch");
  Complex acc{};
  for (const auto& [l, ul] : U.coeffs) {
    const Eigen::VectorXd pl = projected_frequency(P, l);
    for (const auto& [k, vk] : V.coeffs) {
      const Complex ak = A.coeff(difference(k, l));
      if (ak == Complex{}) continue;
      acc += ul * std::conj(vk) * ak * (kTwoPi * kTwoPi * projected_frequency(P, k).dot(pl));
    }
  }
  return acc;
}

FourierSeries apply_operator(const FourierSeries& A, const FourierSeries& U, const ProjectionMatrix& P) {
  check_dims(A, U, P);
  // flux_i = A * (2 pi i (Pl)_i U_l), then divergence multiplies by 2 pi i (Pk)_i
  FourierSeries out(P.n(), A.real_valued && U.real_valued);
  for (const auto& [l, ul] : U.coeffs) {
    const Eigen::VectorXd pl = projected_frequency(P, l);
    for (const auto& [m, am] : A.coeffs) {
      MultiIndex k(l.size());
      for (std::size_t i = 0; i < k.size(); ++i) k[i] = l[i] + m[i];
      const Eigen::VectorXd pk = projected_frequency(P, k);
      out.coeffs[k] += -kTwoPi * kTwoPi * pk.dot(pl) * am * ul;
    }
  }
  return out;
}

std::vector<ConditionPoint> conditioning_report(const FourierSeries& A, const ProjectionMatrix& P,
                                                const std::vector<double>& Ks) {
  std::vector<ConditionPoint> out;
  const FourierSeries zero(P.n(), true);
  for (double K : Ks) {
    const SpectralSystem sys = assemble_spectral(A, zero, P, K);
    ConditionPoint pt;
    pt.K = K;
    pt.modes = sys.modes.size();
    if (!sys.modes.empty()) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sys.matrix, Eigen::EigenvaluesOnly);
      pt.lambda_min = es.eigenvalues().minCoeff();
      pt.lambda_max = es.eigenvalues().maxCoeff();
      pt.condition = pt.lambda_max / pt.lambda_min;
    }
    out.push_back(pt);
  }
  return out;
}

void write_conditioning_csv(std::ostream& os, const std::vector<ConditionPoint>& report) {
  os << "K,modes,lambda_min,lambda_max,cond\n";
  os.precision(17);
  for (const auto& pt : report)
    os << pt.K << ',' << pt.modes << ',' << pt.lambda_min << ',' << pt.lambda_max << ',' << pt.condition << '\n';
}

double residual_blindspot_ratio(double A0, const ProjectionMatrix& P, const MultiIndex& k) {
  FourierSeries A(P.n()), V(P.n());
  A.coeffs[MultiIndex(P.n(), 0)] = A0;
  V.coeffs[k] = 1.0;
  const FourierSeries R = apply_operator(A, V, P);
  double num = 0.0;
  for (const auto& [m, v] : R.coeffs) num += std::norm(v);
  double den = 0.0;
  for (int i = 0; i < P.d(); ++i) {
    std::vector<int> alpha(P.d(), 0);
    alpha[i] = 1;
    for (const auto& [m, v] : directional_derivative(V, alpha, P).coeffs) den += std::norm(v);
  }
  return num / den;
}

}  // namespace quasitnn
