// SPDX-License-Identifier: Apache-2.0
#include "quasitnn/fourier_field.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace quasitnn {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_zero_index(const MultiIndex& k) {
  for (int c : k)
    if (c != 0) return false;
  return true;
}

void check_dim(const FourierSeries& U, std::size_t len, const char* what) {
  if (static_cast<std::size_t>(U.dim) != len)
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}
}  // namespace

double euclidean_norm(const MultiIndex& k) {
  double s = 0.0;
  for (int c : k) s += static_cast<double>(c) * c;
  return std::sqrt(s);
}

MultiIndex negate(const MultiIndex& k) {
  MultiIndex out(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) out[i] = -k[i];
  return out;
}

Complex FourierSeries::coeff(const MultiIndex& k) const {
  auto it = coeffs.find(k);
  return it == coeffs.end() ? Complex{} : it->second;
}

void FourierSeries::add(const MultiIndex& k, Complex v) {
  if (static_cast<int>(k.size()) != dim) throw std::invalid_argument("FourierSeries::add: bad index");
  coeffs[k] += v;
  if (real_valued && !is_zero_index(k)) coeffs[negate(k)] += std::conj(v);
}

bool FourierSeries::is_hermitian(double tol) const {
  for (const auto& [k, v] : coeffs)
    if (std::abs(coeff(negate(k)) - std::conj(v)) > tol) return false;
  return true;
}

FourierSeries operator+(const FourierSeries& a, const FourierSeries& b) {
  if (a.dim != b.dim) throw std::invalid_argument("FourierSeries: dimension mismatch");
  FourierSeries out = a;
  out.real_valued = a.real_valued && b.real_valued;
  for (const auto& [k, v] : b.coeffs) out.coeffs[k] += v;
  return out;
}

FourierSeries operator*(double s, const FourierSeries& a) {
  FourierSeries out = a;
  for (auto& [k, v] : out.coeffs) v *= s;
  return out;
}

FourierSeries operator-(const FourierSeries& a, const FourierSeries& b) { return a + (-1.0) * b; }

Complex mean_value(const FourierSeries& U) { return U.coeff(MultiIndex(U.dim, 0)); }

double norm(const FourierSeries& U, const SpaceTag& tag, const ProjectionMatrix* P) {
  const bool projected = tag.family == SpaceFamily::H_P || tag.family == SpaceFamily::Hbar_P;
  if (projected != (P != nullptr))
    throw std::invalid_argument("norm: projection matrix must be given exactly for H_P families");
  if (P && P->n() != U.dim) throw std::invalid_argument("norm: P has wrong column count");

  double acc = 0.0;
  for (const auto& [k, v] : U.coeffs) {
    const bool zero = is_zero_index(k);
    if (zero && tag.zero_mean) {
      if (std::abs(v) != 0.0) throw std::domain_error("nonzero mean in zero-mean space");
      continue;
    }
    const double mag = projected ? projected_frequency(*P, k).norm() : euclidean_norm(k);
    double w2 = 0.0;
    switch (tag.family) {
      case SpaceFamily::H:
      case SpaceFamily::H_P:
        w2 = std::pow(1.0 + mag * mag, tag.s);
        break;
      case SpaceFamily::Hbar:
      case SpaceFamily::Hbar_P:
        if (mag == 0.0 && tag.s < 0.0) {
          if (std::abs(v) == 0.0) continue;
          throw std::domain_error("norm: homogeneous weight undefined at |Pk| = 0 for s < 0");
        }
        w2 = std::pow(mag, 2.0 * tag.s);
        break;
    }
    acc += w2 * std::norm(v);
  }
  return std::sqrt(acc);
}

FourierSeries directional_derivative(const FourierSeries& U, const std::vector<int>& alpha,
                                     const ProjectionMatrix& P) {
  if (static_cast<int>(alpha.size()) != P.d())
    throw std::invalid_argument("directional_derivative: alpha must have length d");
  check_dim(U, static_cast<std::size_t>(P.n()), "directional_derivative");
  FourierSeries out(U.dim, U.real_valued);
  for (const auto& [k, v] : U.coeffs) {
    const Eigen::VectorXd pk = projected_frequency(P, k);
    Complex mult{1.0, 0.0};
    for (int j = 0; j < P.d(); ++j)
      for (int r = 0; r < alpha[j]; ++r) mult *= Complex{0.0, kTwoPi * pk[j]};
    out.coeffs[k] = v * mult;
  }
  return out;
}

FourierSeries truncate(const FourierSeries& U, double K) {
  FourierSeries out(U.dim, U.real_valued);
  for (const auto& [k, v] : U.coeffs) {
    const double r = euclidean_norm(k);
    if (r == 0.0 || r <= K) out.coeffs.emplace(k, v);
  }
  return out;
}

Complex torus_eval(const FourierSeries& U, const std::vector<double>& y) {
  check_dim(U, y.size(), "torus_eval");
  Complex acc{};
  for (const auto& [k, v] : U.coeffs) {
    double phase = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) phase += k[i] * y[i];
    // Reduce before scaling so large |k.y| keeps full precision.
    phase -= std::floor(phase);
    acc += v * std::polar(1.0, kTwoPi * phase);
  }
  return acc;
}

Complex pullback_eval(const FourierSeries& U, const ProjectionMatrix& P,
                      const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != P.d()) throw std::invalid_argument("pullback_eval: x must have length d");
  check_dim(U, static_cast<std::size_t>(P.n()), "pullback_eval");
  Complex acc{};
  for (const auto& [k, v] : U.coeffs) {
    const Eigen::VectorXd pk = projected_frequency(P, k);
    double phase = 0.0;
    for (int j = 0; j < P.d(); ++j) phase += pk[j] * x[j];
    acc += v * std::polar(1.0, kTwoPi * phase);
  }
  return acc;
}

namespace {
void check_eta(const std::vector<double>& eta) {
  if (eta.empty()) throw std::invalid_argument("slow sequence: eta is empty");
  for (std::size_t m = 0; m < eta.size(); ++m) {
    if (!(eta[m] > 0.0)) throw std::invalid_argument("slow sequence: eta must be positive");
    if (m > 0 && eta[m] > eta[m - 1])
      throw std::invalid_argument("slow sequence: eta must be non-increasing");
  }
}
}  // namespace

FourierSeries construct_slow_sequence_on_modes(const std::vector<double>& eta, double t,
                                               const ProjectionMatrix& P,
                                               const std::vector<MultiIndex>& modes) {
  check_eta(eta);
  if (modes.size() != eta.size())
    throw std::invalid_argument("slow sequence: need one mode per eta entry");
  FourierSeries U(P.n(), false);
  for (std::size_t m = 0; m < eta.size(); ++m) {
    const double next = m + 1 < eta.size() ? eta[m + 1] : 0.0;
    const double a = eta[m] * eta[m] - next * next;
    const double pk = projected_frequency(P, modes[m]).norm();
    U.coeffs[modes[m]] = Complex{std::sqrt(a) / std::pow(pk, t), 0.0};
  }
  return U;
}

FourierSeries construct_slow_sequence(const std::vector<double>& eta, double s, double t,
                                      const ProjectionMatrix& P, const MultiIndex& ell) {
  if (s > t)
    throw std::invalid_argument(
        "construct_slow_sequence: s > t needs Diophantine modes, use construct_slow_sequence_on_modes");
  if (static_cast<int>(ell.size()) != P.n() || euclidean_norm(ell) != 1.0)
    throw std::invalid_argument("construct_slow_sequence: ell must be a unit multi-index");
  std::vector<MultiIndex> modes;
  modes.reserve(eta.size());
  for (std::size_t m = 1; m <= eta.size(); ++m) {
    MultiIndex k(ell.size());
    for (std::size_t i = 0; i < ell.size(); ++i) k[i] = static_cast<int>(m + 1) * ell[i];
    modes.push_back(std::move(k));
  }
  return construct_slow_sequence_on_modes(eta, t, P, modes);
}

void write_series(std::ostream& os, const FourierSeries& U) {
  for (const auto& [k, v] : U.coeffs) {
    for (int c : k) os << c << ' ';
    os << ' ' << std::setprecision(17) << v.real() << ' ' << v.imag() << '\n';
  }
}

FourierSeries read_series(std::istream& is, int dim, bool real_valued) {
  FourierSeries U(dim, real_valued);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    MultiIndex k(dim);
    for (int i = 0; i < dim; ++i)
      if (!(ls >> k[i])) throw std::runtime_error("read_series: malformed line: " + line);
    double re = 0.0, im = 0.0;
    if (!(ls >> re >> im)) throw std::runtime_error("read_series: malformed line: " + line);
    U.coeffs[k] = Complex{re, im};
  }
  return U;
}

}  // namespace quasitnn
