// SPDX-License-Identifier: Apache-2.0
#include "quasitnn/rank_one.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace quasitnn {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kSnap = 1e-13;

// A factor multiplied by a scalar.
struct Scaled {
  double scale;
  Factor1D factor;
};

// Phase folded to (-pi, pi].
double wrap_phase(double phase) {
  double r = std::remainder(phase, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

// Rewrites cos(2 pi f y + phase) with f >= 0 in canonical form.
Scaled canonical_cosine(int f, double phase) {
  if (f < 0) {
    f = -f;
    phase = -phase;
  }
  if (f == 0) return {std::cos(phase), Factor1D::constant()};
  phase = wrap_phase(phase);
  if (std::abs(phase) < kSnap) return {1.0, Factor1D::cosine(f)};
  if (std::abs(std::abs(phase) - kPi) < kSnap) return {-1.0, Factor1D::cosine(f)};
  if (std::abs(phase + 0.5 * kPi) < kSnap) return {1.0, Factor1D::sine(f)};
  if (std::abs(phase - 0.5 * kPi) < kSnap) return {-1.0, Factor1D::sine(f)};
  return {1.0, Factor1D::cosine(f, phase)};
}

// Phase of the factor written as a cosine.
double cosine_phase(const Factor1D& f) {
  return f.kind == FactorKind::Sine ? f.phase - 0.5 * kPi : f.phase;
}

Scaled canonical(const Factor1D& f) {
  if (!f.closed_form() || f.kind == FactorKind::Constant) return {1.0, f};
  return canonical_cosine(f.frequency, cosine_phase(f));
}

std::vector<Scaled> factor_product(const Factor1D& a, const Factor1D& b) {
  if (!a.closed_form() || !b.closed_form())
    throw std::invalid_argument("multiply: sampled factors are not closed-form");
  if (a.kind == FactorKind::Constant) return {{1.0, b}};
  if (b.kind == FactorKind::Constant) return {{1.0, a}};
  const double pa = cosine_phase(a), pb = cosine_phase(b);
  Scaled s1 = canonical_cosine(a.frequency + b.frequency, pa + pb);
  Scaled s2 = canonical_cosine(a.frequency - b.frequency, pa - pb);
  s1.scale *= 0.5;
  s2.scale *= 0.5;
  return {s1, s2};
}

// First derivative of a closed-form factor as a scaled factor.
Scaled factor_derivative(const Factor1D& f) {
  switch (f.kind) {
    case FactorKind::Constant:
      return {0.0, Factor1D::constant()};
    case FactorKind::Cosine:
      return {-kTwoPi * f.frequency, Factor1D::sine(f.frequency, f.phase)};
    case FactorKind::Sine:
      return {kTwoPi * f.frequency, Factor1D::cosine(f.frequency, f.phase)};
    case FactorKind::Sampled: {
      if (f.samples->max_order() < 1)
        throw std::invalid_argument("derivative: sampled factor has no stored derivative");
      auto shifted = std::make_shared<FactorSamples1D>();
      shifted->derivs.assign(f.samples->derivs.begin() + 1, f.samples->derivs.end());
      return {1.0, Factor1D::sampled(std::move(shifted))};
    }
  }
  return {0.0, f};
}

void check_same_dim(const RankSum& a, const RankSum& b, const char* what) {
  if (a.dim != b.dim) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}
}  // namespace

double Factor1D::eval(double y, int order) const {
  switch (kind) {
    case FactorKind::Constant:
      return order == 0 ? 1.0 : 0.0;
    case FactorKind::Cosine:
    case FactorKind::Sine: {
      const double w = kTwoPi * frequency;
      // d^r/dy^r cos(wy + p) = w^r cos(wy + p + r pi/2)
      const double base = kind == FactorKind::Cosine ? phase : phase - 0.5 * kPi;
      return std::pow(w, order) * std::cos(w * y + base + 0.5 * kPi * order);
    }
    case FactorKind::Sampled:
      break;
  }
  throw std::invalid_argument("Factor1D::eval: sampled factors only exist on their grid");
}

std::vector<double> Factor1D::sample(const Quadrature1D& q, int order) const {
  if (kind == FactorKind::Sampled) {
    if (order > samples->max_order())
      throw std::invalid_argument("Factor1D::sample: derivative order not stored");
    const auto& v = samples->derivs[order];
    if (v.size() != q.size()) throw std::invalid_argument("Factor1D::sample: grid size mismatch");
    return v;
  }
  std::vector<double> out(q.size());
  for (std::size_t j = 0; j < q.size(); ++j) out[j] = eval(q.nodes[j], order);
  return out;
}

bool same_factor(const Factor1D& a, const Factor1D& b, double tol) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case FactorKind::Constant:
      return true;
    case FactorKind::Sampled:
      return a.samples == b.samples;
    default:
      return a.frequency == b.frequency && std::abs(wrap_phase(a.phase - b.phase)) <= tol;
  }
}

RankSum RankSum::constant(int n, double value) {
  RankSum r(n);
  r.add_term(value, std::vector<Factor1D>(n));
  return r;
}

void RankSum::add_term(double coeff, std::vector<Factor1D> factors) {
  if (static_cast<int>(factors.size()) != dim)
    throw std::invalid_argument("RankSum::add_term: expected " + std::to_string(dim) + " factors");
  terms.push_back({coeff, std::move(factors)});
}

bool RankSum::closed_form() const {
  for (const auto& t : terms)
    for (const auto& f : t.factors)
      if (!f.closed_form()) return false;
  return true;
}

RankSum operator+(const RankSum& a, const RankSum& b) {
  check_same_dim(a, b, "RankSum +");
  RankSum out = a;
  out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
  return out;
}

RankSum operator*(double s, const RankSum& a) {
  RankSum out = a;
  for (auto& t : out.terms) t.coeff *= s;
  return out;
}

RankSum multiply(const RankSum& a, const RankSum& b) {
  check_same_dim(a, b, "multiply");
  RankSum out(a.dim);
  for (const auto& ta : a.terms) {
    for (const auto& tb : b.terms) {
      // Cartesian expansion over per-coordinate product-to-sum splits.
      std::vector<RankOneTerm> partial{{ta.coeff * tb.coeff, {}}};
      for (int i = 0; i < a.dim; ++i) {
        const auto pieces = factor_product(ta.factors[i], tb.factors[i]);
        std::vector<RankOneTerm> next;
        next.reserve(partial.size() * pieces.size());
        for (const auto& p : partial) {
          for (const auto& piece : pieces) {
            if (piece.scale == 0.0) continue;
            RankOneTerm t{p.coeff * piece.scale, p.factors};
            t.factors.push_back(piece.factor);
            next.push_back(std::move(t));
          }
        }
        partial = std::move(next);
      }
      for (auto& t : partial) out.terms.push_back(std::move(t));
    }
  }
  return simplify(out);
}

RankSum simplify(const RankSum& r) {
  RankSum out(r.dim);
  for (const auto& t : r.terms) {
    RankOneTerm c{t.coeff, {}};
    c.factors.reserve(t.factors.size());
    for (const auto& f : t.factors) {
      Scaled s = canonical(f);
      c.coeff *= s.scale;
      c.factors.push_back(s.factor);
    }
    if (c.coeff == 0.0) continue;
    bool merged = false;
    for (auto& o : out.terms) {
      bool same = true;
      for (int i = 0; i < r.dim && same; ++i) same = same_factor(o.factors[i], c.factors[i]);
      if (same) {
        o.coeff += c.coeff;
        merged = true;
        break;
      }
    }
    if (!merged) out.terms.push_back(std::move(c));
  }
  std::erase_if(out.terms, [](const RankOneTerm& t) { return t.coeff == 0.0; });
  return out;
}

double eval(const RankSum& R, const std::vector<double>& y) {
  if (static_cast<int>(y.size()) != R.dim) throw std::invalid_argument("eval: point has wrong dimension");
  double acc = 0.0;
  for (const auto& t : R.terms) {
    double v = t.coeff;
    for (int i = 0; i < R.dim && v != 0.0; ++i) v *= t.factors[i].eval(y[i]);
    acc += v;
  }
  return acc;
}

RankSum partial(const RankSum& R, int m) {
  if (m < 0 || m >= R.dim) throw std::invalid_argument("partial: coordinate out of range");
  RankSum out(R.dim);
  for (const auto& t : R.terms) {
    Scaled d = factor_derivative(t.factors[m]);
    if (d.scale == 0.0) continue;
    RankOneTerm nt = t;
    nt.coeff *= d.scale;
    nt.factors[m] = d.factor;
    out.terms.push_back(std::move(nt));
  }
  return out;
}

std::vector<RankSum> directional_gradient(const RankSum& R, const ProjectionMatrix& P) {
  if (P.n() != R.dim) throw std::invalid_argument("directional_gradient: P has wrong column count");
  std::vector<RankSum> partials;
  partials.reserve(R.dim);
  for (int m = 0; m < R.dim; ++m) partials.push_back(partial(R, m));
  std::vector<RankSum> out;
  out.reserve(P.d());
  for (int i = 0; i < P.d(); ++i) {
    RankSum yi(R.dim);
    for (int m = 0; m < R.dim; ++m)
      if (P(i, m) != 0.0) yi = yi + P(i, m) * partials[m];
    out.push_back(R.closed_form() ? simplify(yi) : yi);
  }
  return out;
}

RankSum build_manufactured_source(const RankSum& A, const RankSum& U, const ProjectionMatrix& P) {
  if (!A.closed_form() || !U.closed_form())
    throw std::invalid_argument("build_manufactured_source: closed-form inputs required");
  check_same_dim(A, U, "build_manufactured_source");
  const auto grad_a = directional_gradient(A, P);
  const auto grad_u = directional_gradient(U, P);
  RankSum lap(U.dim);
  for (int i = 0; i < P.d(); ++i) lap = lap + directional_gradient(grad_u[i], P)[i];
  RankSum flux = multiply(A, simplify(lap));
  for (int i = 0; i < P.d(); ++i) flux = flux + multiply(grad_a[i], grad_u[i]);
  RankSum F = simplify(-1.0 * flux);

  double scale = 0.0, mean = 0.0;
  for (const auto& t : F.terms) {
    scale = std::max(scale, std::abs(t.coeff));
    bool constant = true;
    for (const auto& f : t.factors) constant = constant && f.kind == FactorKind::Constant;
    if (constant) mean += t.coeff;
  }
  if (std::abs(mean) > 1e-12 * std::max(1.0, scale))
    throw std::logic_error("build_manufactured_source: source has nonzero mean");
  std::erase_if(F.terms, [](const RankOneTerm& t) {
    for (const auto& f : t.factors)
      if (f.kind != FactorKind::Constant) return false;
    return true;
  });
  return F;
}

namespace {
// Grid samples of every factor of every term, per coordinate.
std::vector<std::vector<std::vector<double>>> sample_terms(const RankSum& R, const Quadrature1D& q) {
  std::vector<std::vector<std::vector<double>>> out(R.terms.size());
  for (std::size_t e = 0; e < R.terms.size(); ++e) {
    out[e].reserve(R.dim);
    for (const auto& f : R.terms[e].factors) out[e].push_back(f.sample(q));
  }
  return out;
}
}  // namespace

double weighted_inner_product(const RankSum& W, const RankSum& R1, const RankSum& R2,
                              const Quadrature1D& q) {
  check_same_dim(R1, R2, "weighted_inner_product");
  check_same_dim(W, R1, "weighted_inner_product");
  const auto sw = sample_terms(W, q);
  const auto s1 = sample_terms(R1, q);
  const auto s2 = sample_terms(R2, q);
  const std::size_t N = q.size();
  // Sorted summation keeps the result bit-symmetric in R1, R2.
  std::vector<double> pairs;
  pairs.reserve(W.terms.size() * R1.terms.size() * R2.terms.size());
  for (std::size_t a = 0; a < W.terms.size(); ++a) {
    for (std::size_t e = 0; e < R1.terms.size(); ++e) {
      for (std::size_t m = 0; m < R2.terms.size(); ++m) {
        double prod = W.terms[a].coeff * (R1.terms[e].coeff * R2.terms[m].coeff);
        for (int i = 0; i < R1.dim && prod != 0.0; ++i) {
          const auto& fw = sw[a][i];
          const auto& f1 = s1[e][i];
          const auto& f2 = s2[m][i];
          double s = 0.0;
          for (std::size_t j = 0; j < N; ++j) s += q.weights[j] * fw[j] * (f1[j] * f2[j]);
          prod *= s;
        }
        pairs.push_back(prod);
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  double acc = 0.0;
  for (double v : pairs) acc += v;
  return acc;
}

double l2_inner_product(const RankSum& R1, const RankSum& R2, const Quadrature1D& q) {
  return weighted_inner_product(RankSum::constant(R1.dim, 1.0), R1, R2, q);
}

double energy_inner_product(const RankSum& A, const RankSum& V1, const RankSum& V2,
                            const ProjectionMatrix& P, const Quadrature1D& q) {
  const auto g1 = directional_gradient(V1, P);
  const auto g2 = directional_gradient(V2, P);
  double acc = 0.0;
  for (int i = 0; i < P.d(); ++i) acc += weighted_inner_product(A, g1[i], g2[i], q);
  return acc;
}

double mean_value(const RankSum& R, const Quadrature1D& q) {
  return l2_inner_product(R, RankSum::constant(R.dim, 1.0), q);
}

FourierSeries to_fourier(const RankSum& R) {
  if (!R.closed_form()) throw std::invalid_argument("to_fourier: closed-form input required");
  FourierSeries out(R.dim, false);
  for (const auto& t : R.terms) {
    // Per-coordinate 1-D coefficient lists.
    std::vector<std::vector<std::pair<int, Complex>>> one_d;
    one_d.reserve(R.dim);
    for (const auto& f : t.factors) {
      if (f.kind == FactorKind::Constant) {
        one_d.push_back({{0, Complex{1.0, 0.0}}});
        continue;
      }
      const double ph = cosine_phase(f);
      if (f.frequency == 0) {
        one_d.push_back({{0, Complex{std::cos(ph), 0.0}}});
        continue;
      }
      const Complex c = 0.5 * std::polar(1.0, ph);
      one_d.push_back({{f.frequency, c}, {-f.frequency, std::conj(c)}});
    }
    std::vector<std::pair<MultiIndex, Complex>> acc{{MultiIndex{}, Complex{t.coeff, 0.0}}};
    for (const auto& list : one_d) {
      std::vector<std::pair<MultiIndex, Complex>> next;
      for (const auto& [k, v] : acc) {
        for (const auto& [f, c] : list) {
          MultiIndex nk = k;
          nk.push_back(f);
          next.emplace_back(std::move(nk), v * c);
        }
      }
      acc = std::move(next);
    }
    for (auto& [k, v] : acc) out.coeffs[k] += v;
  }
  out.real_valued = true;
  return out;
}

namespace {
// Terms of cos / sin(sum_{i in coords} 2 pi k_i y_i + phase) as products.
void expand_trig(const MultiIndex& k, const std::vector<int>& coords, std::size_t pos, double phase,
                 bool want_sine, double coeff, std::vector<Factor1D>& factors, RankSum& out) {
  const int i = coords[pos];
  if (pos + 1 == coords.size()) {
    factors[i] = want_sine ? Factor1D::sine(k[i], phase) : Factor1D::cosine(k[i], phase);
    out.add_term(coeff, factors);
    factors[i] = Factor1D::constant();
    return;
  }
  // cos(a + r) = cos a cos r - sin a sin r ; sin(a + r) = sin a cos r + cos a sin r
  factors[i] = want_sine ? Factor1D::sine(k[i], phase) : Factor1D::cosine(k[i], phase);
  expand_trig(k, coords, pos + 1, 0.0, false, coeff, factors, out);
  factors[i] = want_sine ? Factor1D::cosine(k[i], phase) : Factor1D::sine(k[i], phase);
  expand_trig(k, coords, pos + 1, 0.0, true, want_sine ? coeff : -coeff, factors, out);
  factors[i] = Factor1D::constant();
}
}  // namespace

RankSum from_fourier(const FourierSeries& U) {
  if (!U.is_hermitian(1e-12)) throw std::invalid_argument("from_fourier: series is not real-valued");
  RankSum out(U.dim);
  for (const auto& [k, v] : U.coeffs) {
    std::vector<int> coords;
    for (int i = 0; i < U.dim; ++i)
      if (k[i] != 0) coords.push_back(i);
    if (coords.empty()) {
      if (v.real() != 0.0) out.add_term(v.real(), std::vector<Factor1D>(U.dim));
      continue;
    }
    if (k[coords.front()] < 0) continue;  // represented by its conjugate partner
    if (std::abs(v) == 0.0) continue;
    std::vector<Factor1D> factors(U.dim);
    expand_trig(k, coords, 0, std::arg(v), false, 2.0 * std::abs(v), factors, out);
  }
  return simplify(out);
}

}  // namespace quasitnn
