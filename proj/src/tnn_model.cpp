// SPDX-License-Identifier: Apache-2.0
#include "quasitnn/tnn_model.hpp"

#include <cmath>
#include <cstdlib>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace quasitnn {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinNorm = 1e-13;

// Pre-activations and activations, with first and second y-derivatives.
struct Layer {
  Eigen::ArrayXXd z, z1, z2;
  Eigen::MatrixXd h, h1, h2;
};

struct Tape {
  std::vector<Layer> layers;
  FactorValues out;
};

void activate(Layer& L) {
  const Eigen::ArrayXXd s = L.z.sin(), c = L.z.cos();
  L.h = s.matrix();
  L.h1 = (c * L.z1).matrix();
  L.h2 = (c * L.z2 - s * L.z1.square()).matrix();
}

Tape forward(const SubnetworkParams& net, const Eigen::VectorXd& y) {
  const Eigen::Index W = net.b1.size(), N = y.size();
  Tape t;
  t.layers.reserve(net.W.size() + 1);
  Layer first;
  const Eigen::VectorXd omega = kTwoPi * net.freqs.cast<double>();
  first.z = ((omega * y.transpose()).colwise() + net.b1).array();
  first.z1 = omega.replicate(1, N).array();
  first.z2 = Eigen::ArrayXXd::Zero(W, N);
  activate(first);
  t.layers.push_back(std::move(first));
  for (std::size_t k = 0; k < net.W.size(); ++k) {
    const Layer& prev = t.layers.back();
    Layer L;
    L.z = ((net.W[k] * prev.h).colwise() + net.b[k]).array();
    L.z1 = (net.W[k] * prev.h1).array();
    L.z2 = (net.W[k] * prev.h2).array();
    activate(L);
    t.layers.push_back(std::move(L));
  }
  const Layer& last = t.layers.back();
  t.out.val = (net.Wo * last.h).colwise() + net.bo;
  t.out.d1 = net.Wo * last.h1;
  t.out.d2 = net.Wo * last.h2;
  return t;
}

SubnetworkParams zero_like(const SubnetworkParams& net) {
  SubnetworkParams g;
  g.freqs = net.freqs;
  g.b1 = Eigen::VectorXd::Zero(net.b1.size());
  for (std::size_t k = 0; k < net.W.size(); ++k) {
    g.W.push_back(Eigen::MatrixXd::Zero(net.W[k].rows(), net.W[k].cols()));
    g.b.push_back(Eigen::VectorXd::Zero(net.b[k].size()));
  }
  g.Wo = Eigen::MatrixXd::Zero(net.Wo.rows(), net.Wo.cols());
  g.bo = Eigen::VectorXd::Zero(net.bo.size());
  return g;
}

// Reverse sweep for seeds on (val, d1, d2).
SubnetworkParams backward(const SubnetworkParams& net, const Tape& t, const Eigen::MatrixXd& gv,
                          const Eigen::MatrixXd& g1, const Eigen::MatrixXd& g2) {
  SubnetworkParams g = zero_like(net);
  const Layer& last = t.layers.back();
  g.Wo = gv * last.h.transpose() + g1 * last.h1.transpose() + g2 * last.h2.transpose();
  g.bo = gv.rowwise().sum();
  Eigen::MatrixXd hb = net.Wo.transpose() * gv;
  Eigen::MatrixXd hb1 = net.Wo.transpose() * g1;
  Eigen::MatrixXd hb2 = net.Wo.transpose() * g2;
  for (std::size_t k = t.layers.size(); k-- > 0;) {
    const Layer& L = t.layers[k];
    const Eigen::ArrayXXd s = L.z.sin(), c = L.z.cos();
    const Eigen::ArrayXXd a = hb.array(), a1 = hb1.array(), a2 = hb2.array();
    const Eigen::MatrixXd zb = (a * c - a1 * s * L.z1 - a2 * (c * L.z1.square() + s * L.z2)).matrix();
    if (k == 0) {
      g.b1 = zb.rowwise().sum();
      break;
    }
    const Eigen::MatrixXd zb1 = (a1 * c - 2.0 * a2 * s * L.z1).matrix();
    const Eigen::MatrixXd zb2 = (a2 * c).matrix();
    const Layer& prev = t.layers[k - 1];
    g.W[k - 1] = zb * prev.h.transpose() + zb1 * prev.h1.transpose() + zb2 * prev.h2.transpose();
    g.b[k - 1] = zb.rowwise().sum();
    hb = net.W[k - 1].transpose() * zb;
    hb1 = net.W[k - 1].transpose() * zb1;
    hb2 = net.W[k - 1].transpose() * zb2;
  }
  return g;
}

Eigen::VectorXd nodes_of(const Quadrature1D& q) {
  return Eigen::Map<const Eigen::VectorXd>(q.nodes.data(), static_cast<Eigen::Index>(q.size()));
}

Eigen::VectorXd weights_of(const Quadrature1D& q) {
  return Eigen::Map<const Eigen::VectorXd>(q.weights.data(), static_cast<Eigen::Index>(q.size()));
}

Eigen::VectorXd factor_norms(const Eigen::MatrixXd& val, const Eigen::VectorXd& w, int i) {
  Eigen::VectorXd s = (val.array().square().matrix() * w).cwiseSqrt();
  for (Eigen::Index j = 0; j < s.size(); ++j)
    if (!(s(j) > kMinNorm))
      throw std::domain_error("degenerate factor (" + std::to_string(i) + ", " + std::to_string(j) +
                              "): norm " + std::to_string(s(j)));
  return s;
}

template <class Visit>
void for_each_array(SubnetworkParams& net, Visit&& visit) {
  visit(net.b1.data(), net.b1.size());
  for (std::size_t k = 0; k < net.W.size(); ++k) {
    visit(net.W[k].data(), net.W[k].size());
    visit(net.b[k].data(), net.b[k].size());
  }
  visit(net.Wo.data(), net.Wo.size());
  visit(net.bo.data(), net.bo.size());
}

}  // namespace

TNNParams init_tnn(int n, const TNNShape& shape, std::uint64_t seed, int d) {
  if (n < 1 || shape.p < 1 || shape.width < 1 || shape.depth < 1 || shape.freq_max < 1)
    throw std::invalid_argument("init_tnn: sizes must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int W = shape.width;
  const double bound = 1.0 / std::sqrt(static_cast<double>(W));
  auto fill = [&](double* x, Eigen::Index len, double lo, double hi) {
    for (Eigen::Index k = 0; k < len; ++k) x[k] = lo + (hi - lo) * unit(rng);
  };
  TNNParams t;
  t.d = d;
  t.p = shape.p;
  for (int i = 0; i < n; ++i) {
    SubnetworkParams net;
    net.freqs.resize(W);
    for (int r = 0; r < W; ++r) net.freqs(r) = r % shape.freq_max + 1;
    net.b1.resize(W);
    fill(net.b1.data(), W, 0.0, kTwoPi);
    for (int k = 1; k < shape.depth; ++k) {
      net.W.emplace_back(W, W);
      net.b.emplace_back(W);
      fill(net.W.back().data(), net.W.back().size(), -bound, bound);
      fill(net.b.back().data(), W, -bound, bound);
    }
    net.Wo.resize(shape.p, W);
    net.bo.resize(shape.p);
    fill(net.Wo.data(), net.Wo.size(), -bound, bound);
    fill(net.bo.data(), shape.p, -bound, bound);
    t.subnets.push_back(std::move(net));
  }
  t.c = Eigen::VectorXd::Zero(shape.p);
  t.norms = Eigen::MatrixXd::Ones(n, shape.p);
  t.means = Eigen::MatrixXd::Zero(n, shape.p);
  return t;
}

FactorValues forward_factors(const SubnetworkParams& net, const Quadrature1D& q) {
  return forward(net, nodes_of(q)).out;
}

FactorValues forward_factors_at(const SubnetworkParams& net, const Eigen::VectorXd& y) {
  return forward(net, y).out;
}

TNNParams normalize(const TNNParams& tnn, const Quadrature1D& q) {
  TNNParams out = tnn;
  const Eigen::VectorXd w = weights_of(q);
  out.norms.resize(tnn.dim(), tnn.p);
  out.means.resize(tnn.dim(), tnn.p);
  for (int i = 0; i < tnn.dim(); ++i) {
    const FactorValues f = forward_factors(tnn.subnets[i], q);
    const Eigen::VectorXd s = factor_norms(f.val, w, i);
    out.norms.row(i) = s.transpose();
    out.means.row(i) = ((f.val * w).array() / s.array()).transpose();
  }
  return out;
}

BasisBank normalized_basis(const TNNParams& tnn, const Quadrature1D& q) {
  BasisBank b;
  b.dim = tnn.dim();
  b.p = tnn.p;
  const Eigen::VectorXd w = weights_of(q);
  for (int i = 0; i < tnn.dim(); ++i) {
    const FactorValues f = forward_factors(tnn.subnets[i], q);
    const Eigen::VectorXd inv = factor_norms(f.val, w, i).cwiseInverse();
    b.samples.push_back({inv.asDiagonal() * f.val, inv.asDiagonal() * f.d1, inv.asDiagonal() * f.d2});
  }
  return b;
}

RankSum zero_mean_correct(const TNNParams& tnn, const Quadrature1D& q) {
  const BasisBank b = normalized_basis(tnn, q);
  const int n = tnn.dim();
  RankSum R(n);
  double mean = 0.0;
  const Eigen::VectorXd w = weights_of(q);
  for (int j = 0; j < tnn.p; ++j) {
    std::vector<Factor1D> factors;
    double mu = tnn.c(j);
    for (int i = 0; i < n; ++i) {
      auto s = std::make_shared<FactorSamples1D>();
      for (int r = 0; r < 3; ++r) {
        const Eigen::VectorXd row = b.samples[i][r].row(j).transpose();
        s->derivs.emplace_back(row.data(), row.data() + row.size());
      }
      mu *= b.samples[i][0].row(j).dot(w);
      factors.push_back(Factor1D::sampled(std::move(s)));
    }
    mean += mu;
    R.add_term(tnn.c(j), std::move(factors));
  }
  if (mean != 0.0) R.add_term(-mean, std::vector<Factor1D>(n));
  return R;
}

double eval_torus(const TNNParams& tnn, const std::vector<double>& y) {
  const int n = tnn.dim();
  if (static_cast<int>(y.size()) != n) throw std::invalid_argument("eval_torus: point has wrong dimension");
  Eigen::ArrayXd prod = tnn.c.array();
  Eigen::ArrayXd mean = tnn.c.array();
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd yi(1);
    yi(0) = y[i] - std::floor(y[i]);
    const FactorValues f = forward_factors_at(tnn.subnets[i], yi);
    prod *= f.val.col(0).array() / tnn.norms.row(i).transpose().array();
    mean *= tnn.means.row(i).transpose().array();
  }
  return prod.sum() - mean.sum();
}

double eval_pullback(const TNNParams& tnn, const ProjectionMatrix& P, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != P.d() || P.n() != tnn.dim())
    throw std::invalid_argument("eval_pullback: dimension mismatch");
  const Eigen::VectorXd y = P.entries().transpose() * Eigen::Map<const Eigen::VectorXd>(x.data(), P.d());
  return eval_torus(tnn, std::vector<double>(y.data(), y.data() + y.size()));
}

Eigen::Index parameter_count(const TNNParams& tnn) {
  Eigen::Index count = 0;
  TNNParams& t = const_cast<TNNParams&>(tnn);
  for (auto& net : t.subnets) for_each_array(net, [&](double*, Eigen::Index len) { count += len; });
  return count;
}

Eigen::VectorXd flatten(const TNNParams& tnn) {
  Eigen::VectorXd theta(parameter_count(tnn));
  Eigen::Index pos = 0;
  TNNParams& t = const_cast<TNNParams&>(tnn);
  for (auto& net : t.subnets)
    for_each_array(net, [&](double* x, Eigen::Index len) {
      theta.segment(pos, len) = Eigen::Map<Eigen::VectorXd>(x, len);
      pos += len;
    });
  return theta;
}

void unflatten(TNNParams& tnn, const Eigen::VectorXd& theta) {
  if (theta.size() != parameter_count(tnn)) throw std::invalid_argument("unflatten: wrong length");
  Eigen::Index pos = 0;
  for (auto& net : tnn.subnets)
    for_each_array(net, [&](double* x, Eigen::Index len) {
      Eigen::Map<Eigen::VectorXd>(x, len) = theta.segment(pos, len);
      pos += len;
    });
}

double value_and_gradient(const TNNParams& tnn, const Quadrature1D& q, const BasisLoss& loss,
                          Eigen::VectorXd* grad) {
  const int n = tnn.dim();
  const Eigen::VectorXd w = weights_of(q), y = nodes_of(q);
  std::vector<Tape> tapes;
  std::vector<Eigen::VectorXd> norms;
  BasisBank b;
  b.dim = n;
  b.p = tnn.p;
  for (int i = 0; i < n; ++i) {
    tapes.push_back(forward(tnn.subnets[i], y));
    const FactorValues& f = tapes.back().out;
    norms.push_back(factor_norms(f.val, w, i));
    const Eigen::VectorXd inv = norms.back().cwiseInverse();
    b.samples.push_back({inv.asDiagonal() * f.val, inv.asDiagonal() * f.d1, inv.asDiagonal() * f.d2});
  }
  if (grad == nullptr) return loss(b, nullptr);

  BasisSamples gb = BasisBank::zeros_like(b);
  const double value = loss(b, &gb);
  grad->resize(parameter_count(tnn));
  Eigen::Index pos = 0;
  for (int i = 0; i < n; ++i) {
    const FactorValues& f = tapes[i].out;
    const Eigen::VectorXd inv = norms[i].cwiseInverse();
    // hat = raw / s with s^2 = sum_j w_j raw_j^2
    Eigen::VectorXd sbar = -(gb[i][0].cwiseProduct(f.val).rowwise().sum() +
                             gb[i][1].cwiseProduct(f.d1).rowwise().sum() +
                             gb[i][2].cwiseProduct(f.d2).rowwise().sum());
    sbar = sbar.cwiseProduct(inv).cwiseProduct(inv);
    Eigen::MatrixXd gv = inv.asDiagonal() * gb[i][0];
    gv += (sbar.cwiseProduct(inv)).asDiagonal() * (f.val * w.asDiagonal());
    const Eigen::MatrixXd g1 = inv.asDiagonal() * gb[i][1];
    const Eigen::MatrixXd g2 = inv.asDiagonal() * gb[i][2];
    SubnetworkParams g = backward(tnn.subnets[i], tapes[i], gv, g1, g2);
    for_each_array(g, [&](double* x, Eigen::Index len) {
      grad->segment(pos, len) = Eigen::Map<Eigen::VectorXd>(x, len);
      pos += len;
    });
  }
  return value;
}

namespace {
void write_array(std::ostream& os, const char* tag, const double* x, Eigen::Index len) {
  os << tag << ' ' << len;
  for (Eigen::Index k = 0; k < len; ++k) os << ' ' << std::hexfloat << x[k];
  os << std::defaultfloat << '\n';
}

void read_array(std::istream& is, const char* tag, double* x, Eigen::Index len) {
  std::string t;
  Eigen::Index got = 0;
  if (!(is >> t >> got) || t != tag || got != len)
    throw std::runtime_error(std::string("checkpoint: expected array ") + tag);
  for (Eigen::Index k = 0; k < len; ++k) {
    std::string tok;
    if (!(is >> tok)) throw std::runtime_error("checkpoint: truncated array");
    char* end = nullptr;
    x[k] = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') throw std::runtime_error("checkpoint: bad number " + tok);
  }
}
}  // namespace

void save_checkpoint(std::ostream& os, const TNNParams& tnn) {
  const auto& net0 = tnn.subnets.at(0);
  os << "quasitnn-checkpoint 1\n";
  os << "d " << tnn.d << " n " << tnn.dim() << " p " << tnn.p << " width " << net0.b1.size()
     << " depth " << net0.W.size() + 1 << '\n';
  TNNParams& t = const_cast<TNNParams&>(tnn);
  for (auto& net : t.subnets) {
    os << "freqs";
    for (Eigen::Index r = 0; r < net.freqs.size(); ++r) os << ' ' << net.freqs(r);
    os << '\n';
    for_each_array(net, [&](double* x, Eigen::Index len) { write_array(os, "a", x, len); });
  }
  write_array(os, "c", t.c.data(), t.c.size());
  write_array(os, "norms", t.norms.data(), t.norms.size());
  write_array(os, "means", t.means.data(), t.means.size());
}

TNNParams load_checkpoint(std::istream& is) {
  std::string magic, tag;
  int version = 0;
  if (!(is >> magic >> version) || magic != "quasitnn-checkpoint" || version != 1)
    throw std::runtime_error("checkpoint: bad header");
  int d = 0, n = 0, p = 0, width = 0, depth = 0;
  std::string kd, kn, kp, kw, kdep;
  if (!(is >> kd >> d >> kn >> n >> kp >> p >> kw >> width >> kdep >> depth) || kd != "d" || kn != "n" ||
      kp != "p" || kw != "width" || kdep != "depth")
    throw std::runtime_error("checkpoint: bad dimensions line");
  TNNShape shape{p, width, depth, 1};
  TNNParams t = init_tnn(n, shape, 0, d);
  for (auto& net : t.subnets) {
    if (!(is >> tag) || tag != "freqs") throw std::runtime_error("checkpoint: expected freqs");
    for (int r = 0; r < width; ++r)
      if (!(is >> net.freqs(r))) throw std::runtime_error("checkpoint: truncated freqs");
    for_each_array(net, [&](double* x, Eigen::Index len) { read_array(is, "a", x, len); });
  }
  read_array(is, "c", t.c.data(), t.c.size());
  read_array(is, "norms", t.norms.data(), t.norms.size());
  read_array(is, "means", t.means.data(), t.means.size());
  return t;
}

}  // namespace quasitnn
