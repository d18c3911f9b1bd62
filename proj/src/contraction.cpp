// SPDX-License-Identifier: Apache-2.0
#include "quasitnn/contraction.hpp"

#include <map>
#include <stdexcept>

namespace quasitnn {

namespace {

// Per-coordinate derivative slot: (order on the field factor, order on the basis factor).
struct Slot {
  int sa;
  int sphi;
};
constexpr std::array<Slot, 5> kSlots{{{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}}};

struct Transition {
  int from;
  int to;
  int slot;
  int power;
  double factor;
};

// Distributes the operator's derivatives over coordinates. Each coordinate
// takes one slot; a path's weight is the product of factor * P(i,l)^power.
struct Automaton {
  int states = 1;
  std::vector<Transition> transitions;
  std::vector<std::pair<int, double>> accept;
};

Automaton make_automaton(OperatorKind op) {
  Automaton a;
  switch (op) {
    case OperatorKind::Identity:
      a.states = 1;
      a.transitions = {{0, 0, 0, 0, 1.0}};
      a.accept = {{0, 1.0}};
      break;
    case OperatorKind::Gradient:
      a.states = 2;
      a.transitions = {{0, 0, 0, 0, 1.0}, {0, 1, 1, 1, 1.0}, {1, 1, 0, 0, 1.0}};
      a.accept = {{1, 1.0}};
      break;
    case OperatorKind::DivFlux: {
      // states by accumulated (field, basis) derivative counts
      const std::array<std::pair<int, int>, 5> counts{{{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}}};
      a.states = 5;
      for (int from = 0; from < 5; ++from) {
        for (int s = 0; s < 5; ++s) {
          const int ca = counts[from].first + kSlots[s].sa;
          const int cp = counts[from].second + kSlots[s].sphi;
          for (int to = 0; to < 5; ++to) {
            if (counts[to].first != ca || counts[to].second != cp) continue;
            const double inv_fact = kSlots[s].sphi == 2 ? 0.5 : 1.0;
            a.transitions.push_back({from, to, s, kSlots[s].sa + kSlots[s].sphi, inv_fact});
          }
        }
      }
      a.accept = {{3, 2.0}, {4, 1.0}};
      break;
    }
  }
  return a;
}

struct Table {
  Eigen::ArrayXXd value;
  Eigen::ArrayXXd bar;
  bool has_bar = false;
};

class Contractor {
 public:
  Contractor(const Side& L, const Side& R, const ProjectionMatrix& P, const Quadrature1D& q)
      : L_(L), R_(R), P_(P), q_(q), aL_(make_automaton(L.op)), aR_(make_automaton(R.op)) {
    w_ = Eigen::Map<const Eigen::VectorXd>(q.weights.data(), static_cast<Eigen::Index>(q.size()));
  }

  Eigen::MatrixXd run(const Eigen::MatrixXd* mbar) {
    const int n = L_.field->dim;
    const int pL = L_.basis->p, pR = R_.basis->p;
    const int nstates = aL_.states * aR_.states;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(pL, pR);

    for (std::size_t e = 0; e < L_.field->coeffs.size(); ++e) {
      for (std::size_t f = 0; f < R_.field->coeffs.size(); ++f) {
        const double coef = L_.field->coeffs[e] * R_.field->coeffs[f];
        if (coef == 0.0) continue;
        const auto& uL = L_.field->index[e];
        const auto& uR = R_.field->index[f];

        // forward sweep, keeping every layer for the adjoint
        std::vector<std::vector<Eigen::ArrayXXd>> S(n + 1, std::vector<Eigen::ArrayXXd>(nstates));
        S[0][0] = Eigen::ArrayXXd::Ones(pL, pR);
        for (int l = 0; l < n; ++l) {
          for_each_step(l, uL[l], uR[l], [&](int from, int to, double wgt, Table& t) {
            if (S[l][from].size() == 0) return;
            if (S[l + 1][to].size() == 0)
              S[l + 1][to] = wgt * S[l][from] * t.value;
            else
              S[l + 1][to] += wgt * S[l][from] * t.value;
          });
        }
        Eigen::ArrayXXd Mef = Eigen::ArrayXXd::Zero(pL, pR);
        for (const auto& [sl, wl] : aL_.accept)
          for (const auto& [sr, wr] : aR_.accept) {
            const auto& fin = S[n][sl * aR_.states + sr];
            if (fin.size() != 0) Mef += wl * wr * fin;
          }
        M += coef * Mef.matrix();

        if (mbar == nullptr) continue;
        std::vector<Eigen::ArrayXXd> B(nstates);
        for (const auto& [sl, wl] : aL_.accept)
          for (const auto& [sr, wr] : aR_.accept)
            B[sl * aR_.states + sr] = (coef * wl * wr) * mbar->array();
        for (int l = n - 1; l >= 0; --l) {
          std::vector<Eigen::ArrayXXd> Bprev(nstates);
          for_each_step(l, uL[l], uR[l], [&](int from, int to, double wgt, Table& t) {
            if (S[l][from].size() == 0 || B[to].size() == 0) return;
            if (!t.has_bar) {
              t.bar = Eigen::ArrayXXd::Zero(pL, pR);
              t.has_bar = true;
            }
            t.bar += wgt * S[l][from] * B[to];
            if (l == 0) return;
            if (Bprev[from].size() == 0)
              Bprev[from] = wgt * B[to] * t.value;
            else
              Bprev[from] += wgt * B[to] * t.value;
          });
          B = std::move(Bprev);
        }
      }
    }
    if (mbar != nullptr) scatter_adjoint();
    return M;
  }

 private:
  struct Key {
    int l, sL, sR, uL, uR;
    auto operator<=>(const Key&) const = default;
  };

  template <class Visit>
  void for_each_step(int l, int uL, int uR, Visit&& visit) {
    for (const auto& tl : aL_.transitions) {
      const double wl = step_weight(L_, tl, l, uL);
      if (wl == 0.0) continue;
      for (const auto& tr : aR_.transitions) {
        const double wr = step_weight(R_, tr, l, uR);
        if (wr == 0.0) continue;
        Table& t = table(l, tl.slot, tr.slot, uL, uR);
        visit(tl.from * aR_.states + tr.from, tl.to * aR_.states + tr.to, wl * wr, t);
      }
    }
  }

  double step_weight(const Side& s, const Transition& t, int l, int u) const {
    const Slot& slot = kSlots[t.slot];
    if (slot.sa > 0 && s.field->unique[l][u].constant) return 0.0;
    if (slot.sphi > 0 && s.basis->unit_basis) return 0.0;
    double w = t.factor;
    for (int k = 0; k < t.power; ++k) w *= P_(s.direction, l);
    return w;
  }

  Eigen::VectorXd omega(int l, int sL, int sR, int uL, int uR) const {
    const auto& fL = L_.field->unique[l][uL];
    const auto& fR = R_.field->unique[l][uR];
    Eigen::VectorXd om = w_;
    om.array() *= (kSlots[sL].sa ? fL.deriv : fL.value).array();
    om.array() *= (kSlots[sR].sa ? fR.deriv : fR.value).array();
    return om;
  }

  Table& table(int l, int sL, int sR, int uL, int uR) {
    const Key key{l, sL, sR, uL, uR};
    auto it = tables_.find(key);
    if (it != tables_.end()) return it->second;
    const Eigen::VectorXd om = omega(l, sL, sR, uL, uR);
    const auto& PhiL = L_.basis->samples[l][kSlots[sL].sphi];
    const auto& PhiR = R_.basis->samples[l][kSlots[sR].sphi];
    Table t;
    t.value = ((PhiL * om.asDiagonal()) * PhiR.transpose()).array();
    return tables_.emplace(key, std::move(t)).first->second;
  }

  void scatter_adjoint() {
    for (auto& [key, t] : tables_) {
      if (!t.has_bar) continue;
      const Eigen::VectorXd om = omega(key.l, key.sL, key.sR, key.uL, key.uR);
      const int oL = kSlots[key.sL].sphi, oR = kSlots[key.sR].sphi;
      const auto& PhiL = L_.basis->samples[key.l][oL];
      const auto& PhiR = R_.basis->samples[key.l][oR];
      const Eigen::MatrixXd tb = t.bar.matrix();
      if (L_.grad != nullptr) (*L_.grad)[key.l][oL] += tb * (PhiR * om.asDiagonal());
      if (R_.grad != nullptr) (*R_.grad)[key.l][oR] += tb.transpose() * (PhiL * om.asDiagonal());
    }
  }

  const Side& L_;
  const Side& R_;
  const ProjectionMatrix& P_;
  const Quadrature1D& q_;
  Automaton aL_, aR_;
  Eigen::VectorXd w_;
  std::map<Key, Table> tables_;
};

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

FieldBank FieldBank::from_rank_sum(const RankSum& R, const Quadrature1D& q) {
  FieldBank b;
  b.dim = R.dim;
  b.unique.resize(R.dim);
  std::vector<std::vector<Factor1D>> seen(R.dim);
  for (const auto& t : R.terms) {
    b.coeffs.push_back(t.coeff);
    std::vector<int> idx(R.dim);
    for (int l = 0; l < R.dim; ++l) {
      const Factor1D& f = t.factors[l];
      int found = -1;
      for (std::size_t u = 0; u < seen[l].size(); ++u)
        if (same_factor(seen[l][u], f)) {
          found = static_cast<int>(u);
          break;
        }
      if (found < 0) {
        Unique un;
        un.value = to_vector(f.sample(q, 0));
        un.constant = f.kind == FactorKind::Constant;
        un.deriv = un.constant ? Eigen::VectorXd::Zero(un.value.size()) : to_vector(f.sample(q, 1));
        found = static_cast<int>(seen[l].size());
        seen[l].push_back(f);
        b.unique[l].push_back(std::move(un));
      }
      idx[l] = found;
    }
    b.index.push_back(std::move(idx));
  }
  return b;
}

FieldBank FieldBank::unit(int n, const Quadrature1D& q) {
  return from_rank_sum(RankSum::constant(n, 1.0), q);
}

BasisBank BasisBank::unit(int n, const Quadrature1D& q) {
  BasisBank b;
  b.dim = n;
  b.p = 1;
  b.unit_basis = true;
  const auto N = static_cast<Eigen::Index>(q.size());
  for (int l = 0; l < n; ++l)
    b.samples.push_back({Eigen::MatrixXd::Ones(1, N), Eigen::MatrixXd::Zero(1, N),
                         Eigen::MatrixXd::Zero(1, N)});
  return b;
}

BasisSamples BasisBank::zeros_like(const BasisBank& b) {
  BasisSamples g(b.samples.size());
  for (std::size_t l = 0; l < g.size(); ++l)
    for (int r = 0; r < 3; ++r)
      g[l][r] = Eigen::MatrixXd::Zero(b.samples[l][r].rows(), b.samples[l][r].cols());
  return g;
}

Eigen::MatrixXd contract(const Side& L, const Side& R, const ProjectionMatrix& P,
                         const Quadrature1D& q, const Eigen::MatrixXd* mbar) {
  const int n = L.field->dim;
  if (R.field->dim != n || L.basis->dim != n || R.basis->dim != n)
    throw std::invalid_argument("contract: dimension mismatch");
  if (P.n() != n) throw std::invalid_argument("contract: P has wrong column count");
  if (L.direction < 0 || L.direction >= P.d() || R.direction < 0 || R.direction >= P.d())
    throw std::invalid_argument("contract: direction out of range");
  if (mbar != nullptr && (mbar->rows() != L.basis->p || mbar->cols() != R.basis->p))
    throw std::invalid_argument("contract: adjoint seed has wrong shape");
  Contractor c(L, R, P, q);
  return c.run(mbar);
}

}  // namespace quasitnn
