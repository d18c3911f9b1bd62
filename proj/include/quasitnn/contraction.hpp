// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "quasitnn/frequency_lattice.hpp"
#include "quasitnn/quadrature.hpp"
#include "quasitnn/rank_one.hpp"

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace quasitnn {

/// A fixed coefficient function (A, F, or an exact solution) sampled on a grid.
/// Factors are de-duplicated per coordinate so that 1-D tables are shared
/// between terms.
struct FieldBank {
  struct Unique {
    Eigen::VectorXd value;
    Eigen::VectorXd deriv;
    bool constant = false;
  };

  int dim = 0;
  std::vector<double> coeffs;
  std::vector<std::vector<Unique>> unique;  // [coordinate][u]
  std::vector<std::vector<int>> index;      // [term][coordinate] -> u

  static FieldBank from_rank_sum(const RankSum& R, const Quadrature1D& q);
  static FieldBank unit(int n, const Quadrature1D& q);
};

/// Grid samples of p basis factors per coordinate: orders 0, 1, 2, each p x N.
using BasisSamples = std::vector<std::array<Eigen::MatrixXd, 3>>;

struct BasisBank {
  int dim = 0;
  int p = 0;
  BasisSamples samples;
  bool unit_basis = false;

  /// One basis function identically equal to one.
  static BasisBank unit(int n, const Quadrature1D& q);
  static BasisSamples zeros_like(const BasisBank& b);
};

/// Differential operator applied to (field * basis):
///   Identity  f phi
///   Gradient  f Y_i phi
///   DivFlux   Y_i(f Y_i phi)
enum class OperatorKind { Identity, Gradient, DivFlux };

struct Side {
  const FieldBank* field = nullptr;
  const BasisBank* basis = nullptr;
  OperatorKind op = OperatorKind::Identity;
  int direction = 0;
  BasisSamples* grad = nullptr;  // receives d(loss)/d(samples) when non-null
};

/// M(m, n) = int_{T^n} (L applied to basis function m)(R applied to basis function n),
/// evaluated as sums of products of 1-D integrals on q. When mbar is given the
/// adjoint sum_{mn} mbar(m,n) dM(m,n)/d(samples) is accumulated into the
/// sides' grad buffers.
Eigen::MatrixXd contract(const Side& L, const Side& R, const ProjectionMatrix& P,
                         const Quadrature1D& q, const Eigen::MatrixXd* mbar = nullptr);

}  // namespace quasitnn
