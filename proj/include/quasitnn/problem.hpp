// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "quasitnn/frequency_lattice.hpp"
#include "quasitnn/rank_one.hpp"

#include <optional>
#include <string>

namespace quasitnn {

/// -div_P(A grad_P U) = F on the torus T^n with the pullback u(x) = U(P^T x).
struct ProblemSpec {
  std::string name;
  ProjectionMatrix P;
  RankSum A;
  RankSum F;
  std::optional<RankSum> exact_U;
  double alpha0 = 0.0;  // constant part of A minus the sum of |other coefficients|
  double alpha1 = 0.0;  // constant part of A plus the sum of |other coefficients|
  bool elliptic = true;  // alpha0 > 0
};

/// Problem with manufactured F and coefficient bounds of A.
ProblemSpec make_problem(std::string name, ProjectionMatrix P, RankSum A, RankSum U);

}  // namespace quasitnn
