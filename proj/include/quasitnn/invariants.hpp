// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace quasitnn {

struct InvariantCheck {
  std::string name;
  int instances = 0;
  int failures = 0;
  double worst = 0.0;  // largest violation seen (0 when every instance holds)
  bool passed() const { return failures == 0; }
};

/// Seeded random instances of: factor periodicity, zero mean after correction,
/// factor normalization, Parseval additivity, the interpolation inequality and
/// the directional norm equivalence.
std::vector<InvariantCheck> run_invariant_suite(int instances, std::uint64_t seed);

}  // namespace quasitnn
