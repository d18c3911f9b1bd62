// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "quasitnn/training.hpp"

#include <iosfwd>
#include <string>

namespace quasitnn {

/// Flat `key = value` text, `#` starts a comment. Keys: problem,
/// phases[i].loss (ritz|residual), phases[i].optimizer (adam|lbfgs),
/// phases[i].iterations, phases[i].lr, solve_every, ridge_lambda, seed,
/// quadrature.n_sub, quadrature.n_gauss, tnn.p, tnn.width, tnn.depth,
/// tnn.freq_max, lbfgs.inner. Keys not given keep the values of base.
TrainConfig parse_config(std::istream& is, TrainConfig base = {});
TrainConfig load_config(const std::string& path, TrainConfig base = {});
void write_config(std::ostream& os, const TrainConfig& cfg);

}  // namespace quasitnn
