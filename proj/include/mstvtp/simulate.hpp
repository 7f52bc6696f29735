// Licensed under the Apache License 2.0 (see LICENSE file).

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mstvtp/types.hpp"

namespace mstvtp {

struct SimOutput {
  std::vector<double> y;             // length T
  std::vector<int> z;                // true regimes, 0-based, length T
  std::vector<double> x;             // exogenous series (empty unless used)
  std::vector<double> pi_true_path;  // T x K x K true transition matrices
  std::uint64_t seed = 0;
  int k = 0;

  double pi(int t, int i, int j) const {
    return pi_true_path[(static_cast<size_t>(t) * k + i) * k + j];
  }
};

/// Simulate T observations after discarding `burn_in` initial steps. The
/// first regime is drawn uniformly. For score-driven dynamics the filter
/// recursion runs on the simulated history at the true parameters (the
/// filter state is part of the data-generating process). When the dynamics
/// are exogenous and no series is supplied, the covariate is drawn as
/// independent standard normals and returned in SimOutput.
SimOutput simulate(const ModelSpec& spec, const Params& params, int t_len,
                   int burn_in, std::uint64_t seed,
                   const std::vector<double>* x_external = nullptr);

/// True-parameter presets for the nine Monte Carlo data-generating
/// processes (two-regime block 1-5, three-regime block 6-9).
std::pair<ModelSpec, Params> dgp_preset(int id);

}  // namespace mstvtp
