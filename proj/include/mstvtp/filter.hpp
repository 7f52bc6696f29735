// Licensed under the Apache License 2.0 (see LICENSE file).

#pragma once

#include <vector>

#include "mstvtp/types.hpp"

namespace mstvtp {

struct FilterOutput {
  double loglik = 0.0;  // sum of log predictive densities after the cut-off
  int cutoff = 0;
  int t_len = 0;
  int k = 0;
  std::vector<double> xi_pred;    // T x K, row-major: P(z_t = j | I_{t-1})
  std::vector<double> xi_filt;    // T x K: P(z_t = j | I_t)
  std::vector<double> pi_path;    // T x K x K transition matrices
  std::vector<double> f_path;     // T x d transition parameters
  std::vector<double> pred_mean;  // one-step predictive mean
  std::vector<double> pred_var;   // one-step predictive variance
  bool degenerate = false;        // a likelihood term hit the underflow floor
  int degenerate_t = -1;          // first offending time (0-based)
  int identity_scaling_events = 0;  // GAS steps where Fisher scaling fell back

  double pred(int t, int j) const { return xi_pred[static_cast<size_t>(t) * k + j]; }
  double filt(int t, int j) const { return xi_filt[static_cast<size_t>(t) * k + j]; }
  double pi(int t, int i, int j) const {
    return pi_path[(static_cast<size_t>(t) * k + i) * k + j];
  }
};

/// Hamilton recursion for any dynamics family. The initial regime
/// distribution is uniform. The first `cutoff` likelihood terms are computed
/// (to drive the recursion) but excluded from loglik. Likelihood terms are
/// floored at 1e-300 with the degenerate flag set instead of returning -inf.
FilterOutput run_filter(const Dataset& data, const ModelSpec& spec,
                        const Params& params, int cutoff = 0);

/// Most probable regime per time (argmax of filtered probabilities, ties to
/// the lowest index). Regimes are 0-based.
std::vector<int> classify_regimes(const FilterOutput& out);

}  // namespace mstvtp
