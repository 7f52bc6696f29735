// Licensed under the Apache License 2.0 (see LICENSE file).

#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "mstvtp/filter.hpp"
#include "mstvtp/types.hpp"

namespace mstvtp {

/// Permutation sigma minimizing sum_i |mu_hat[sigma(i)] - mu_true[i]| by
/// exhaustive search; ties resolve to the lexicographically smallest sigma.
std::vector<int> align_labels(const std::vector<double>& mu_hat,
                              const std::vector<double>& mu_true);

/// Relabel regimes: entry i of the result takes regime perm[i] of the input,
/// with transition parameters and dynamics coefficients co-permuted (the
/// off-diagonal logit parameters permute by pure index shuffling since the
/// diagonal reference moves with its row).
Params apply_permutation(const Params& p, const ModelSpec& spec,
                         const std::vector<int>& perm);

/// Index permutation on the packed natural parameter vector induced by a
/// regime permutation: out[k] = index of the old coordinate that lands in
/// slot k. Applies to packed SE vectors and covariance rows/columns.
std::vector<int> packed_index_permutation(const ModelSpec& spec,
                                          const std::vector<int>& perm);

enum class ParamGroup { Mu, Sigma2, Pi, A };
const char* to_string(ParamGroup g);

struct MetricsRow {
  ParamGroup group;
  double bias = 0.0;
  double rmse = 0.0;
  double coverage = 0.0;
  int n_used = 0;
};

/// One replication's aligned estimates, SEs and baseline probabilities.
struct RepEstimate {
  Params params;
  std::vector<double> se;      // packed order; empty when unavailable
  std::vector<double> pi0;     // baseline transition probabilities
  std::vector<double> pi0_se;  // empty when unavailable
};

/// Bias / RMSE / 95% Wald coverage per parameter group, element metrics
/// averaged within the group (signed biases can cancel). Replications with
/// any dynamics coefficient exceeding trim_threshold in absolute value are
/// excluded from the A group only; n_used reports the retained count.
std::vector<MetricsRow> recovery_metrics(const std::vector<RepEstimate>& reps,
                                         const Params& truth,
                                         const ModelSpec& spec,
                                         double trim_threshold = 10.0);

struct ForecastMetrics {
  double mafe = 0.0;
  double msfe = 0.0;
  double masfe = 0.0;
  double mssfe = 0.0;
};

/// One-step-ahead point forecast errors over t > cutoff; the standardized
/// variants divide each error by the predictive standard deviation.
ForecastMetrics forecast_metrics(const FilterOutput& out,
                                 const std::vector<double>& y, int cutoff);

/// Elementwise MSE and MAE between two stacked transition-matrix paths,
/// averaged over all entries and time periods.
std::pair<double, double> filtered_prob_accuracy(
    const std::vector<double>& pi_hat_path,
    const std::vector<double>& pi_true_path);

/// Profile log-likelihood: at each grid point the named coordinates are
/// fixed and the remaining ones re-optimized from params_hat (warm start).
/// Coordinate names follow TransformMap::names ("mu1", "a_2", ...). Failed
/// inner optimizations become NaN cells.
struct ProfileResult {
  std::vector<std::string> dims;
  std::vector<std::vector<double>> grid;  // one value per dim per point
  std::vector<double> values;             // maximized loglik per point
};

ProfileResult profile_loglik(const Dataset& data, const ModelSpec& spec,
                             const Params& params_hat,
                             const std::vector<std::string>& dims,
                             const std::vector<std::vector<double>>& grid,
                             int cutoff);

}  // namespace mstvtp
