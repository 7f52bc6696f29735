// Licensed under the Apache License 2.0 (see LICENSE file).

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mstvtp/estimate.hpp"
#include "mstvtp/types.hpp"

namespace mstvtp {

struct YieldSeries {
  std::vector<std::string> dates;  // ISO YYYY-MM, aligned with levels
  std::vector<double> levels;
};

/// Read per-maturity yield level series from a CSV whose first column holds
/// ISO dates and whose remaining columns are named by maturity in months.
/// Missing or unparseable values raise an Io error naming the cell.
std::map<int, YieldSeries> ingest_yields(const std::string& path,
                                         const std::vector<int>& maturities,
                                         const std::string& date_from = "",
                                         const std::string& date_to = "");

/// First differences y_t = Y_t - Y_{t-1}; the covariate stored alongside is
/// the yield level dated at the observation (so the filter's lagged driver
/// x_{t-1} is the level one period before the change).
Dataset difference_levels(const YieldSeries& series, const std::string& label);

struct EmpiricalConfig {
  std::string yields_csv;
  std::vector<int> maturities = {1, 12, 36, 72};
  std::vector<Dynamics> models = {Dynamics::Constant, Dynamics::LaggedObs,
                                  Dynamics::Exogenous};
  int k = 3;
  int n_starts = 100;
  std::uint64_t seed = 1;
  int cutoff = 0;
  int threads = 1;
  std::string date_from, date_to;
};

struct EmpiricalCell {
  int maturity = 0;
  Dynamics model = Dynamics::Constant;
  EstimationResult est;
  Params ordered_params;           // regimes ordered by decreasing variance
  std::vector<std::string> dates;  // observation dates
  std::vector<double> y;
  std::vector<int> regime_rank;        // 1 = highest variance
  std::vector<double> filt_by_rank;    // T x k filtered probabilities, rank order
  double max_abs_a = 0.0;              // score-loading magnitude (gas only)
  std::string error;
};

struct EmpiricalReport {
  std::vector<EmpiricalCell> cells;
  int n_levels = 0;
  int n_diffs = 0;
  int n_starts = 0;
};

EmpiricalReport run_empirical(const EmpiricalConfig& cfg);

/// empirical_fit.csv, empirical_params.csv and one classification CSV per
/// converged (maturity, model) cell under out_dir.
void write_empirical_report(const EmpiricalReport& report,
                            const std::string& out_dir);

}  // namespace mstvtp
