// Licensed under the Apache License 2.0 (see LICENSE file).

#include "mstvtp/empirical.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>

#include "mstvtp/csv.hpp"
#include "mstvtp/filter.hpp"
#include "mstvtp/metrics.hpp"
#include "mstvtp/rng.hpp"

namespace mstvtp {

std::map<int, YieldSeries> ingest_yields(const std::string& path,
                                         const std::vector<int>& maturities,
                                         const std::string& date_from,
                                         const std::string& date_to) {
  CsvTable t = read_csv(path);
  if (t.header.size() < 2)
    fail(ErrorCode::Io, "yields file needs a date column plus maturities");

  std::map<int, int> col_of;
  for (int m : maturities) {
    int c = t.column(std::to_string(m));
    if (c < 0)
      fail(ErrorCode::Io, "maturity column '" + std::to_string(m) +
                              "' not present in '" + path + "'");
    col_of[m] = c;
  }

  std::map<int, YieldSeries> out;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    if (row.empty()) continue;
    const std::string& date = row[0];
    if (date.size() < 7)
      fail(ErrorCode::Io, "unparseable date '" + date + "' at data row " +
                              std::to_string(r + 1));
    if (!date_from.empty() && date.substr(0, 7) < date_from) continue;
    if (!date_to.empty() && date.substr(0, 7) > date_to) continue;
    for (auto& [m, c] : col_of) {
      if (c >= static_cast<int>(row.size()) || row[c].empty())
        fail(ErrorCode::Io, "missing value for maturity " + std::to_string(m) +
                                " at date " + date);
      out[m].dates.push_back(date.substr(0, 7));
      out[m].levels.push_back(parse_cell(row[c], std::to_string(m), r));
    }
  }
  if (out.empty() || out.begin()->second.levels.empty())
    fail(ErrorCode::Io, "no rows selected from '" + path + "'");
  return out;
}

Dataset difference_levels(const YieldSeries& series, const std::string& label) {
  const size_t n = series.levels.size();
  if (n < 2) fail(ErrorCode::InvalidArgument, "need at least two levels to difference");
  Dataset d;
  d.label = label;
  d.y.reserve(n - 1);
  d.x.reserve(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) {
    d.y.push_back(series.levels[i + 1] - series.levels[i]);
    d.x.push_back(series.levels[i + 1]);
  }
  return d;
}

namespace {

// Rank regimes by decreasing variance and relabel so regime 1 is the most
// volatile, matching the reporting convention.
std::vector<int> variance_order(const Params& p, const ModelSpec& spec) {
  std::vector<int> order(spec.k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return p.sigma2_of(a, spec) > p.sigma2_of(b, spec);
  });
  return order;
}

}  // namespace

EmpiricalReport run_empirical(const EmpiricalConfig& cfg) {
  auto series = ingest_yields(cfg.yields_csv, cfg.maturities, cfg.date_from,
                              cfg.date_to);
  EmpiricalReport report;
  report.n_levels = static_cast<int>(series.begin()->second.levels.size());
  report.n_diffs = report.n_levels - 1;
  report.n_starts = cfg.n_starts;

  struct Job {
    int maturity;
    Dynamics model;
  };
  std::vector<Job> jobs;
  for (int m : cfg.maturities)
    for (Dynamics dyn : cfg.models) jobs.push_back({m, dyn});
  report.cells.resize(jobs.size());

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t idx = next.fetch_add(1);
      if (idx >= jobs.size()) break;
      const Job& job = jobs[idx];
      EmpiricalCell& cell = report.cells[idx];
      cell.maturity = job.maturity;
      cell.model = job.model;
      try {
        const YieldSeries& ys = series.at(job.maturity);
        Dataset data = difference_levels(ys, std::to_string(job.maturity) + "m");
        cell.dates.assign(ys.dates.begin() + 1, ys.dates.end());
        cell.y = data.y;
        if (job.model != Dynamics::Exogenous) data.x.clear();

        ModelSpec spec{cfg.k, Parameterization::OffDiagonal,
                       VarianceStructure::RegimeSpecific, job.model};
        std::uint64_t seed = split_stream(
            {cfg.seed, static_cast<std::uint64_t>(job.maturity),
             static_cast<std::uint64_t>(static_cast<int>(job.model)), 7});
        cell.est = estimate(data, spec, cfg.n_starts, seed, cfg.cutoff);
        for (double v : cell.est.params_hat.a)
          cell.max_abs_a = std::max(cell.max_abs_a, std::abs(v));

        if (cell.est.best_start_index >= 0) {
          std::vector<int> order = variance_order(cell.est.params_hat, spec);
          cell.ordered_params =
              apply_permutation(cell.est.params_hat, spec, order);
          FilterOutput out = run_filter(data, spec, cell.ordered_params, cfg.cutoff);
          std::vector<int> cls = classify_regimes(out);
          cell.regime_rank.resize(out.t_len);
          cell.filt_by_rank.resize(static_cast<size_t>(out.t_len) * cfg.k);
          for (int t = 0; t < out.t_len; ++t) {
            cell.regime_rank[t] = cls[t] + 1;  // rank 1 = highest variance
            for (int j = 0; j < cfg.k; ++j)
              cell.filt_by_rank[static_cast<size_t>(t) * cfg.k + j] = out.filt(t, j);
          }
        }
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };
  if (cfg.threads > 1) {
    std::vector<std::thread> pool;
    for (int i = 0; i < cfg.threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  } else {
    worker();
  }
  return report;
}

void write_empirical_report(const EmpiricalReport& report,
                            const std::string& out_dir) {
  std::ofstream fit(out_dir + "/empirical_fit.csv");
  if (!fit) fail(ErrorCode::Io, "cannot write " + out_dir + "/empirical_fit.csv");
  fit << "maturity,model,loglik,aic,bic,n_params,converged,"
         "starts_converged,starts_total,max_abs_a,error\n";
  std::ofstream par(out_dir + "/empirical_params.csv");
  par << "maturity,model,regime_rank,mu,sigma2\n";

  for (const EmpiricalCell& c : report.cells) {
    fit << c.maturity << ',' << to_string(c.model) << ','
        << format_double(c.est.loglik) << ',' << format_double(c.est.aic) << ','
        << format_double(c.est.bic) << ',' << c.est.n_params << ','
        << (c.est.converged ? 1 : 0) << ',' << c.est.n_starts_converged << ','
        << report.n_starts << ','
        << (c.model == Dynamics::ScoreDriven ? format_double(c.max_abs_a) : "")
        << ',' << c.error << '\n';
    if (c.est.best_start_index < 0) continue;
    const Params& p = c.ordered_params;
    for (size_t j = 0; j < p.mu.size(); ++j) {
      par << c.maturity << ',' << to_string(c.model) << ',' << (j + 1) << ','
          << format_double(p.mu[j]) << ',' << format_double(p.sigma2[j]) << '\n';
    }
    if (!c.est.converged) continue;
    std::string name = out_dir + "/classification_" + std::to_string(c.maturity) +
                       "m_" + to_string(c.model) + ".csv";
    std::ofstream cls(name);
    if (!cls) fail(ErrorCode::Io, "cannot write " + name);
    const int k = static_cast<int>(p.mu.size());
    cls << "date,y,regime_rank";
    for (int j = 1; j <= k; ++j) cls << ",p" << j;
    cls << '\n';
    for (size_t t = 0; t < c.y.size(); ++t) {
      cls << c.dates[t] << ',' << format_double(c.y[t]) << ',' << c.regime_rank[t];
      for (int j = 0; j < k; ++j)
        cls << ',' << format_double(c.filt_by_rank[t * k + j]);
      cls << '\n';
    }
  }
}

}  // namespace mstvtp
