// Licensed under the Apache License 2.0 (see LICENSE file).

#include "mstvtp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mstvtp/estimate.hpp"
#include "mstvtp/link.hpp"
#include "mstvtp/optim.hpp"

namespace mstvtp {

const char* to_string(ParamGroup g) {
  switch (g) {
    case ParamGroup::Mu: return "mu";
    case ParamGroup::Sigma2: return "sigma2";
    case ParamGroup::Pi: return "pi";
    case ParamGroup::A: return "a";
  }
  return "?";
}

std::vector<int> align_labels(const std::vector<double>& mu_hat,
                              const std::vector<double>& mu_true) {
  if (mu_hat.size() != mu_true.size())
    fail(ErrorCode::Dimension, "mean vectors differ in length");
  const int k = static_cast<int>(mu_hat.size());
  std::vector<int> perm(k), best(k);
  std::iota(perm.begin(), perm.end(), 0);
  best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (int i = 0; i < k; ++i) cost += std::abs(mu_hat[perm[i]] - mu_true[i]);
    if (cost < best_cost - 1e-15) {  // strict improvement keeps lexicographic ties
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

namespace {

// Permutation of the free transition-parameter indices induced by a regime
// permutation: the (i -> j) entry moves to (inv[i] -> inv[j]).
std::vector<int> f_index_permutation(const ModelSpec& spec,
                                     const std::vector<int>& perm) {
  const int d = spec.transition_dim();
  std::vector<int> out(d);
  if (spec.parameterization == Parameterization::Diagonal) {
    for (int i = 0; i < spec.k; ++i) out[i] = perm[i];
    return out;
  }
  for (int i = 0; i < spec.k; ++i) {
    for (int j = 0; j < spec.k; ++j) {
      if (j == i) continue;
      out[f_index(i, j, spec)] = f_index(perm[i], perm[j], spec);
    }
  }
  return out;
}

std::vector<double> permute_vec(const std::vector<double>& v,
                                const std::vector<int>& idx) {
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[idx[i]];
  return out;
}

}  // namespace

Params apply_permutation(const Params& p, const ModelSpec& spec,
                         const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != spec.k)
    fail(ErrorCode::Dimension, "permutation length must equal the regime count");
  Params out = p;
  std::vector<int> ridx(perm.begin(), perm.end());
  out.mu = permute_vec(p.mu, ridx);
  if (spec.variance == VarianceStructure::RegimeSpecific)
    out.sigma2 = permute_vec(p.sigma2, ridx);
  std::vector<int> fidx = f_index_permutation(spec, perm);
  out.f0 = permute_vec(p.f0, fidx);
  if (!p.theta.empty()) out.theta = permute_vec(p.theta, fidx);
  if (!p.gamma.empty()) out.gamma = permute_vec(p.gamma, fidx);
  if (!p.a.empty()) out.a = permute_vec(p.a, fidx);
  if (!p.b.empty()) out.b = permute_vec(p.b, fidx);
  return out;
}

std::vector<int> packed_index_permutation(const ModelSpec& spec,
                                          const std::vector<int>& perm) {
  const int k = spec.k;
  const int sd = spec.sigma_dim();
  const int d = spec.transition_dim();
  std::vector<int> fidx = f_index_permutation(spec, perm);
  std::vector<int> out;
  out.reserve(spec.param_count());
  for (int i = 0; i < k; ++i) out.push_back(perm[i]);
  if (spec.variance == VarianceStructure::RegimeSpecific)
    for (int i = 0; i < k; ++i) out.push_back(k + perm[i]);
  else
    out.push_back(k);
  const int f_off = k + sd;
  for (int i = 0; i < d; ++i) out.push_back(f_off + fidx[i]);
  int n_slope = 0;
  switch (spec.dynamics) {
    case Dynamics::Constant: n_slope = 0; break;
    case Dynamics::LaggedObs:
    case Dynamics::Exogenous: n_slope = 1; break;
    case Dynamics::ScoreDriven: n_slope = 2; break;
  }
  for (int blk = 0; blk < n_slope; ++blk) {
    int off = f_off + d * (1 + blk);
    for (int i = 0; i < d; ++i) out.push_back(off + fidx[i]);
  }
  return out;
}

std::vector<MetricsRow> recovery_metrics(const std::vector<RepEstimate>& reps,
                                         const Params& truth,
                                         const ModelSpec& spec,
                                         double trim_threshold) {
  if (reps.empty()) fail(ErrorCode::InvalidArgument, "no replications supplied");
  const int k = spec.k;
  const int sd = spec.sigma_dim();
  const int d = spec.transition_dim();
  const int f_off = k + sd;
  const int slope_off = f_off + d;

  std::vector<double> truth_pi0 = pi0_values(truth, spec);

  struct Element {
    double est;
    double se;    // < 0 when unavailable
    double truth;
  };
  auto group_row = [&](ParamGroup g, int n_elems,
                       auto&& elem_of) -> MetricsRow {
    MetricsRow row;
    row.group = g;
    double bias_sum = 0.0, rmse_sum = 0.0, cover_sum = 0.0;
    int cover_elems = 0;
    int n_used = 0;
    for (int e = 0; e < n_elems; ++e) {
      double b = 0.0, m2 = 0.0;
      int n = 0, covered = 0, with_se = 0;
      for (const RepEstimate& r : reps) {
        if (g == ParamGroup::A && trim_threshold > 0.0) {
          const std::vector<double>& slope = r.params.dyn_slope(spec);
          bool extreme = false;
          for (double v : slope)
            if (std::abs(v) > trim_threshold) extreme = true;
          if (extreme) continue;
        }
        Element el = elem_of(r, e);
        double err = el.est - el.truth;
        b += err;
        m2 += err * err;
        ++n;
        if (el.se >= 0.0) {
          ++with_se;
          if (std::abs(err) <= 1.96 * el.se) ++covered;
        }
      }
      if (n == 0) continue;
      bias_sum += b / n;
      rmse_sum += std::sqrt(m2 / n);
      if (with_se > 0) {
        cover_sum += static_cast<double>(covered) / with_se;
        ++cover_elems;
      }
      n_used = n;
    }
    row.bias = bias_sum / n_elems;
    row.rmse = rmse_sum / n_elems;
    row.coverage = cover_elems > 0 ? cover_sum / cover_elems : 0.0;
    row.n_used = n_used;
    return row;
  };

  std::vector<MetricsRow> rows;
  rows.push_back(group_row(ParamGroup::Mu, k, [&](const RepEstimate& r, int e) {
    return Element{r.params.mu[e],
                   r.se.empty() ? -1.0 : r.se[e],
                   truth.mu[e]};
  }));
  rows.push_back(group_row(ParamGroup::Sigma2, sd, [&](const RepEstimate& r, int e) {
    return Element{r.params.sigma2[e],
                   r.se.empty() ? -1.0 : r.se[k + e],
                   truth.sigma2[e]};
  }));
  if (d > 0) {
    rows.push_back(group_row(ParamGroup::Pi, d, [&](const RepEstimate& r, int e) {
      return Element{r.pi0[e],
                     r.pi0_se.empty() ? -1.0 : r.pi0_se[e],
                     truth_pi0[e]};
    }));
  }
  if (spec.dynamics != Dynamics::Constant) {
    rows.push_back(group_row(ParamGroup::A, d, [&](const RepEstimate& r, int e) {
      return Element{r.params.dyn_slope(spec)[e],
                     r.se.empty() ? -1.0 : r.se[slope_off + e],
                     truth.dyn_slope(spec)[e]};
    }));
  }
  return rows;
}

ForecastMetrics forecast_metrics(const FilterOutput& out,
                                 const std::vector<double>& y, int cutoff) {
  if (static_cast<int>(y.size()) != out.t_len)
    fail(ErrorCode::Dimension, "series length does not match filter output");
  ForecastMetrics fm;
  int n = 0;
  for (int t = cutoff; t < out.t_len; ++t) {
    if (!(out.pred_var[t] > 0.0))
      fail(ErrorCode::Internal, "non-positive predictive variance");
    double e = y[t] - out.pred_mean[t];
    double sd = std::sqrt(out.pred_var[t]);
    fm.mafe += std::abs(e);
    fm.msfe += e * e;
    fm.masfe += std::abs(e) / sd;
    fm.mssfe += e * e / out.pred_var[t];
    ++n;
  }
  if (n == 0) fail(ErrorCode::InvalidArgument, "cut-off leaves no observations");
  fm.mafe /= n;
  fm.msfe /= n;
  fm.masfe /= n;
  fm.mssfe /= n;
  return fm;
}

std::pair<double, double> filtered_prob_accuracy(
    const std::vector<double>& pi_hat_path,
    const std::vector<double>& pi_true_path) {
  if (pi_hat_path.size() != pi_true_path.size() || pi_hat_path.empty())
    fail(ErrorCode::Dimension, "transition paths differ in shape");
  double mse = 0.0, mae = 0.0;
  for (size_t i = 0; i < pi_hat_path.size(); ++i) {
    double d = pi_hat_path[i] - pi_true_path[i];
    mse += d * d;
    mae += std::abs(d);
  }
  mse /= pi_hat_path.size();
  mae /= pi_hat_path.size();
  return {mse, mae};
}

ProfileResult profile_loglik(const Dataset& data, const ModelSpec& spec,
                             const Params& params_hat,
                             const std::vector<std::string>& dims,
                             const std::vector<std::vector<double>>& grid,
                             int cutoff) {
  TransformMap tmap = transforms_for(spec);
  std::vector<int> fixed;
  for (const std::string& name : dims) {
    auto it = std::find(tmap.names.begin(), tmap.names.end(), name);
    if (it == tmap.names.end())
      fail(ErrorCode::InvalidArgument, "unknown parameter coordinate '" + name + "'");
    fixed.push_back(static_cast<int>(it - tmap.names.begin()));
  }
  const int p = tmap.dim();
  std::vector<int> free_idx;
  for (int i = 0; i < p; ++i)
    if (std::find(fixed.begin(), fixed.end(), i) == fixed.end())
      free_idx.push_back(i);

  Eigen::VectorXd natural0 = pack_params(params_hat, spec);

  ProfileResult res;
  res.dims = dims;
  res.grid = grid;
  res.values.reserve(grid.size());

  for (const std::vector<double>& point : grid) {
    if (point.size() != dims.size())
      fail(ErrorCode::Dimension, "grid point arity does not match dims");
    Eigen::VectorXd natural = natural0;
    for (size_t i = 0; i < fixed.size(); ++i) natural(fixed[i]) = point[i];
    Eigen::VectorXd u_full;
    try {
      u_full = tmap.forward(natural);
    } catch (...) {
      res.values.push_back(std::nan(""));
      continue;
    }
    if (free_idx.empty()) {
      // Degenerate profile: nothing to re-optimize.
      Objective full = [&](const Eigen::VectorXd& u) -> double {
        try {
          FilterOutput out = run_filter(data, spec,
                                        unpack_params(tmap.inverse(u), spec), cutoff);
          return out.degenerate ? std::nan("") : -out.loglik;
        } catch (const Error&) {
          return std::nan("");
        }
      };
      double v = full(u_full);
      res.values.push_back(std::isfinite(v) ? -v : std::nan(""));
      continue;
    }

    Objective sub = [&](const Eigen::VectorXd& v) -> double {
      Eigen::VectorXd u = u_full;
      for (size_t i = 0; i < free_idx.size(); ++i) u(free_idx[i]) = v(i);
      try {
        FilterOutput out = run_filter(data, spec,
                                      unpack_params(tmap.inverse(u), spec), cutoff);
        return out.degenerate ? std::nan("") : -out.loglik;
      } catch (const Error&) {
        return std::nan("");
      }
    };
    Eigen::VectorXd v0(free_idx.size());
    for (size_t i = 0; i < free_idx.size(); ++i) v0(i) = u_full(free_idx[i]);
    OptimResult r = minimize_bfgs(sub, v0);
    // A stalled maximizer still reports its best point; a cell is missing
    // only when no finite value was reached at all.
    res.values.push_back(std::isfinite(r.fval) && r.fval < 1e13 ? -r.fval
                                                                : std::nan(""));
  }
  return res;
}

}  // namespace mstvtp
