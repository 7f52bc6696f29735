// Licensed under the Apache License 2.0 (see LICENSE file).

#include "mstvtp/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "mstvtp/dynamics.hpp"
#include "mstvtp/link.hpp"

namespace mstvtp {

namespace {
constexpr double kLogLikFloor = -690.77552789821368;  // log(1e-300)
}

FilterOutput run_filter(const Dataset& data, const ModelSpec& spec,
                        const Params& params, int cutoff) {
  data.validate();
  params.validate(spec);
  const int T = data.length();
  const int k = spec.k;
  const int d = spec.transition_dim();
  if (cutoff < 0 || T < cutoff + 2)
    fail(ErrorCode::InvalidArgument,
         "series must be at least cutoff + 2 observations long");
  if (spec.dynamics == Dynamics::Exogenous && !data.has_covariate())
    fail(ErrorCode::InvalidArgument,
         "exogenous dynamics require a covariate series");

  FilterOutput out;
  out.cutoff = cutoff;
  out.t_len = T;
  out.k = k;
  out.xi_pred.resize(static_cast<size_t>(T) * k);
  out.xi_filt.resize(static_cast<size_t>(T) * k);
  out.pi_path.resize(static_cast<size_t>(T) * k * k);
  out.f_path.resize(static_cast<size_t>(T) * d);
  out.pred_mean.resize(T);
  out.pred_var.resize(T);

  // Per-regime density constants.
  std::vector<double> log_norm(k), inv2s2(k);
  for (int j = 0; j < k; ++j) {
    double s2 = params.sigma2_of(j, spec);
    log_norm[j] = -0.5 * std::log(2.0 * M_PI * s2);
    inv2s2[j] = 0.5 / s2;
  }

  const bool gas = spec.dynamics == Dynamics::ScoreDriven;
  const bool gas_active = gas && !gas_fallback_active(params);
  std::unique_ptr<GasEngine> engine;
  if (gas_active) engine = std::make_unique<GasEngine>(spec, params);

  std::vector<double> f = params.f0;  // f_1 uses intercepts only (or omega)
  std::vector<double> xi_prev(k, 1.0 / k);
  std::vector<double> s_prev(d, 0.0);
  std::vector<double> log_a(k);
  TransitionMatrix P(k);
  TransitionMatrix P_const;
  if (spec.dynamics == Dynamics::Constant || (gas && !gas_active))
    P_const = link_f_to_matrix(params.f0, spec);

  double loglik = 0.0;
  for (int t = 0; t < T; ++t) {
    switch (spec.dynamics) {
      case Dynamics::Constant:
        P = P_const;
        break;
      case Dynamics::LaggedObs:
        if (t > 0) f = f_lagged_obs(params, data.y[t - 1]);
        P = link_f_to_matrix(f, spec);
        break;
      case Dynamics::Exogenous:
        if (t > 0) f = f_exogenous(params, data.x[t - 1]);
        P = link_f_to_matrix(f, spec);
        break;
      case Dynamics::ScoreDriven:
        if (!gas_active) {
          P = P_const;
        } else {
          if (t > 0) f = f_score_step(f, s_prev, params);
          P = link_f_to_matrix(f, spec);
        }
        break;
    }
    std::copy(f.begin(), f.end(), out.f_path.begin() + static_cast<size_t>(t) * d);
    std::copy(P.p.begin(), P.p.end(),
              out.pi_path.begin() + static_cast<size_t>(t) * k * k);

    // Prediction step, then Bayes update in log space.
    double pm = 0.0, pm2 = 0.0;
    double amax = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j) {
      double xp = 0.0;
      for (int i = 0; i < k; ++i) xp += P(i, j) * xi_prev[i];
      out.xi_pred[static_cast<size_t>(t) * k + j] = xp;
      double s2j = params.sigma2_of(j, spec);
      pm += params.mu[j] * xp;
      pm2 += xp * (s2j + params.mu[j] * params.mu[j]);
      double z = data.y[t] - params.mu[j];
      log_a[j] = std::log(xp) + log_norm[j] - z * z * inv2s2[j];
      amax = std::max(amax, log_a[j]);
    }
    out.pred_mean[t] = pm;
    out.pred_var[t] = pm2 - pm * pm;

    double sum = 0.0;
    for (int j = 0; j < k; ++j) sum += std::exp(log_a[j] - amax);
    double log_lt = amax + std::log(sum);
    if (!(log_lt > kLogLikFloor) || !std::isfinite(log_lt)) {
      log_lt = kLogLikFloor;
      if (!out.degenerate) {
        out.degenerate = true;
        out.degenerate_t = t;
      }
    }
    double norm = 0.0;
    for (int j = 0; j < k; ++j) {
      double v = std::exp(log_a[j] - log_lt);
      out.xi_filt[static_cast<size_t>(t) * k + j] = v;
      norm += v;
    }
    // Renormalize exactly (the floor can leave the row slightly off 1).
    if (norm > 0.0) {
      for (int j = 0; j < k; ++j)
        out.xi_filt[static_cast<size_t>(t) * k + j] /= norm;
    } else {
      for (int j = 0; j < k; ++j)
        out.xi_filt[static_cast<size_t>(t) * k + j] = 1.0 / k;
    }

    if (t >= cutoff) loglik += log_lt;

    if (gas_active) {
      if (!engine->compute(data.y[t], xi_prev.data(), P)) {
        if (!out.degenerate) {
          out.degenerate = true;
          out.degenerate_t = t;
        }
        std::fill(s_prev.begin(), s_prev.end(), 0.0);
      } else {
        s_prev = engine->scaled();
        if (engine->identity_scaling()) ++out.identity_scaling_events;
      }
    }
    for (int j = 0; j < k; ++j)
      xi_prev[j] = out.xi_filt[static_cast<size_t>(t) * k + j];
  }
  out.loglik = loglik;
  return out;
}

std::vector<int> classify_regimes(const FilterOutput& out) {
  std::vector<int> z(out.t_len);
  for (int t = 0; t < out.t_len; ++t) {
    int best = 0;
    double bv = out.filt(t, 0);
    for (int j = 1; j < out.k; ++j) {
      if (out.filt(t, j) > bv) {
        bv = out.filt(t, j);
        best = j;
      }
    }
    z[t] = best;
  }
  return z;
}

}  // namespace mstvtp
