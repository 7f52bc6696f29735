// Licensed under the Apache License 2.0 (see LICENSE file).

#include "mstvtp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "mstvtp/dynamics.hpp"
#include "mstvtp/link.hpp"
#include "mstvtp/rng.hpp"

namespace mstvtp {

SimOutput simulate(const ModelSpec& spec, const Params& params, int t_len,
                   int burn_in, std::uint64_t seed,
                   const std::vector<double>* x_external) {
  params.validate(spec);
  if (t_len < 1) fail(ErrorCode::InvalidArgument, "T must be >= 1");
  if (burn_in < 0) fail(ErrorCode::InvalidArgument, "burn-in must be >= 0");
  const int k = spec.k;
  const int N = t_len + burn_in;
  const bool exo = spec.dynamics == Dynamics::Exogenous;
  if (exo && x_external &&
      static_cast<int>(x_external->size()) != N)
    fail(ErrorCode::Dimension,
         "external covariate must have length T + burn_in");

  Rng rng(seed);
  std::vector<double> sd(k);
  for (int j = 0; j < k; ++j) sd[j] = std::sqrt(params.sigma2_of(j, spec));

  const bool gas = spec.dynamics == Dynamics::ScoreDriven;
  const bool gas_active = gas && !gas_fallback_active(params);
  std::unique_ptr<GasEngine> engine;
  if (gas_active) engine = std::make_unique<GasEngine>(spec, params);

  // Filter state for the score recursion (part of the DGP for Model III).
  std::vector<double> xi_prev(k, 1.0 / k);
  std::vector<double> log_norm(k), inv2s2(k);
  for (int j = 0; j < k; ++j) {
    log_norm[j] = -0.5 * std::log(2.0 * M_PI * params.sigma2_of(j, spec));
    inv2s2[j] = 0.5 / params.sigma2_of(j, spec);
  }

  std::vector<double> y_all(N), x_all;
  std::vector<int> z_all(N);
  std::vector<double> pi_all(static_cast<size_t>(N) * k * k);
  if (exo) {
    x_all.resize(N);
    if (x_external) x_all = *x_external;
  }

  std::vector<double> f = params.f0;
  std::vector<double> s_prev(spec.transition_dim(), 0.0);
  TransitionMatrix P_const;
  if (spec.dynamics == Dynamics::Constant || (gas && !gas_active))
    P_const = link_f_to_matrix(params.f0, spec);
  TransitionMatrix P(k);

  int z_prev = 0;
  double y_prev = 0.0;
  for (int t = 0; t < N; ++t) {
    if (exo && !x_external) x_all[t] = rng.normal();
    switch (spec.dynamics) {
      case Dynamics::Constant:
        P = P_const;
        break;
      case Dynamics::LaggedObs:
        f = t > 0 ? f_lagged_obs(params, y_prev) : params.f0;
        P = link_f_to_matrix(f, spec);
        break;
      case Dynamics::Exogenous:
        f = t > 0 ? f_exogenous(params, x_all[t - 1]) : params.f0;
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
    std::copy(P.p.begin(), P.p.end(), pi_all.begin() + static_cast<size_t>(t) * k * k);

    int z;
    double u = rng.uniform();
    if (t == 0) {
      z = std::min(static_cast<int>(u * k), k - 1);
    } else {
      double c = 0.0;
      z = k - 1;
      for (int j = 0; j < k; ++j) {
        c += P(z_prev, j);
        if (u <= c) {
          z = j;
          break;
        }
      }
    }
    double y = params.mu[z] + sd[z] * rng.normal();
    z_all[t] = z;
    y_all[t] = y;

    // Advance the simulated filter state (needed only for score dynamics,
    // but cheap enough to keep uniform).
    if (gas_active) {
      // Predictive weights use P and xi_prev, mirroring the filter.
      std::vector<double> log_a(k);
      double amax = -1e308;
      for (int j = 0; j < k; ++j) {
        double xp = 0.0;
        for (int i = 0; i < k; ++i) xp += P(i, j) * xi_prev[i];
        double zz = y - params.mu[j];
        log_a[j] = std::log(xp) + log_norm[j] - zz * zz * inv2s2[j];
        amax = std::max(amax, log_a[j]);
      }
      double sum = 0.0;
      for (int j = 0; j < k; ++j) sum += std::exp(log_a[j] - amax);
      double log_lt = amax + std::log(sum);
      if (engine->compute(y, xi_prev.data(), P)) s_prev = engine->scaled();
      else std::fill(s_prev.begin(), s_prev.end(), 0.0);
      double norm = 0.0;
      std::vector<double> xi_new(k);
      for (int j = 0; j < k; ++j) {
        xi_new[j] = std::exp(log_a[j] - log_lt);
        norm += xi_new[j];
      }
      for (int j = 0; j < k; ++j) xi_prev[j] = norm > 0 ? xi_new[j] / norm : 1.0 / k;
    }
    z_prev = z;
    y_prev = y;
  }

  SimOutput out;
  out.seed = seed;
  out.k = k;
  out.y.assign(y_all.begin() + burn_in, y_all.end());
  out.z.assign(z_all.begin() + burn_in, z_all.end());
  if (exo) out.x.assign(x_all.begin() + burn_in, x_all.end());
  out.pi_true_path.assign(pi_all.begin() + static_cast<size_t>(burn_in) * k * k,
                          pi_all.end());
  return out;
}

namespace {

Params make_params(const ModelSpec& spec, std::vector<double> mu,
                   std::vector<double> sigma2, const std::vector<double>& pi0) {
  Params p;
  p.mu = std::move(mu);
  p.sigma2 = std::move(sigma2);
  // pi0 holds the baseline probabilities: staying probabilities under the
  // diagonal parameterization, off-diagonal entries (row-major, skipping the
  // diagonal) otherwise. Convert to intercepts through the link inverse.
  TransitionMatrix P(spec.k);
  if (spec.parameterization == Parameterization::Diagonal) {
    for (int i = 0; i < spec.k; ++i) {
      P(i, i) = pi0[i];
      P(i, 1 - i) = 1.0 - pi0[i];
    }
  } else {
    int idx = 0;
    for (int i = 0; i < spec.k; ++i) {
      double off = 0.0;
      for (int j = 0; j < spec.k; ++j) {
        if (j == i) continue;
        P(i, j) = pi0[idx++];
        off += P(i, j);
      }
      P(i, i) = 1.0 - off;
    }
  }
  p.f0 = link_matrix_to_f(P, spec);
  return p;
}

}  // namespace

std::pair<ModelSpec, Params> dgp_preset(int id) {
  ModelSpec spec;
  Params p;
  switch (id) {
    case 1:
      spec = {2, Parameterization::Diagonal, VarianceStructure::Common,
              Dynamics::Constant};
      p = make_params(spec, {-1.0, 1.0}, {0.5}, {0.80, 0.90});
      break;
    case 2:
      spec = {2, Parameterization::Diagonal, VarianceStructure::Common,
              Dynamics::LaggedObs};
      p = make_params(spec, {-1.0, 1.0}, {0.5}, {0.80, 0.90});
      p.theta = {0.15, -0.10};
      break;
    case 3:
      spec = {2, Parameterization::Diagonal, VarianceStructure::Common,
              Dynamics::Exogenous};
      p = make_params(spec, {-1.0, 1.0}, {0.5}, {0.80, 0.90});
      p.gamma = {0.20, -0.20};
      break;
    case 4:
      spec = {2, Parameterization::Diagonal, VarianceStructure::Common,
              Dynamics::ScoreDriven};
      p = make_params(spec, {-1.0, 1.0}, {0.5}, {0.80, 0.90});
      p.a = {0.10, -0.10};
      p.b = {0.90, 0.85};
      break;
    case 5:
      spec = {2, Parameterization::OffDiagonal, VarianceStructure::RegimeSpecific,
              Dynamics::LaggedObs};
      p = make_params(spec, {-1.0, 1.0}, {0.3, 0.7}, {0.20, 0.15});
      p.theta = {0.10, -0.10};
      break;
    case 6:
      spec = {3, Parameterization::OffDiagonal, VarianceStructure::RegimeSpecific,
              Dynamics::Constant};
      p = make_params(spec, {-2.0, 0.0, 2.0}, {0.3, 0.5, 0.8},
                      {0.08, 0.08, 0.10, 0.10, 0.06, 0.06});
      break;
    case 7:
      spec = {3, Parameterization::OffDiagonal, VarianceStructure::RegimeSpecific,
              Dynamics::LaggedObs};
      p = make_params(spec, {-2.0, 0.0, 2.0}, {0.3, 0.5, 0.8},
                      {0.08, 0.08, 0.10, 0.10, 0.06, 0.06});
      p.theta = {0.05, -0.03, 0.04, -0.04, 0.03, -0.05};
      break;
    case 8:
      spec = {3, Parameterization::OffDiagonal, VarianceStructure::RegimeSpecific,
              Dynamics::Exogenous};
      p = make_params(spec, {-2.0, 0.0, 2.0}, {0.3, 0.5, 0.8},
                      {0.08, 0.08, 0.10, 0.10, 0.06, 0.06});
      p.gamma = {0.08, -0.04, 0.05, -0.06, 0.04, -0.07};
      break;
    case 9:
      spec = {3, Parameterization::OffDiagonal, VarianceStructure::RegimeSpecific,
              Dynamics::ScoreDriven};
      p = make_params(spec, {-2.0, 0.0, 2.0}, {0.3, 0.5, 0.8},
                      {0.08, 0.08, 0.10, 0.10, 0.06, 0.06});
      p.a.assign(6, 0.03);
      p.b.assign(6, 0.85);
      break;
    default:
      fail(ErrorCode::InvalidArgument, "DGP id must be in 1..9");
  }
  return {spec, p};
}

}  // namespace mstvtp
