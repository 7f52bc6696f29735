// Licensed under the Apache License 2.0 (see LICENSE file).

#include "mstvtp/estimate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "mstvtp/link.hpp"
#include "mstvtp/optim.hpp"
#include "mstvtp/rng.hpp"

namespace mstvtp {

Eigen::VectorXd TransformMap::forward(const Eigen::VectorXd& natural) const {
  Eigen::VectorXd u(natural.size());
  for (int i = 0; i < natural.size(); ++i) {
    switch (kinds[i]) {
      case Kind::Identity:
        u(i) = natural(i);
        break;
      case Kind::LogVariance:
        u(i) = std::log(natural(i) - kVarianceFloor);
        break;
      case Kind::Logit:
        u(i) = std::log(natural(i) / (1.0 - natural(i)));
        break;
    }
  }
  return u;
}

Eigen::VectorXd TransformMap::inverse(const Eigen::VectorXd& u) const {
  Eigen::VectorXd natural(u.size());
  for (int i = 0; i < u.size(); ++i) {
    switch (kinds[i]) {
      case Kind::Identity:
        natural(i) = u(i);
        break;
      case Kind::LogVariance:
        natural(i) = kVarianceFloor + std::exp(u(i));
        break;
      case Kind::Logit:
        natural(i) = 1.0 / (1.0 + std::exp(-u(i)));
        break;
    }
  }
  return natural;
}

Eigen::VectorXd TransformMap::jacobian_diag(const Eigen::VectorXd& u) const {
  Eigen::VectorXd j(u.size());
  for (int i = 0; i < u.size(); ++i) {
    switch (kinds[i]) {
      case Kind::Identity:
        j(i) = 1.0;
        break;
      case Kind::LogVariance:
        j(i) = std::exp(u(i));
        break;
      case Kind::Logit: {
        double e = 1.0 / (1.0 + std::exp(-u(i)));
        j(i) = e * (1.0 - e);
        break;
      }
    }
  }
  return j;
}

TransformMap transforms_for(const ModelSpec& spec) {
  spec.validate();
  TransformMap m;
  auto add = [&](TransformMap::Kind k, const std::string& name) {
    m.kinds.push_back(k);
    m.names.push_back(name);
  };
  for (int i = 0; i < spec.k; ++i)
    add(TransformMap::Kind::Identity, "mu" + std::to_string(i + 1));
  for (int i = 0; i < spec.sigma_dim(); ++i)
    add(TransformMap::Kind::LogVariance, "sigma2_" + std::to_string(i + 1));
  const int d = spec.transition_dim();
  for (int i = 0; i < d; ++i)
    add(TransformMap::Kind::Identity, "f0_" + std::to_string(i + 1));
  switch (spec.dynamics) {
    case Dynamics::Constant:
      break;
    case Dynamics::LaggedObs:
      for (int i = 0; i < d; ++i)
        add(TransformMap::Kind::Identity, "theta_" + std::to_string(i + 1));
      break;
    case Dynamics::Exogenous:
      for (int i = 0; i < d; ++i)
        add(TransformMap::Kind::Identity, "gamma_" + std::to_string(i + 1));
      break;
    case Dynamics::ScoreDriven:
      for (int i = 0; i < d; ++i)
        add(TransformMap::Kind::Identity, "a_" + std::to_string(i + 1));
      for (int i = 0; i < d; ++i)
        add(TransformMap::Kind::Logit, "b_" + std::to_string(i + 1));
      break;
  }
  return m;
}

Eigen::VectorXd pack_params(const Params& p, const ModelSpec& spec) {
  Eigen::VectorXd v(spec.param_count());
  int idx = 0;
  auto put = [&](const std::vector<double>& src) {
    for (double e : src) v(idx++) = e;
  };
  put(p.mu);
  put(p.sigma2);
  put(p.f0);
  switch (spec.dynamics) {
    case Dynamics::Constant: break;
    case Dynamics::LaggedObs: put(p.theta); break;
    case Dynamics::Exogenous: put(p.gamma); break;
    case Dynamics::ScoreDriven:
      put(p.a);
      put(p.b);
      break;
  }
  return v;
}

Params unpack_params(const Eigen::VectorXd& natural, const ModelSpec& spec) {
  Params p;
  int idx = 0;
  auto take = [&](std::vector<double>& dst, int n) {
    dst.resize(n);
    for (int i = 0; i < n; ++i) dst[i] = natural(idx++);
  };
  const int d = spec.transition_dim();
  take(p.mu, spec.k);
  take(p.sigma2, spec.sigma_dim());
  take(p.f0, d);
  switch (spec.dynamics) {
    case Dynamics::Constant: break;
    case Dynamics::LaggedObs: take(p.theta, d); break;
    case Dynamics::Exogenous: take(p.gamma, d); break;
    case Dynamics::ScoreDriven:
      take(p.a, d);
      take(p.b, d);
      break;
  }
  return p;
}

namespace {

double sample_quantile(const std::vector<double>& sorted, double level) {
  const double pos = level * (sorted.size() - 1);
  const size_t lo = static_cast<size_t>(pos);
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double w = pos - lo;
  return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

Params draw_start(const Dataset& data, const ModelSpec& spec, Rng& rng,
                  bool collapse_start) {
  const int k = spec.k;
  const int d = spec.transition_dim();
  std::vector<double> sorted = data.y;
  std::sort(sorted.begin(), sorted.end());
  double mean = 0.0;
  for (double v : data.y) mean += v;
  mean /= data.y.size();
  double var = 0.0;
  for (double v : data.y) var += (v - mean) * (v - mean);
  var /= data.y.size();
  double sd = std::sqrt(var);

  Params p;
  for (int i = 0; i < k; ++i) {
    double q = sample_quantile(sorted, (2.0 * i + 1.0) / (2.0 * k));
    p.mu.push_back(q + rng.normal(0.0, 0.25 * sd));
  }
  for (int i = 0; i < spec.sigma_dim(); ++i)
    p.sigma2.push_back(var * rng.uniform(0.3, 1.5));

  if (d > 0) {
    TransitionMatrix P(k);
    for (int i = 0; i < k; ++i) {
      double stay = rng.uniform(0.6, 0.95);
      P(i, i) = stay;
      if (k == 2) {
        P(i, 1 - i) = 1.0 - stay;
      } else {
        std::vector<double> w(k, 0.0);
        double wsum = 0.0;
        for (int j = 0; j < k; ++j)
          if (j != i) wsum += (w[j] = rng.uniform(0.5, 1.5));
        for (int j = 0; j < k; ++j)
          if (j != i) P(i, j) = (1.0 - stay) * w[j] / wsum;
      }
    }
    p.f0 = link_matrix_to_f(P, spec);
  }
  switch (spec.dynamics) {
    case Dynamics::Constant:
      break;
    case Dynamics::LaggedObs:
      for (int i = 0; i < d; ++i) p.theta.push_back(rng.normal(0.0, 0.1));
      break;
    case Dynamics::Exogenous:
      for (int i = 0; i < d; ++i) p.gamma.push_back(rng.normal(0.0, 0.1));
      break;
    case Dynamics::ScoreDriven:
      // The first start sits at the exact constant-filter reduction A = 0;
      // inside the fallback ball the A-subspace is flat, so the optimizer
      // can converge there even when every noisy-score start fails. Draw
      // count stays fixed either way.
      for (int i = 0; i < d; ++i) {
        double a = rng.normal(0.0, 0.1);
        p.a.push_back(collapse_start ? 0.0 : a);
      }
      for (int i = 0; i < d; ++i) p.b.push_back(rng.uniform(0.7, 0.95));
      break;
  }
  return p;
}

Objective make_objective(const Dataset& data, const ModelSpec& spec,
                         const TransformMap& tmap, int cutoff) {
  return [&data, spec, tmap, cutoff](const Eigen::VectorXd& u) -> double {
    for (int i = 0; i < u.size(); ++i)
      if (!std::isfinite(u(i))) return std::nan("");
    try {
      Params p = unpack_params(tmap.inverse(u), spec);
      FilterOutput out = run_filter(data, spec, p, cutoff);
      if (out.degenerate || !std::isfinite(out.loglik)) return std::nan("");
      return -out.loglik;
    } catch (const Error&) {
      return std::nan("");
    }
  };
}

}  // namespace

SeResult standard_errors(const Dataset& data, const ModelSpec& spec,
                         const Params& params_hat, int cutoff) {
  TransformMap tmap = transforms_for(spec);
  Objective obj = make_objective(data, spec, tmap, cutoff);
  Eigen::VectorXd u = tmap.forward(pack_params(params_hat, spec));
  SeResult res;
  double f0 = obj(u);
  if (!std::isfinite(f0)) return res;
  res.hessian = numerical_hessian(obj, u);
  if (!res.hessian.allFinite()) return res;
  const int p = static_cast<int>(u.size());

  // Coordinates inside the score-fallback ball leave exactly-zero Hessian
  // rows (the likelihood is flat in A and B there): the fitted model has
  // collapsed to the constant reduction, whose uncertainty lives on the
  // remaining block. Those coordinates get NaN standard errors.
  std::vector<int> active;
  for (int i = 0; i < p; ++i) {
    double row_mag = 0.0;
    for (int j = 0; j < p; ++j) row_mag = std::max(row_mag, std::abs(res.hessian(i, j)));
    if (row_mag > 0.0) active.push_back(i);
  }
  if (active.empty()) return res;
  Eigen::MatrixXd H(active.size(), active.size());
  for (size_t i = 0; i < active.size(); ++i)
    for (size_t j = 0; j < active.size(); ++j)
      H(i, j) = res.hessian(active[i], active[j]);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  res.min_hessian_eigenvalue = es.eigenvalues().minCoeff();
  if (res.min_hessian_eigenvalue <= 0.0) return res;
  Eigen::MatrixXd cov_active = es.eigenvectors() *
                               es.eigenvalues().cwiseInverse().asDiagonal() *
                               es.eigenvectors().transpose();
  res.cov = Eigen::MatrixXd::Zero(p, p);
  for (size_t i = 0; i < active.size(); ++i)
    for (size_t j = 0; j < active.size(); ++j)
      res.cov(active[i], active[j]) = cov_active(i, j);

  Eigen::VectorXd jd = tmap.jacobian_diag(u);
  res.se.assign(p, std::numeric_limits<double>::quiet_NaN());
  for (int i = 0; i < p; ++i) res.cov(i, i) = std::numeric_limits<double>::quiet_NaN();
  for (size_t i = 0; i < active.size(); ++i) {
    int ii = active[i];
    res.cov(ii, ii) = cov_active(i, i);
    res.se[ii] = std::abs(jd(ii)) * std::sqrt(cov_active(i, i));
  }
  res.available = true;
  return res;
}

std::vector<double> pi0_values(const Params& params, const ModelSpec& spec) {
  TransitionMatrix P = link_f_to_matrix(params.f0, spec);
  const int d = spec.transition_dim();
  std::vector<double> out(d);
  if (spec.parameterization == Parameterization::Diagonal) {
    for (int i = 0; i < spec.k; ++i) out[i] = P(i, i);
    return out;
  }
  LinkJacobian J = link_jacobian_at(P, spec);
  for (int m = 0; m < d; ++m) out[m] = P(J.row[m], J.col[m]);
  return out;
}

std::vector<double> pi0_standard_errors(
    const Params& params_hat, const ModelSpec& spec,
    const Eigen::MatrixXd& cov_unconstrained) {
  const int k = spec.k;
  const int d = spec.transition_dim();
  const int offset = k + spec.sigma_dim();  // f0 block start
  TransitionMatrix P = link_f_to_matrix(params_hat.f0, spec);
  LinkJacobian J = link_jacobian_at(P, spec);
  // G(m, l) = d pi0_m / d f_l; entries vanish across rows.
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(d, d);
  for (int m = 0; m < d; ++m)
    for (int l = 0; l < d; ++l)
      if (J.row[l] == J.row[m]) G(m, l) = J.d(l, J.col[m]);
  Eigen::MatrixXd cov_f = cov_unconstrained.block(offset, offset, d, d);
  Eigen::MatrixXd V = G * cov_f * G.transpose();
  std::vector<double> se(d);
  for (int m = 0; m < d; ++m) se[m] = std::sqrt(std::max(0.0, V(m, m)));
  return se;
}

EstimationResult estimate(const Dataset& data, const ModelSpec& spec,
                          int n_starts, std::uint64_t seed, int cutoff,
                          int n_threads) {
  data.validate();
  spec.validate();
  if (n_starts < 1) fail(ErrorCode::InvalidArgument, "n_starts must be >= 1");
  if (spec.dynamics == Dynamics::Exogenous && !data.has_covariate())
    fail(ErrorCode::InvalidArgument,
         "exogenous dynamics require a covariate series");
  if (spec.dynamics != Dynamics::Exogenous && data.has_covariate()) {
    // harmless; the covariate is ignored
  }

  TransformMap tmap = transforms_for(spec);
  Objective obj = make_objective(data, spec, tmap, cutoff);
  const int T = data.length();

  EstimationResult res;
  res.n_params = spec.param_count();
  res.t_effective = T - cutoff;
  res.starts.resize(n_starts);

  // Starting points are drawn sequentially from one stream so the set of
  // starts never depends on thread scheduling.
  Rng rng(seed);
  std::vector<Eigen::VectorXd> u0(n_starts);
  std::vector<bool> valid(n_starts, false);
  for (int s = 0; s < n_starts; ++s) {
    bool collapse = spec.dynamics == Dynamics::ScoreDriven && s == 0;
    for (int attempt = 0; attempt < 20; ++attempt) {
      Params start = draw_start(data, spec, rng, collapse && attempt == 0);
      Eigen::VectorXd u;
      try {
        u = tmap.forward(pack_params(start, spec));
      } catch (const Error&) {
        continue;
      }
      if (!u.allFinite()) continue;
      double v = obj(u);
      if (std::isfinite(v)) {
        u0[s] = u;
        valid[s] = true;
        break;
      }
    }
    if (!valid[s]) res.starts[s].message = "no valid starting point in 20 draws";
  }

  std::vector<OptimResult> runs(n_starts);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int s = next.fetch_add(1);
      if (s >= n_starts) break;
      if (!valid[s]) continue;
      runs[s] = minimize_bfgs(obj, u0[s]);
    }
  };
  if (n_threads > 1) {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  } else {
    worker();
  }

  int best = -1, best_any = -1;
  for (int s = 0; s < n_starts; ++s) {
    if (!valid[s]) continue;
    const OptimResult& r = runs[s];
    StartDiagnostics& diag = res.starts[s];
    diag.valid = true;
    diag.loglik = -r.fval;
    diag.grad_inf_norm = r.grad_inf_norm;
    diag.iterations = r.iterations;
    diag.message = r.message;
    diag.converged = r.success && r.grad_inf_norm < kConvergenceGradTol &&
                     std::isfinite(r.fval) && r.fval < 1e13;
    if (diag.converged) {
      ++res.n_starts_converged;
      if (best < 0 || r.fval < runs[best].fval) best = s;
    }
    if (best_any < 0 || r.fval < runs[best_any].fval) best_any = s;
  }

  res.converged = res.n_starts_converged >= 1;
  int use = best >= 0 ? best : best_any;
  if (use < 0) return res;  // every start failed to even begin

  res.best_start_index = use;
  res.params_hat = unpack_params(tmap.inverse(runs[use].x), spec);
  // Reported loglik is recomputed through the filter at params_hat.
  FilterOutput check = run_filter(data, spec, res.params_hat, cutoff);
  res.loglik = check.loglik;
  res.aic = 2.0 * res.n_params - 2.0 * res.loglik;
  res.bic = res.n_params * std::log(static_cast<double>(res.t_effective)) -
            2.0 * res.loglik;

  if (res.converged) {
    SeResult se = standard_errors(data, spec, res.params_hat, cutoff);
    res.se_available = se.available;
    res.se_min_eigenvalue = se.min_hessian_eigenvalue;
    if (se.available) {
      res.se = se.se;
      res.cov_unconstrained = se.cov;
    }
  }
  return res;
}

}  // namespace mstvtp
