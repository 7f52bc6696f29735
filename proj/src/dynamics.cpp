// Licensed under the Apache License 2.0 (see LICENSE file).

#include "mstvtp/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "mstvtp/gauss_hermite.hpp"

namespace mstvtp {

namespace {
// Predictive densities below this are treated as numerically zero inside the
// Fisher quadrature; the resulting near-singular matrix is handled by the
// condition-number fallback.
constexpr double kDensityFloor = 1e-290;
}  // namespace

std::vector<double> f_lagged_obs(const Params& params, double y_prev) {
  if (!std::isfinite(y_prev))
    fail(ErrorCode::NonFinite, "lagged observation is non-finite");
  std::vector<double> f(params.f0);
  for (size_t i = 0; i < f.size(); ++i) f[i] += params.theta[i] * y_prev;
  return f;
}

std::vector<double> f_exogenous(const Params& params, double x_prev) {
  if (!std::isfinite(x_prev))
    fail(ErrorCode::NonFinite, "lagged covariate is non-finite");
  std::vector<double> f(params.f0);
  for (size_t i = 0; i < f.size(); ++i) f[i] += params.gamma[i] * x_prev;
  return f;
}

std::vector<double> f_score_step(const std::vector<double>& f_prev,
                                 const std::vector<double>& s_prev,
                                 const Params& params) {
  const size_t d = params.f0.size();
  if (f_prev.size() != d || s_prev.size() != d)
    fail(ErrorCode::Dimension, "score step dimension mismatch");
  for (double e : params.b)
    if (!(e > 0.0 && e < 1.0))
      fail(ErrorCode::Domain, "score recursion requires B entries in (0,1)");
  std::vector<double> f(d);
  for (size_t i = 0; i < d; ++i) {
    double omega = params.f0[i];
    f[i] = omega + params.a[i] * s_prev[i] + params.b[i] * (f_prev[i] - omega);
  }
  return f;
}

bool gas_fallback_active(const Params& params, double threshold) {
  double amax = 0.0;
  for (double e : params.a) amax = std::max(amax, std::abs(e));
  return amax < threshold;
}

GasEngine::GasEngine(const ModelSpec& spec, const Params& params, int n_nodes)
    : spec_(spec),
      params_(params),
      k_(spec.k),
      d_(spec.transition_dim()),
      n_nodes_(n_nodes) {
  const GaussHermiteRule& rule = gauss_hermite(n_nodes_);
  log_norm_.resize(k_);
  inv2s2_.resize(k_);
  for (int j = 0; j < k_; ++j) {
    double s2 = params.sigma2_of(j, spec);
    log_norm_[j] = -0.5 * std::log(2.0 * M_PI * s2);
    inv2s2_[j] = 0.5 / s2;
  }
  node_w_.resize(n_nodes_);
  const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
  for (int q = 0; q < n_nodes_; ++q) node_w_[q] = rule.weights[q] * inv_sqrt_pi;
  // Density of every regime at every quadrature node of every mixture
  // component; depends only on (mu, sigma2).
  node_dens_.resize(static_cast<size_t>(k_) * n_nodes_ * k_);
  for (int c = 0; c < k_; ++c) {
    double sc = std::sqrt(params.sigma2_of(c, spec));
    for (int q = 0; q < n_nodes_; ++q) {
      double y = params.mu[c] + std::sqrt(2.0) * sc * rule.nodes[q];
      double* row = &node_dens_[(static_cast<size_t>(c) * n_nodes_ + q) * k_];
      for (int j = 0; j < k_; ++j) {
        double z = y - params.mu[j];
        row[j] = std::exp(log_norm_[j] - z * z * inv2s2_[j]);
      }
    }
  }
  eta_.resize(k_);
  xi_pred_.resize(k_);
  g_.resize(d_);
  nabla_.resize(d_);
  s_.resize(d_);
  fisher_.setZero(d_, d_);
}

bool GasEngine::compute(double y, const double* xi_prev,
                        const TransitionMatrix& P, bool diag_only) {
  link_jacobian_fill(P, spec_, jac_);
  for (int j = 0; j < k_; ++j) {
    double acc = 0.0;
    for (int i = 0; i < k_; ++i) acc += xi_prev[i] * P(i, j);
    xi_pred_[j] = acc;
    double z = y - params_.mu[j];
    eta_[j] = std::exp(log_norm_[j] - z * z * inv2s2_[j]);
  }
  double p = 0.0;
  for (int j = 0; j < k_; ++j) p += xi_pred_[j] * eta_[j];
  if (!(p > 0.0) || !std::isfinite(p)) return false;

  for (int m = 0; m < d_; ++m) {
    const double* jrow = &jac_.jac[static_cast<size_t>(m) * k_];
    double acc = 0.0;
    for (int j = 0; j < k_; ++j) acc += eta_[j] * jrow[j];
    nabla_[m] = xi_prev[jac_.row[m]] * acc / p;
  }

  // Fisher information E[nabla nabla^T] under the predictive mixture,
  // component by component via Gauss-Hermite.
  fisher_.setZero();
  for (int c = 0; c < k_; ++c) {
    double wc = xi_pred_[c];
    if (wc <= 0.0) continue;
    for (int q = 0; q < n_nodes_; ++q) {
      const double* dens = &node_dens_[(static_cast<size_t>(c) * n_nodes_ + q) * k_];
      double pq = 0.0;
      for (int j = 0; j < k_; ++j) pq += xi_pred_[j] * dens[j];
      pq = std::max(pq, kDensityFloor);
      for (int m = 0; m < d_; ++m) {
        const double* jrow = &jac_.jac[static_cast<size_t>(m) * k_];
        double acc = 0.0;
        for (int j = 0; j < k_; ++j) acc += dens[j] * jrow[j];
        g_[m] = xi_prev[jac_.row[m]] * acc / pq;
      }
      double w = wc * node_w_[q];
      if (diag_only) {
        for (int m = 0; m < d_; ++m) fisher_(m, m) += w * g_[m] * g_[m];
      } else {
        for (int m = 0; m < d_; ++m)
          for (int l = m; l < d_; ++l) fisher_(m, l) += w * g_[m] * g_[l];
      }
    }
  }
  if (!diag_only)
    for (int m = 0; m < d_; ++m)
      for (int l = 0; l < m; ++l) fisher_(m, l) = fisher_(l, m);

  for (double v : nabla_)
    if (!std::isfinite(v)) return false;

  scale_score();
  return true;
}

void GasEngine::scale_score() {
  identity_scaling_ = false;
  if (d_ == 0) return;
  eig_.compute(fisher_);
  if (eig_.info() != Eigen::Success) {
    identity_scaling_ = true;
    s_ = nabla_;
    return;
  }
  double lam_min = eig_.eigenvalues().minCoeff() + kFisherRidge;
  double lam_max = eig_.eigenvalues().maxCoeff() + kFisherRidge;
  if (!(lam_min > 0.0) || !std::isfinite(lam_max) ||
      lam_max / lam_min > kFisherMaxCondition) {
    identity_scaling_ = true;
    s_ = nabla_;
    return;
  }
  // s = V diag(1/sqrt(lambda + ridge)) V^T nabla
  Eigen::Map<const Eigen::VectorXd> nab(nabla_.data(), d_);
  Eigen::VectorXd proj = eig_.eigenvectors().transpose() * nab;
  for (int i = 0; i < d_; ++i)
    proj(i) /= std::sqrt(eig_.eigenvalues()(i) + kFisherRidge);
  Eigen::VectorXd s = eig_.eigenvectors() * proj;
  for (int i = 0; i < d_; ++i) s_[i] = s(i);
}

ScaledScore gas_score(double y, const std::vector<double>& xi_filtered_prev,
                      const std::vector<double>& f, const Params& params,
                      const ModelSpec& spec) {
  params.validate(spec);
  if (static_cast<int>(xi_filtered_prev.size()) != spec.k)
    fail(ErrorCode::Dimension, "filtered probability vector has wrong length");
  double sum = 0.0;
  for (double v : xi_filtered_prev) sum += v;
  if (std::abs(sum - 1.0) > 1e-8)
    fail(ErrorCode::InvalidArgument, "filtered probabilities must sum to 1");
  TransitionMatrix P = link_f_to_matrix(f, spec);
  GasEngine engine(spec, params);
  if (!engine.compute(y, xi_filtered_prev.data(), P))
    fail(ErrorCode::Degenerate, "predictive density degenerated in score");
  ScaledScore out;
  out.nabla = engine.raw();
  out.s = engine.scaled();
  const int d = engine.dim();
  out.fisher.resize(static_cast<size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      out.fisher[static_cast<size_t>(i) * d + j] = engine.fisher()(i, j);
  out.scaling_used = engine.identity_scaling()
                         ? ScaledScore::Scaling::Identity
                         : ScaledScore::Scaling::InverseSqrtFisher;
  return out;
}

}  // namespace mstvtp
