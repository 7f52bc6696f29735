// Licensed under the Apache License 2.0 (see LICENSE file).

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mstvtp/link.hpp"
#include "mstvtp/types.hpp"

namespace mstvtp {

/// Below this bound on max_i |A_i| the score recursion is numerically flat
/// and the filter falls back to constant transition probabilities at
/// pi = link(f0). The ball must contain the central-difference stencil
/// (h ~ 6e-6) so the optimizer sees an exactly flat A-subspace inside it,
/// and stays two orders of magnitude under genuine score loadings.
inline constexpr double kGasFallbackThreshold = 1e-4;

/// Ridge added to the Fisher eigenvalues before the inverse square root,
/// and the condition bound beyond which scaling falls back to the identity.
inline constexpr double kFisherRidge = 1e-8;
inline constexpr double kFisherMaxCondition = 1e12;

inline constexpr int kGasQuadratureNodes = 30;

/// s = (fisher + ridge I)^{-1/2} nabla by eigendecomposition. Conditional
/// on the filter state, E[s s^T] is the identity wherever the ridge is
/// negligible against the Fisher eigenvalues; directions with ~zero
/// information stay damped instead of being amplified by 1/sqrt(ridge).
struct ScaledScore {
  std::vector<double> nabla;   // raw score d/df log p(y | info)
  std::vector<double> s;       // scaled score
  std::vector<double> fisher;  // d x d conditional Fisher information, row-major
  enum class Scaling { InverseSqrtFisher, Identity };
  Scaling scaling_used = Scaling::InverseSqrtFisher;
};

/// f_t = f0 + theta * y_{t-1}.
std::vector<double> f_lagged_obs(const Params& params, double y_prev);

/// f_t = f0 + gamma * x_{t-1}.
std::vector<double> f_exogenous(const Params& params, double x_prev);

/// Mean-reverting score recursion, f_t = omega + A s_{t-1} + B (f_{t-1} -
/// omega), with omega stored in params.f0. Initialization is f_1 = omega.
std::vector<double> f_score_step(const std::vector<double>& f_prev,
                                 const std::vector<double>& s_prev,
                                 const Params& params);

/// True when max_i |A_i| < threshold; callers then run the constant filter.
bool gas_fallback_active(const Params& params,
                         double threshold = kGasFallbackThreshold);

/// Score of the one-step predictive log-density with respect to f, its
/// conditional Fisher information (by Gauss-Hermite quadrature over the
/// predictive mixture), and the inverse-square-root-scaled score.
/// xi_filtered_prev are the filtered regime probabilities entering the step.
ScaledScore gas_score(double y, const std::vector<double>& xi_filtered_prev,
                      const std::vector<double>& f, const Params& params,
                      const ModelSpec& spec);

/// Reusable score computation for the filter's hot loop: quadrature tables
/// depend only on (mu, sigma2) and are built once per likelihood evaluation.
class GasEngine {
 public:
  GasEngine(const ModelSpec& spec, const Params& params,
            int n_nodes = kGasQuadratureNodes);

  /// Evaluates score, Fisher and scaled score at observation y. Returns
  /// false if the predictive density degenerates (p <= 0 or non-finite).
  /// With diag_only the off-diagonal Fisher entries are skipped (the filter
  /// needs only the diagonal for scaling).
  bool compute(double y, const double* xi_prev, const TransitionMatrix& P,
               bool diag_only = false);

  int dim() const { return d_; }
  const std::vector<double>& raw() const { return nabla_; }
  const std::vector<double>& scaled() const { return s_; }
  const Eigen::MatrixXd& fisher() const { return fisher_; }
  bool identity_scaling() const { return identity_scaling_; }

 private:
  const ModelSpec& spec_;
  const Params& params_;
  int k_, d_, n_nodes_;
  std::vector<double> log_norm_;   // -0.5 log(2 pi sigma_j^2)
  std::vector<double> inv2s2_;     // 1 / (2 sigma_j^2)
  std::vector<double> node_dens_;  // eta_j at node (c,q): [(c*n+q)*k + j]
  std::vector<double> node_w_;     // quadrature weights / sqrt(pi)
  std::vector<double> eta_, xi_pred_, g_;
  std::vector<double> nabla_, s_;
  LinkJacobian jac_;
  Eigen::MatrixXd fisher_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_;
  bool identity_scaling_ = false;

  void scale_score();
};

}  // namespace mstvtp
