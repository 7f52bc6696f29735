// Licensed under the Apache License 2.0 (see LICENSE file).

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mstvtp/filter.hpp"
#include "mstvtp/types.hpp"

namespace mstvtp {

/// Practical lower bound on regime variances, enforced through the log
/// transform (sigma2 = floor + exp(u)).
inline constexpr double kVarianceFloor = 1e-8;

/// Gradient infinity-norm below which an optimizer run counts as converged.
inline constexpr double kConvergenceGradTol = 1e-4;

/// Bijection between the natural parameter vector (packing order: mu,
/// sigma2, f0, then theta | gamma | a, b) and the unconstrained space the
/// optimizer works in: mu, f0 and slope coefficients identity, sigma2 log
/// with a floor, b logit.
struct TransformMap {
  enum class Kind { Identity, LogVariance, Logit };
  std::vector<Kind> kinds;
  std::vector<std::string> names;  // "mu1", "sigma2_1", "f0_1", "theta1", ...

  int dim() const { return static_cast<int>(kinds.size()); }
  Eigen::VectorXd forward(const Eigen::VectorXd& natural) const;
  Eigen::VectorXd inverse(const Eigen::VectorXd& u) const;
  /// d(natural_k)/d(u_k), evaluated at u.
  Eigen::VectorXd jacobian_diag(const Eigen::VectorXd& u) const;
};

TransformMap transforms_for(const ModelSpec& spec);

Eigen::VectorXd pack_params(const Params& p, const ModelSpec& spec);
Params unpack_params(const Eigen::VectorXd& natural, const ModelSpec& spec);

struct StartDiagnostics {
  bool valid = false;      // a usable starting point was found
  bool converged = false;  // optimizer success + small gradient + finite value
  double loglik = 0.0;
  double grad_inf_norm = 0.0;
  int iterations = 0;
  std::string message;
};

struct SeResult {
  std::vector<double> se;  // natural scale, packing order
  bool available = false;
  double min_hessian_eigenvalue = 0.0;
  Eigen::MatrixXd hessian;  // of the negative loglik, unconstrained space
  Eigen::MatrixXd cov;      // inverse Hessian
};

struct EstimationResult {
  Params params_hat;
  std::vector<double> se;
  bool se_available = false;
  double se_min_eigenvalue = 0.0;
  double loglik = -std::numeric_limits<double>::infinity();
  double aic = 0.0;
  double bic = 0.0;
  int n_params = 0;
  int t_effective = 0;
  bool converged = false;
  int n_starts_converged = 0;
  int best_start_index = -1;
  Eigen::MatrixXd cov_unconstrained;
  std::vector<StartDiagnostics> starts;
};

/// Multi-start maximum likelihood: draw n_starts starting points, run BFGS
/// on the negative log-likelihood in unconstrained space, keep the best
/// converged run. Zero converged starts yields converged = false with
/// diagnostics retained, never an exception. Starts run concurrently when
/// n_threads > 1; the outcome does not depend on scheduling.
EstimationResult estimate(const Dataset& data, const ModelSpec& spec,
                          int n_starts, std::uint64_t seed, int cutoff,
                          int n_threads = 1);

/// Central-difference Hessian of the negative log-likelihood at params_hat
/// in the unconstrained space; delta-method standard errors on the natural
/// scale. Not positive definite => unavailable, with the offending
/// eigenvalue reported.
SeResult standard_errors(const Dataset& data, const ModelSpec& spec,
                         const Params& params_hat, int cutoff);

/// Delta-method standard errors of the baseline transition probabilities
/// pi0 = link(f0): Diagonal gives the staying probabilities, OffDiagonal the
/// off-diagonal entries in f-vector order. Uses the f0 block of the
/// unconstrained covariance (full multivariate delta through the link).
std::vector<double> pi0_standard_errors(const Params& params_hat,
                                        const ModelSpec& spec,
                                        const Eigen::MatrixXd& cov_unconstrained);

/// Values of pi0 = link(f0) in the same order as pi0_standard_errors.
std::vector<double> pi0_values(const Params& params, const ModelSpec& spec);

}  // namespace mstvtp
