// Licensed under the Apache License 2.0 (see LICENSE file).

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

namespace mstvtp {

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Central-difference step per coordinate, h = eps^{1/3} max(|x|, 1).
double fd_step(double x);

Eigen::VectorXd numerical_gradient(const Objective& f, const Eigen::VectorXd& x);
Eigen::MatrixXd numerical_hessian(const Objective& f, const Eigen::VectorXd& x);

struct BfgsOptions {
  int max_iterations = 500;
  double grad_tol = 1e-5;       // infinity norm of the gradient
  double f_tol = 1e-10;         // relative improvement |df| / (1 + |f|)
  int f_tol_patience = 3;       // consecutive small improvements before stopping
  double stall_grad_tol = 1e-4; // gradient bound for a stalled stop to count as success
  double huge_value = 1e14;     // objective values at/above this are "invalid"
};

struct OptimResult {
  Eigen::VectorXd x;
  double fval = 0.0;
  Eigen::VectorXd grad;
  double grad_inf_norm = 0.0;
  int iterations = 0;
  int n_evals = 0;
  bool success = false;  // stopped at a stationary point, not by failure
  std::string message;
};

/// Dense BFGS with numerical central-difference gradients and Armijo
/// backtracking. The objective may return non-finite or huge values for
/// invalid points; the line search backtracks away from them.
OptimResult minimize_bfgs(const Objective& f, const Eigen::VectorXd& x0,
                          const BfgsOptions& opts = {});

}  // namespace mstvtp
