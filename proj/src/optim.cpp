// Licensed under the Apache License 2.0 (see LICENSE file).

#include "mstvtp/optim.hpp"

#include <cmath>
#include <limits>

namespace mstvtp {

double fd_step(double x) {
  static const double h0 = std::cbrt(std::numeric_limits<double>::epsilon());
  return h0 * std::max(std::abs(x), 1.0);
}

Eigen::VectorXd numerical_gradient(const Objective& f,
                                   const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd g(n);
  Eigen::VectorXd xp = x;
  for (int i = 0; i < n; ++i) {
    double h = fd_step(x(i));
    double xi = x(i);
    xp(i) = xi + h;
    double fp = f(xp);
    xp(i) = xi - h;
    double fm = f(xp);
    xp(i) = xi;
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixXd numerical_hessian(const Objective& f,
                                  const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd H(n, n);
  Eigen::VectorXd xp = x;
  const double f0 = f(x);
  std::vector<double> h(n);
  for (int i = 0; i < n; ++i) h[i] = fd_step(x(i));

  for (int i = 0; i < n; ++i) {
    double xi = x(i);
    xp(i) = xi + h[i];
    double fp = f(xp);
    xp(i) = xi - h[i];
    double fm = f(xp);
    xp(i) = xi;
    H(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double xi = x(i), xj = x(j);
      xp(i) = xi + h[i];
      xp(j) = xj + h[j];
      double fpp = f(xp);
      xp(j) = xj - h[j];
      double fpm = f(xp);
      xp(i) = xi - h[i];
      double fmm = f(xp);
      xp(j) = xj + h[j];
      double fmp = f(xp);
      xp(i) = xi;
      xp(j) = xj;
      H(i, j) = H(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
    }
  }
  return H;
}

OptimResult minimize_bfgs(const Objective& f, const Eigen::VectorXd& x0,
                          const BfgsOptions& opts) {
  const int n = static_cast<int>(x0.size());
  OptimResult res;
  res.x = x0;
  int n_evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++n_evals;
    double v = f(x);
    return std::isfinite(v) ? v : opts.huge_value;
  };

  double fx = eval(res.x);
  if (fx >= opts.huge_value) {
    res.fval = fx;
    res.n_evals = n_evals;
    res.message = "objective invalid at the starting point";
    return res;
  }
  auto grad = [&](const Eigen::VectorXd& x) {
    n_evals += 2 * n;
    return numerical_gradient([&](const Eigen::VectorXd& p) {
      double v = f(p);
      return std::isfinite(v) ? v : opts.huge_value;
    }, x);
  };

  Eigen::VectorXd g = grad(res.x);
  if (!g.allFinite()) {
    res.fval = fx;
    res.n_evals = n_evals;
    res.message = "gradient non-finite at the starting point";
    return res;
  }

  Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(n, n);
  int small_improvements = 0;
  int iter = 0;
  std::string message = "maximum iterations reached";
  bool success = false;

  for (; iter < opts.max_iterations; ++iter) {
    if (g.lpNorm<Eigen::Infinity>() < opts.grad_tol) {
      success = true;
      message = "gradient norm below tolerance";
      break;
    }
    Eigen::VectorXd p = -Hinv * g;
    double slope = g.dot(p);
    if (!(slope < 0.0)) {  // not a descent direction: reset to steepest descent
      Hinv.setIdentity();
      p = -g;
      slope = g.dot(p);
    }

    // Armijo backtracking.
    const double c1 = 1e-4;
    double alpha = 1.0;
    double fnew = 0.0;
    Eigen::VectorXd xnew;
    bool ls_ok = false;
    for (int ls = 0; ls < 50; ++ls) {
      xnew = res.x + alpha * p;
      fnew = eval(xnew);
      if (fnew < opts.huge_value && fnew <= fx + c1 * alpha * slope) {
        ls_ok = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!ls_ok) {
      // No acceptable step along p. gradient may still certify success below.
      message = "line search failed";
      break;
    }

    Eigen::VectorXd gnew = grad(xnew);
    if (!gnew.allFinite()) {
      message = "gradient became non-finite";
      break;
    }
    Eigen::VectorXd s = xnew - res.x;
    Eigen::VectorXd yv = gnew - g;
    double sy = s.dot(yv);
    if (iter == 0 && sy > 0.0) {
      // Scale the initial inverse Hessian before the first update.
      Hinv *= sy / yv.squaredNorm();
    }
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      double rho = 1.0 / sy;
      Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      Hinv = (I - rho * s * yv.transpose()) * Hinv *
                 (I - rho * yv * s.transpose()) +
             rho * s * s.transpose();
    }

    double df = fx - fnew;
    res.x = xnew;
    fx = fnew;
    g = gnew;
    if (df <= opts.f_tol * (1.0 + std::abs(fx))) {
      ++small_improvements;
      // A stalled objective only counts as convergence once the gradient
      // has been polished down as well; otherwise keep iterating a while,
      // then give up unconverged (rough surfaces stall with large
      // gradients and would burn the whole iteration budget).
      if (small_improvements >= opts.f_tol_patience &&
          g.lpNorm<Eigen::Infinity>() < opts.stall_grad_tol) {
        success = true;
        message = "objective improvement below tolerance";
        ++iter;
        break;
      }
      if (small_improvements >= 3 * opts.f_tol_patience) {
        message = "stalled with a large gradient";
        ++iter;
        break;
      }
    } else {
      small_improvements = 0;
    }
  }

  res.fval = fx;
  res.grad = g;
  res.grad_inf_norm = g.lpNorm<Eigen::Infinity>();
  res.iterations = iter;
  res.n_evals = n_evals;
  // A failed line search at a flat point still counts as converged when the
  // gradient is small.
  if (!success && res.grad_inf_norm < opts.grad_tol) success = true;
  res.success = success;
  res.message = message;
  return res;
}

}  // namespace mstvtp
