// Licensed under the Apache License 2.0 (see LICENSE file).

#include "mstvtp/gauss_hermite.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>

#include "mstvtp/common.hpp"

namespace mstvtp {

namespace {

GaussHermiteRule compute_rule(int n) {
  // Symmetric tridiagonal Jacobi matrix for Hermite polynomials:
  // zero diagonal, off-diagonal sqrt(i/2).
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    double b = std::sqrt(i / 2.0);
    J(i, i - 1) = b;
    J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success)
    fail(ErrorCode::Internal, "Gauss-Hermite eigendecomposition failed");
  GaussHermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mu0 = std::sqrt(M_PI);  // integral of e^{-x^2}
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()(i);
    double v = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v * v;
  }
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(int n) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "quadrature order must be >= 1");
  static std::mutex mu;
  static std::map<int, GaussHermiteRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
  return it->second;
}

}  // namespace mstvtp
