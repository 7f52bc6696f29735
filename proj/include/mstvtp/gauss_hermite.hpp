// Licensed under the Apache License 2.0 (see LICENSE file).

#pragma once

#include <vector>

namespace mstvtp {

/// Gauss-Hermite rule for the weight e^{-x^2}: integral f(x) e^{-x^2} dx
/// ~ sum_i w_i f(x_i). For Y ~ N(m, s^2),
/// E[g(Y)] ~ (1/sqrt(pi)) sum_i w_i g(m + sqrt(2) s x_i).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes and weights by Golub-Welsch on the Jacobi matrix. Results are
/// cached per n; the returned reference stays valid for the process lifetime.
const GaussHermiteRule& gauss_hermite(int n);

}  // namespace mstvtp
