// Licensed under the Apache License 2.0 (see LICENSE file).

#include "mstvtp/link.hpp"

#include <algorithm>
#include <cmath>

namespace mstvtp {

namespace {

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

void check_f(const std::vector<double>& f, const ModelSpec& spec) {
  if (static_cast<int>(f.size()) != spec.transition_dim())
    fail(ErrorCode::Dimension,
         "transition parameter vector has length " + std::to_string(f.size()) +
             ", expected " + std::to_string(spec.transition_dim()));
  for (double v : f)
    if (!std::isfinite(v))
      fail(ErrorCode::NonFinite, "non-finite transition parameter");
}

}  // namespace

int f_index(int i, int j, const ModelSpec& spec) {
  if (spec.parameterization == Parameterization::Diagonal) return i;
  int idx = i * (spec.k - 1);
  idx += j < i ? j : j - 1;
  return idx;
}

TransitionMatrix link_f_to_matrix(const std::vector<double>& f,
                                  const ModelSpec& spec) {
  check_f(f, spec);
  const int k = spec.k;
  TransitionMatrix P(k);
  if (k == 1) {
    P(0, 0) = 1.0;
    return P;
  }
  if (spec.parameterization == Parameterization::Diagonal) {
    for (int i = 0; i < k; ++i) {
      double stay = logistic(f[i]);
      P(i, i) = stay;
      P(i, 1 - i) = 1.0 - stay;
    }
    return P;
  }
  for (int i = 0; i < k; ++i) {
    // Reference category is the diagonal entry with implicit f_ii = 0.
    double m = 0.0;
    for (int j = 0; j < k; ++j)
      if (j != i) m = std::max(m, f[f_index(i, j, spec)]);
    double denom = std::exp(-m);
    for (int j = 0; j < k; ++j)
      if (j != i) denom += std::exp(f[f_index(i, j, spec)] - m);
    P(i, i) = std::exp(-m) / denom;
    for (int j = 0; j < k; ++j)
      if (j != i) P(i, j) = std::exp(f[f_index(i, j, spec)] - m) / denom;
  }
  return P;
}

std::vector<double> link_matrix_to_f(const TransitionMatrix& P,
                                     const ModelSpec& spec) {
  const int k = spec.k;
  if (P.k != k) fail(ErrorCode::Dimension, "transition matrix size mismatch");
  auto check_interior = [](double v, int i, int j) {
    if (!(v > 0.0 && v < 1.0))
      fail(ErrorCode::Domain, "transition probability P(" + std::to_string(i + 1) +
                                  "," + std::to_string(j + 1) +
                                  ") must lie strictly in (0,1)");
  };
  std::vector<double> f(static_cast<size_t>(spec.transition_dim()), 0.0);
  if (spec.parameterization == Parameterization::Diagonal) {
    for (int i = 0; i < k; ++i) {
      check_interior(P(i, i), i, i);
      f[i] = std::log(P(i, i) / (1.0 - P(i, i)));
    }
    return f;
  }
  for (int i = 0; i < k; ++i) {
    check_interior(P(i, i), i, i);
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      check_interior(P(i, j), i, j);
      f[f_index(i, j, spec)] = std::log(P(i, j) / P(i, i));
    }
  }
  return f;
}

LinkJacobian link_jacobian_at(const TransitionMatrix& P,
                              const ModelSpec& spec) {
  LinkJacobian J;
  link_jacobian_fill(P, spec, J);
  return J;
}

void link_jacobian_fill(const TransitionMatrix& P, const ModelSpec& spec,
                        LinkJacobian& J) {
  const int k = spec.k;
  J.k = k;
  J.dim = spec.transition_dim();
  J.row.resize(J.dim);
  J.col.resize(J.dim);
  J.jac.assign(static_cast<size_t>(J.dim) * k, 0.0);
  if (spec.parameterization == Parameterization::Diagonal) {
    for (int i = 0; i < k; ++i) {
      double d = P(i, i) * (1.0 - P(i, i));
      J.row[i] = i;
      J.col[i] = i;
      J.jac[static_cast<size_t>(i) * k + i] = d;
      J.jac[static_cast<size_t>(i) * k + (1 - i)] = -d;
    }
    return;
  }
  for (int i = 0; i < k; ++i) {
    for (int l = 0; l < k; ++l) {
      if (l == i) continue;
      int m = f_index(i, l, spec);
      J.row[m] = i;
      J.col[m] = l;
      double pil = P(i, l);
      for (int j = 0; j < k; ++j) {
        double dij = j == i ? -pil * P(i, i)
                            : pil * ((j == l ? 1.0 : 0.0) - P(i, j));
        J.jac[static_cast<size_t>(m) * k + j] = dij;
      }
    }
  }
}

LinkJacobian link_jacobian(const std::vector<double>& f,
                           const ModelSpec& spec) {
  return link_jacobian_at(link_f_to_matrix(f, spec), spec);
}

}  // namespace mstvtp
