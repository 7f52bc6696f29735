// Licensed under the Apache License 2.0 (see LICENSE file).

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mstvtp/common.hpp"

namespace mstvtp {

enum class Parameterization { Diagonal, OffDiagonal };
enum class VarianceStructure { Common, RegimeSpecific };

/// Transition-probability dynamics families. Constant keeps the matrix fixed;
/// LaggedObs drives it with y_{t-1}; Exogenous with a covariate x_{t-1};
/// ScoreDriven updates it with the scaled score of the predictive density.
enum class Dynamics { Constant, LaggedObs, Exogenous, ScoreDriven };

const char* to_string(Dynamics d);
const char* to_string(Parameterization p);
const char* to_string(VarianceStructure v);
Dynamics dynamics_from_string(const std::string& s);

struct ModelSpec {
  int k = 2;
  Parameterization parameterization = Parameterization::OffDiagonal;
  VarianceStructure variance = VarianceStructure::RegimeSpecific;
  Dynamics dynamics = Dynamics::Constant;

  /// Number of free transition parameters: k under Diagonal (k must be 2),
  /// k(k-1) under OffDiagonal, 0 in the degenerate single-regime case.
  int transition_dim() const {
    if (k <= 1) return 0;
    return parameterization == Parameterization::Diagonal ? k : k * (k - 1);
  }

  int sigma_dim() const {
    return variance == VarianceStructure::Common ? 1 : k;
  }

  /// Length of each dynamics coefficient vector (theta, gamma, A, B).
  int dynamics_dim() const {
    return dynamics == Dynamics::Constant ? 0 : transition_dim();
  }

  int param_count() const {
    int d = transition_dim();
    int n = k + sigma_dim() + d;
    switch (dynamics) {
      case Dynamics::Constant: break;
      case Dynamics::LaggedObs:
      case Dynamics::Exogenous: n += d; break;
      case Dynamics::ScoreDriven: n += 2 * d; break;
    }
    return n;
  }

  void validate() const;
};

/// Model parameters on the natural scale. Vectors not used by the
/// specification's dynamics family are left empty.
struct Params {
  std::vector<double> mu;      // regime means, length k
  std::vector<double> sigma2;  // regime variances (length 1 under Common)
  std::vector<double> f0;      // transition intercepts, unconstrained
  std::vector<double> theta;   // LaggedObs slopes
  std::vector<double> gamma;   // Exogenous slopes
  std::vector<double> a;       // ScoreDriven score loadings (diagonal of A)
  std::vector<double> b;       // ScoreDriven persistence (diagonal of B), each in (0,1)

  double sigma2_of(int regime, const ModelSpec& spec) const {
    return spec.variance == VarianceStructure::Common ? sigma2[0]
                                                      : sigma2[regime];
  }

  const std::vector<double>& dyn_slope(const ModelSpec& spec) const;

  void validate(const ModelSpec& spec) const;
};

struct TransitionMatrix {
  int k = 0;
  std::vector<double> p;  // row-major k*k

  TransitionMatrix() = default;
  explicit TransitionMatrix(int k_) : k(k_), p(static_cast<size_t>(k_) * k_, 0.0) {}

  double operator()(int i, int j) const { return p[static_cast<size_t>(i) * k + j]; }
  double& operator()(int i, int j) { return p[static_cast<size_t>(i) * k + j]; }

  /// Entries in [0,1], rows summing to 1 within 1e-12.
  void validate() const;
};

/// Observation series with an optional aligned covariate. x[t] is the
/// covariate dated at time t; the filter uses x[t-1] when forming f_t.
struct Dataset {
  std::vector<double> y;
  std::vector<double> x;  // empty when absent, else same length as y
  std::string label;

  bool has_covariate() const { return !x.empty(); }
  int length() const { return static_cast<int>(y.size()); }
  void validate() const;
};

}  // namespace mstvtp
