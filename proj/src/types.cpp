// Licensed under the Apache License 2.0 (see LICENSE file).

#include "mstvtp/types.hpp"

#include <algorithm>
#include <cmath>

namespace mstvtp {

const char* to_string(Dynamics d) {
  switch (d) {
    case Dynamics::Constant: return "const";
    case Dynamics::LaggedObs: return "tvp";
    case Dynamics::Exogenous: return "exog";
    case Dynamics::ScoreDriven: return "gas";
  }
  return "?";
}

const char* to_string(Parameterization p) {
  return p == Parameterization::Diagonal ? "diagonal" : "offdiagonal";
}

const char* to_string(VarianceStructure v) {
  return v == VarianceStructure::Common ? "common" : "regime";
}

Dynamics dynamics_from_string(const std::string& s) {
  if (s == "const" || s == "constant") return Dynamics::Constant;
  if (s == "tvp" || s == "lagged") return Dynamics::LaggedObs;
  if (s == "exog" || s == "exogenous") return Dynamics::Exogenous;
  if (s == "gas" || s == "score") return Dynamics::ScoreDriven;
  fail(ErrorCode::InvalidArgument, "unknown dynamics family '" + s + "'");
}

void ModelSpec::validate() const {
  if (k < 1) fail(ErrorCode::InvalidArgument, "regime count must be >= 1");
  if (parameterization == Parameterization::Diagonal && k != 2)
    fail(ErrorCode::InvalidArgument,
         "diagonal transition parameterization requires k = 2");
  if (k == 1 && dynamics != Dynamics::Constant)
    fail(ErrorCode::InvalidArgument,
         "single-regime model has no transition dynamics");
}

const std::vector<double>& Params::dyn_slope(const ModelSpec& spec) const {
  switch (spec.dynamics) {
    case Dynamics::LaggedObs: return theta;
    case Dynamics::Exogenous: return gamma;
    case Dynamics::ScoreDriven: return a;
    default: break;
  }
  fail(ErrorCode::InvalidArgument, "constant dynamics have no slope vector");
}

namespace {
void check_len(const std::vector<double>& v, size_t n, const char* name) {
  if (v.size() != n)
    fail(ErrorCode::Dimension, std::string(name) + " has length " +
                                   std::to_string(v.size()) + ", expected " +
                                   std::to_string(n));
}
void check_finite(const std::vector<double>& v, const char* name) {
  for (double e : v)
    if (!std::isfinite(e))
      fail(ErrorCode::NonFinite, std::string(name) + " contains a non-finite entry");
}
}  // namespace

void Params::validate(const ModelSpec& spec) const {
  spec.validate();
  const size_t d = static_cast<size_t>(spec.transition_dim());
  check_len(mu, static_cast<size_t>(spec.k), "mu");
  check_len(sigma2, static_cast<size_t>(spec.sigma_dim()), "sigma2");
  check_len(f0, d, "f0");
  check_finite(mu, "mu");
  check_finite(sigma2, "sigma2");
  check_finite(f0, "f0");
  for (double s : sigma2)
    if (!(s > 0.0)) fail(ErrorCode::Domain, "sigma2 entries must be > 0");

  switch (spec.dynamics) {
    case Dynamics::Constant:
      break;
    case Dynamics::LaggedObs:
      check_len(theta, d, "theta");
      check_finite(theta, "theta");
      break;
    case Dynamics::Exogenous:
      check_len(gamma, d, "gamma");
      check_finite(gamma, "gamma");
      break;
    case Dynamics::ScoreDriven:
      check_len(a, d, "a");
      check_len(b, d, "b");
      check_finite(a, "a");
      check_finite(b, "b");
      for (double e : b)
        if (!(e > 0.0 && e < 1.0))
          fail(ErrorCode::Domain, "b entries must lie in (0,1)");
      break;
  }
}

void TransitionMatrix::validate() const {
  for (int i = 0; i < k; ++i) {
    double row = 0.0;
    for (int j = 0; j < k; ++j) {
      double v = (*this)(i, j);
      if (!(v >= 0.0 && v <= 1.0))
        fail(ErrorCode::Domain, "transition probability outside [0,1]");
      row += v;
    }
    if (std::abs(row - 1.0) > 1e-12)
      fail(ErrorCode::Domain, "transition matrix row " + std::to_string(i + 1) +
                                  " does not sum to 1");
  }
}

void Dataset::validate() const {
  if (y.empty()) fail(ErrorCode::InvalidArgument, "empty observation series");
  for (double v : y)
    if (!std::isfinite(v))
      fail(ErrorCode::NonFinite, "observation series contains a non-finite value");
  if (!x.empty()) {
    if (x.size() != y.size())
      fail(ErrorCode::Dimension, "covariate series length differs from observations");
    for (double v : x)
      if (!std::isfinite(v))
        fail(ErrorCode::NonFinite, "covariate series contains a non-finite value");
  }
}

}  // namespace mstvtp
