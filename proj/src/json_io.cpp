// Licensed under the Apache License 2.0 (see LICENSE file).

#include "mstvtp/json_io.hpp"

namespace mstvtp {

using nlohmann::json;

json spec_to_json(const ModelSpec& spec) {
  return json{{"k", spec.k},
              {"parameterization", to_string(spec.parameterization)},
              {"variance", to_string(spec.variance)},
              {"dynamics", to_string(spec.dynamics)}};
}

ModelSpec spec_from_json(const json& j) {
  ModelSpec spec;
  spec.k = j.at("k").get<int>();
  std::string par = j.value("parameterization", "offdiagonal");
  if (par == "diagonal") spec.parameterization = Parameterization::Diagonal;
  else if (par == "offdiagonal") spec.parameterization = Parameterization::OffDiagonal;
  else fail(ErrorCode::InvalidArgument, "unknown parameterization '" + par + "'");
  std::string var = j.value("variance", "regime");
  if (var == "common") spec.variance = VarianceStructure::Common;
  else if (var == "regime") spec.variance = VarianceStructure::RegimeSpecific;
  else fail(ErrorCode::InvalidArgument, "unknown variance structure '" + var + "'");
  spec.dynamics = dynamics_from_string(j.value("dynamics", "const"));
  spec.validate();
  return spec;
}

json params_to_json(const Params& p, const ModelSpec& spec) {
  json j{{"mu", p.mu}, {"sigma2", p.sigma2}, {"f0", p.f0}};
  switch (spec.dynamics) {
    case Dynamics::Constant: break;
    case Dynamics::LaggedObs: j["theta"] = p.theta; break;
    case Dynamics::Exogenous: j["gamma"] = p.gamma; break;
    case Dynamics::ScoreDriven:
      j["a"] = p.a;
      j["b"] = p.b;
      break;
  }
  return j;
}

Params params_from_json(const json& j, const ModelSpec& spec) {
  Params p;
  p.mu = j.at("mu").get<std::vector<double>>();
  p.sigma2 = j.at("sigma2").get<std::vector<double>>();
  p.f0 = j.value("f0", std::vector<double>{});
  if (j.contains("theta")) p.theta = j.at("theta").get<std::vector<double>>();
  if (j.contains("gamma")) p.gamma = j.at("gamma").get<std::vector<double>>();
  if (j.contains("a")) p.a = j.at("a").get<std::vector<double>>();
  if (j.contains("b")) p.b = j.at("b").get<std::vector<double>>();
  p.validate(spec);
  return p;
}

json model_to_json(const ModelSpec& spec, const Params& p) {
  return json{{"spec", spec_to_json(spec)}, {"params", params_to_json(p, spec)}};
}

std::pair<ModelSpec, Params> model_from_json(const json& j) {
  ModelSpec spec = spec_from_json(j.at("spec"));
  // Accept estimation-result documents directly (params under "params_hat").
  const json& pj = j.contains("params") ? j.at("params") : j.at("params_hat");
  Params p = params_from_json(pj, spec);
  return {spec, p};
}

json estimation_result_to_json(const EstimationResult& r, const ModelSpec& spec) {
  json j;
  j["params_hat"] = params_to_json(r.params_hat, spec);
  j["se"] = r.se;
  j["se_available"] = r.se_available;
  j["loglik"] = r.loglik;
  j["aic"] = r.aic;
  j["bic"] = r.bic;
  j["n_params"] = r.n_params;
  j["t_effective"] = r.t_effective;
  j["converged"] = r.converged;
  j["n_starts_converged"] = r.n_starts_converged;
  j["best_start_index"] = r.best_start_index;
  return j;
}

}  // namespace mstvtp
