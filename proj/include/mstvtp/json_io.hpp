// Licensed under the Apache License 2.0 (see LICENSE file).

#pragma once

#include <json.hpp>
#include <string>

#include "mstvtp/estimate.hpp"
#include "mstvtp/types.hpp"

namespace mstvtp {

nlohmann::json spec_to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const nlohmann::json& j);

nlohmann::json params_to_json(const Params& p, const ModelSpec& spec);
Params params_from_json(const nlohmann::json& j, const ModelSpec& spec);

/// Combined {"spec": ..., "params": ...} document used by CLI subcommands.
nlohmann::json model_to_json(const ModelSpec& spec, const Params& p);
std::pair<ModelSpec, Params> model_from_json(const nlohmann::json& j);

nlohmann::json estimation_result_to_json(const EstimationResult& r,
                                         const ModelSpec& spec);

}  // namespace mstvtp
