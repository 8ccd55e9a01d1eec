#pragma once

#include <nlohmann/json.hpp>

#include "cvqkd/scenario.hpp"

namespace cvqkd::detail {

nlohmann::ordered_json config_to_json(const ScenarioConfig& config);
ScenarioConfig config_from_json(const nlohmann::json& root, RunMode default_mode);

}  // namespace cvqkd::detail
