#pragma once

// Canonical JSON encoding of AnalyticSpec, e.g.
//   {"kind": "power", "gamma": -0.4, "coeff": [1.0], "interval": [0.0, 1.0]}

#include <string>

#include <json.hpp>

#include "fracbound/function_model.hpp"

namespace fracbound {

nlohmann::json to_json(const AnalyticSpec& spec);

/// Throws ConfigParseError naming the offending field; `where` prefixes the path.
AnalyticSpec spec_from_json(const nlohmann::json& j, const std::string& where = "spec");

}  // namespace fracbound
