#pragma once

// Structured-text (JSON) encoding of ODD models and evolution targets.
// The schema is documented in docs/FORMATS.md.

#include <string>

#include <json.hpp>

#include "oddevo/odd/odd_model.hpp"

namespace oddevo::odd {

inline constexpr const char* kOddSchema = "oddevo.odd/1";

// A box is [c_lo, c_hi, u_lo, u_hi]. When the region's knowledge tag differs
// from `default_knowledge`, the tag is appended as a fifth element.
nlohmann::json region_to_json(const Region& r, Knowledge default_knowledge = Knowledge::known_known);
Region region_from_json(const nlohmann::json& j, Knowledge default_knowledge = Knowledge::known_known);

nlohmann::json configuration_to_json(const ConfigurationOdd& c);
ConfigurationOdd configuration_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const OddModel& model);
OddModel model_from_json(const nlohmann::json& j);

nlohmann::json target_to_json(const EvolutionTarget& t);
EvolutionTarget target_from_json(const nlohmann::json& j);

nlohmann::json point_to_json(const WorkingPoint& p);  // [u, c]
WorkingPoint point_from_json(const nlohmann::json& j);

nlohmann::json interval_to_json(const Interval& iv);  // [lo, hi]
Interval interval_from_json(const nlohmann::json& j);

// Text form: pretty-printed JSON terminated by a newline.
std::string serialize(const OddModel& model);
OddModel parse_model(const std::string& text);

}  // namespace oddevo::odd
