#include "oddevo/odd/odd_json.hpp"

#include "oddevo/errors.hpp"

namespace oddevo::odd {

using nlohmann::json;

namespace {

double number_at(const json& arr, std::size_t i, const char* what) {
  if (!arr.at(i).is_number()) throw ValidationError(std::string(what) + " must be numeric");
  return arr.at(i).get<double>();
}

}  // namespace

json interval_to_json(const Interval& iv) { return json::array({iv.lo, iv.hi}); }

Interval interval_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("interval must be [lo, hi]");
  Interval iv{number_at(j, 0, "interval bound"), number_at(j, 1, "interval bound")};
  if (!iv.well_formed()) throw ValidationError("interval has lo > hi");
  return iv;
}

json point_to_json(const WorkingPoint& p) { return json::array({p.utility, p.context}); }

WorkingPoint point_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("working point must be [utility, context]");
  return {number_at(j, 0, "utility"), number_at(j, 1, "context")};
}

json region_to_json(const Region& r, Knowledge default_knowledge) {
  json j = json::array({r.context.lo, r.context.hi, r.utility.lo, r.utility.hi});
  if (r.knowledge != default_knowledge) j.push_back(std::string(to_string(r.knowledge)));
  return j;
}

Region region_from_json(const json& j, Knowledge default_knowledge) {
  if (!j.is_array() || (j.size() != 4 && j.size() != 5)) {
    throw ValidationError("box must be [c_lo, c_hi, u_lo, u_hi] with an optional knowledge tag");
  }
  Region r{{number_at(j, 0, "c_lo"), number_at(j, 1, "c_hi")},
           {number_at(j, 2, "u_lo"), number_at(j, 3, "u_hi")},
           default_knowledge};
  if (j.size() == 5) {
    if (!j[4].is_string()) throw ValidationError("knowledge tag must be a string");
    r.knowledge = knowledge_from_string(j[4].get<std::string>());
  }
  if (!r.well_formed()) throw ValidationError("box has an inverted interval");
  return r;
}

json configuration_to_json(const ConfigurationOdd& c) {
  const Knowledge tag = c.regions.empty() ? Knowledge::known_known : c.regions.front().knowledge;
  json boxes = json::array();
  for (const auto& r : c.regions) boxes.push_back(region_to_json(r, tag));
  return json{{"id", c.id},
              {"boxes", std::move(boxes)},
              {"lifetime_years", interval_to_json(c.lifetime_years)},
              {"knowledge", std::string(to_string(tag))}};
}

ConfigurationOdd configuration_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("configuration must be an object");
  std::vector<std::string> problems;
  for (const char* key : {"id", "boxes", "lifetime_years"}) {
    if (!j.contains(key)) problems.push_back(std::string("configuration missing '") + key + "'");
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  const Knowledge tag =
      j.contains("knowledge") ? knowledge_from_string(j.at("knowledge").get<std::string>())
                              : Knowledge::known_known;
  ConfigurationOdd c;
  c.id = j.at("id").get<std::string>();
  for (const auto& b : j.at("boxes")) c.regions.push_back(region_from_json(b, tag));
  c.lifetime_years = interval_from_json(j.at("lifetime_years"));
  c.validate();
  return c;
}

json model_to_json(const OddModel& model) {
  json configs = json::array();
  for (const auto& c : model.configurations()) configs.push_back(configuration_to_json(c));
  return json{{"schema", kOddSchema}, {"version", model.version()}, {"configurations", std::move(configs)}};
}

OddModel model_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("ODD model must be an object");
  if (j.value("schema", std::string{}) != kOddSchema) {
    throw ValidationError(std::string("ODD model schema must be '") + kOddSchema + "'");
  }
  std::vector<ConfigurationOdd> configs;
  for (const auto& c : j.at("configurations")) configs.push_back(configuration_from_json(c));
  return OddModel(std::move(configs), j.at("version").get<std::uint64_t>());
}

json target_to_json(const EvolutionTarget& t) {
  json regions = json::array();
  for (const auto& r : t.regions) regions.push_back(region_to_json(r));
  return json{{"regions", std::move(regions)},
              {"origin", std::string(to_string(t.origin))},
              {"created_at", t.created_at}};
}

EvolutionTarget target_from_json(const json& j) {
  if (!j.is_object() || !j.contains("regions")) throw ValidationError("evolution target needs 'regions'");
  EvolutionTarget t;
  for (const auto& r : j.at("regions")) t.regions.push_back(region_from_json(r));
  if (j.contains("origin")) t.origin = target_origin_from_string(j.at("origin").get<std::string>());
  t.created_at = j.value("created_at", std::int64_t{0});
  t.validate();
  return t;
}

std::string serialize(const OddModel& model) { return model_to_json(model).dump(2) + "\n"; }

OddModel parse_model(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("ODD model is not valid JSON: ") + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("ODD model has the wrong shape: ") + e.what());
  }
}

}  // namespace oddevo::odd
