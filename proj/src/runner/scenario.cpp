#include "oddevo/runner/scenario.hpp"

#include <filesystem>
#include <fstream>

#include "oddevo/errors.hpp"
#include "oddevo/odd/odd_json.hpp"

namespace oddevo::runner {

using nlohmann::json;

EnvironmentTrace::EnvironmentTrace(std::vector<TraceEntry> schedule) : schedule_(std::move(schedule)) {
  std::vector<std::string> problems;
  if (schedule_.empty()) problems.emplace_back("trace: at least one entry is required");
  for (std::size_t i = 0; i < schedule_.size(); ++i) {
    const auto& e = schedule_[i];
    const std::string where = "trace[" + std::to_string(i) + "]";
    if (i > 0 && e.tick <= schedule_[i - 1].tick) problems.push_back(where + ".tick: ticks must strictly increase");
    if (e.interference > 0) problems.push_back(where + ".interference: must be <= 0");
    if (e.demand < 0) problems.push_back(where + ".demand: must be >= 0");
  }
  if (!schedule_.empty() && schedule_.front().tick != 0) problems.emplace_back("trace[0].tick: must be 0");
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

sim::Environment EnvironmentTrace::at(std::int64_t tick) const {
  const TraceEntry* current = &schedule_.front();
  for (const auto& e : schedule_) {
    if (e.tick > tick) break;
    current = &e;
  }
  return {current->interference, current->demand};
}

std::string_view to_string(CommandKind k) {
  switch (k) {
    case CommandKind::add_goal: return "add_goal";
    case CommandKind::add_evolution_target: return "add_evolution_target";
    case CommandKind::approve: return "approve";
    case CommandKind::feedback: return "feedback";
  }
  return "feedback";
}

CommandKind command_kind_from_string(std::string_view s) {
  for (auto k : {CommandKind::add_goal, CommandKind::add_evolution_target, CommandKind::approve,
                 CommandKind::feedback}) {
    if (to_string(k) == s) return k;
  }
  throw ValidationError("unknown command kind '" + std::string(s) + "'");
}

namespace {

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

sim::SimConfig parse_network(const json& j, std::uint64_t seed, double loss_goal) {
  sim::SimConfig cfg = sim::canonical_sim_config(seed);
  cfg.loss_goal = loss_goal;
  if (j.is_null()) return cfg;
  if (!j.is_object()) throw ValidationError("network: must be an object");
  cfg.gateway_id = j.value("gateway", cfg.gateway_id);
  if (j.contains("motes") && !(j["motes"].is_string() && j["motes"] == "canonical")) {
    cfg.motes.clear();
    for (const auto& m : j.at("motes")) {
      cfg.motes.push_back({m.value("id", std::string{}), m.value("parent", cfg.gateway_id)});
    }
  }
  if (j.contains("platform_tags")) cfg.platform_tags = j["platform_tags"].get<std::set<std::string>>();
  cfg.battery_capacity_mj = j.value("battery_capacity_mj", cfg.battery_capacity_mj);
  if (j.contains("energy_mj_per_tick")) {
    const auto& e = j["energy_mj_per_tick"];
    cfg.energy.minimum_mj = e.value("minimum", cfg.energy.minimum_mj);
    cfg.energy.medium_mj = e.value("medium", cfg.energy.medium_mj);
    cfg.energy.maximum_mj = e.value("maximum", cfg.energy.maximum_mj);
  }
  cfg.initial_config = j.value("initial_config", cfg.initial_config);
  if (j.contains("power_of_config")) {
    cfg.power_of_config.clear();
    for (const auto& [id, p] : j["power_of_config"].items()) {
      cfg.power_of_config[id] = sim::power_from_string(p.get<std::string>());
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace

Scenario scenario_from_json(const json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ValidationError("scenario: must be an object");
  std::vector<std::string> problems;
  if (j.value("schema", std::string{}) != kScenarioSchema) {
    problems.push_back(std::string("schema: must be '") + kScenarioSchema + "'");
  }
  for (const char* key : {"name", "seed", "ticks", "trace"}) {
    if (!j.contains(key)) problems.push_back(std::string(key) + ": missing");
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));

  const std::filesystem::path base(base_dir);
  const auto resolve = [&](const json& ref, const char* field) -> json {
    if (ref.is_object() && ref.contains("path")) return read_json_file(base / ref["path"].get<std::string>());
    if (ref.is_object()) return ref;
    throw ValidationError(std::string(field) + ": expected \"canonical\", an object or {\"path\": ...}");
  };

  try {
    Scenario s;
    s.name = j.at("name").get<std::string>();
    s.ticks = j.at("ticks").get<std::int64_t>();
    if (s.ticks <= 0) throw ValidationError("ticks: must be positive");
    const double loss_goal = j.value("loss_goal", 0.05);
    s.network = parse_network(j.value("network", json()), j.at("seed").get<std::uint64_t>(), loss_goal);

    const json odd_ref = j.value("odd", json("canonical"));
    s.odd = odd_ref.is_string() && odd_ref == "canonical" ? odd::canonical_model()
                                                          : odd::model_from_json(resolve(odd_ref, "odd"));

    const json cat_ref = j.value("catalogue", json("canonical"));
    if (cat_ref.is_string() && cat_ref == "canonical") {
      s.catalogue = warehouse::canonical_catalogue();
    } else if (cat_ref.is_string() && cat_ref == "empty") {
      s.catalogue = warehouse::Catalogue{};
    } else {
      s.catalogue = warehouse::catalogue_from_json(resolve(cat_ref, "catalogue"));
    }

    std::vector<TraceEntry> schedule;
    for (const auto& e : j.at("trace")) {
      schedule.push_back({e.at("tick").get<std::int64_t>(), e.at("interference").get<double>(),
                          e.at("demand").get<double>()});
    }
    s.trace = EnvironmentTrace(std::move(schedule));

    for (const auto& c : j.value("commands", json::array())) {
      ScriptedCommand sc;
      sc.tick = c.at("tick").get<std::int64_t>();
      sc.command.kind = command_kind_from_string(c.at("kind").get<std::string>());
      sc.command.body = c.value("body", json::object());
      sc.command.issued_at = sc.tick;
      s.commands.push_back(std::move(sc));
    }

    if (j.contains("mape")) {
      const auto& m = j["mape"];
      s.mape.safe_config = m.value("safe_config", s.mape.safe_config);
      s.mape.debounce = m.value("debounce", s.mape.debounce);
      s.history_capacity = m.value("history", s.history_capacity);
    }
    if (j.contains("evolution")) {
      const auto& e = j["evolution"];
      auto& cfg = s.evolution;
      cfg.approval_gate = e.value("approval_gate", cfg.approval_gate);
      cfg.margin_utility = e.value("margin_utility", cfg.margin_utility);
      cfg.margin_context = e.value("margin_context", cfg.margin_context);
      cfg.sandbox_runs = e.value("sandbox_runs", cfg.sandbox_runs);
      cfg.sandbox_grid = e.value("sandbox_grid", cfg.sandbox_grid);
      cfg.sandbox_ticks = e.value("sandbox_ticks", cfg.sandbox_ticks);
      cfg.steady_window = e.value("steady_window", cfg.steady_window);
      cfg.pass_threshold = e.value("pass_threshold", cfg.pass_threshold);
      cfg.sandbox_seed = e.value("sandbox_seed", cfg.sandbox_seed);
      const int res = e.value("coverage_resolution", cfg.coverage_resolution.n_utility);
      cfg.coverage_resolution = {res, res};
    }

    if (!s.odd.find(s.mape.safe_config)) problems.push_back("mape.safe_config: unknown configuration");
    if (s.mape.debounce < 1) problems.emplace_back("mape.debounce: must be >= 1");
    if (s.evolution.pass_threshold < 0 || s.evolution.pass_threshold > 1) {
      problems.emplace_back("evolution.pass_threshold: must lie in [0, 1]");
    }
    if (!problems.empty()) throw ValidationError(std::move(problems));
    return s;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario has the wrong shape: ") + e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  const std::filesystem::path p(path);
  return scenario_from_json(read_json_file(p), p.has_parent_path() ? p.parent_path().string() : ".");
}

}  // namespace oddevo::runner
