#pragma once

// Scenario files: network, environment trace, ODD model, catalogue, scripted
// guidance commands and loop settings. Schema in docs/FORMATS.md.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oddevo/evo/evo_engine.hpp"
#include "oddevo/mape/mape_loop.hpp"
#include "oddevo/odd/odd_model.hpp"
#include "oddevo/sim/iot_sim.hpp"
#include "oddevo/warehouse/catalogue.hpp"

namespace oddevo::runner {

inline constexpr const char* kScenarioSchema = "oddevo.scenario/1";

struct TraceEntry {
  std::int64_t tick = 0;
  double interference = 0.0;
  double demand = 0.0;
};

// Piecewise-constant environment schedule.
class EnvironmentTrace {
 public:
  EnvironmentTrace() = default;
  explicit EnvironmentTrace(std::vector<TraceEntry> schedule);  // ValidationError

  // Entry in force at `tick` (the last one whose tick <= `tick`).
  sim::Environment at(std::int64_t tick) const;
  const std::vector<TraceEntry>& schedule() const { return schedule_; }

 private:
  std::vector<TraceEntry> schedule_;
};

enum class CommandKind { add_goal, add_evolution_target, approve, feedback };

std::string_view to_string(CommandKind k);
CommandKind command_kind_from_string(std::string_view s);

struct GuidanceCommand {
  CommandKind kind = CommandKind::feedback;
  nlohmann::json body = nlohmann::json::object();
  std::int64_t issued_at = 0;
};

struct ScriptedCommand {
  std::int64_t tick = 0;
  GuidanceCommand command;
};

struct Scenario {
  std::string name;
  std::int64_t ticks = 0;
  sim::SimConfig network;
  odd::OddModel odd;
  warehouse::Catalogue catalogue;
  EnvironmentTrace trace;
  std::vector<ScriptedCommand> commands;
  mape::MapeConfig mape;
  std::size_t history_capacity = 100;
  evo::EngineConfig evolution;
};

// `base_dir` resolves relative {"path": ...} references.
Scenario scenario_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);

}  // namespace oddevo::runner
