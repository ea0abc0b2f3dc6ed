#include "oddevo/mape/mape_loop.hpp"

#include <algorithm>
#include <tuple>

#include "oddevo/errors.hpp"
#include "oddevo/odd/odd_json.hpp"

namespace oddevo::mape {

using nlohmann::json;

void AdaptationGoals::validate() const {
  if (!(loss_threshold > 0.0 && loss_threshold < 1.0)) {
    throw ValidationError("loss_threshold must lie in (0, 1)");
  }
}

void History::push(HistoryEntry entry) {
  if (capacity_ == 0) return;
  if (entries_.size() == capacity_) entries_.pop_front();
  entries_.push_back(std::move(entry));
}

std::vector<odd::WorkingPoint> History::points() const {
  std::vector<odd::WorkingPoint> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.point);
  return out;
}

std::string_view to_string(Reason r) {
  switch (r) {
    case Reason::stay: return "stay";
    case Reason::switch_config: return "switch";
    case Reason::out_of_odd: return "out_of_odd";
  }
  return "stay";
}

bool monitor(Knowledge& knowledge, const sim::Telemetry& telemetry) {
  if (knowledge.last_tick && telemetry.tick <= *knowledge.last_tick) return false;
  knowledge.last_tick = telemetry.tick;
  knowledge.current_point = odd::WorkingPoint{telemetry.demand, telemetry.interference};
  knowledge.history.push({telemetry.tick, *knowledge.current_point, knowledge.current_config});
  return true;
}

std::vector<Option> analyze(const Knowledge& knowledge) {
  std::vector<Option> options;
  if (!knowledge.current_point) return options;
  for (const auto& id : odd::satisfying_configs(knowledge.odd, *knowledge.current_point)) {
    options.push_back({id, knowledge.odd.at(id).lifetime_years});
  }
  return options;
}

AdaptationDecision plan(std::span<const Option> options, std::string_view current_config) {
  AdaptationDecision d;
  d.options.assign(options.begin(), options.end());
  if (options.empty()) {
    d.reason = Reason::out_of_odd;
    return d;
  }
  // "Better" sorts first.
  const auto key = [&](const Option& o) {
    return std::make_tuple(-o.lifetime_years.lo, -o.lifetime_years.hi, o.config_id != current_config,
                           std::string_view(o.config_id));
  };
  const auto best = std::min_element(options.begin(), options.end(),
                                     [&](const Option& a, const Option& b) { return key(a) < key(b); });
  d.chosen = best->config_id;
  d.reason = best->config_id == current_config ? Reason::stay : Reason::switch_config;
  return d;
}

ExecuteResult execute(const AdaptationDecision& decision, Knowledge& knowledge, sim::NetworkState& sim,
                      const MapeConfig& config) {
  ExecuteResult result;
  const auto apply = [&](const std::string& id) {
    try {
      sim = sim::set_configuration(sim, id);
      knowledge.current_config = id;
      return true;
    } catch (const Error& e) {
      result.events.push_back({EventKind::warning, json{{"phase", "execute"},
                                                        {"error", e.code()},
                                                        {"message", e.what()},
                                                        {"config", id}}});
      return false;
    }
  };

  if (decision.reason != Reason::out_of_odd) {
    if (decision.reason == Reason::switch_config && decision.chosen) apply(*decision.chosen);
    knowledge.safe_state = false;
    knowledge.trigger_latched = false;
    return result;
  }

  if (knowledge.current_config != config.safe_config) apply(config.safe_config);
  knowledge.safe_state = true;

  if (!knowledge.trigger_latched) {
    const auto points = knowledge.history.points();
    auto trigger = evo::detect(points, knowledge.odd, knowledge.last_tick.value_or(0), config.debounce);
    if (trigger) {
      knowledge.trigger_latched = true;
      result.trigger = std::move(trigger);
    }
  }
  return result;
}

json decision_to_json(const AdaptationDecision& d, const odd::WorkingPoint& point, std::string_view previous_config) {
  json options = json::array();
  for (const auto& o : d.options) {
    options.push_back(json{{"config", o.config_id}, {"lifetime_years", odd::interval_to_json(o.lifetime_years)}});
  }
  return json{{"point", odd::point_to_json(point)},
              {"options", std::move(options)},
              {"chosen", d.chosen ? json(*d.chosen) : json(nullptr)},
              {"reason", std::string(to_string(d.reason))},
              {"previous", std::string(previous_config)}};
}

TickResult mape_tick(Knowledge& knowledge, const sim::Telemetry& telemetry, sim::NetworkState& sim,
                     const MapeConfig& config) {
  TickResult result;
  if (!monitor(knowledge, telemetry)) {
    result.events.push_back({EventKind::warning, json{{"phase", "monitor"},
                                                      {"message", "stale telemetry ignored"},
                                                      {"telemetry_tick", telemetry.tick}}});
    return result;
  }
  const std::string previous = knowledge.current_config;
  const auto options = analyze(knowledge);
  AdaptationDecision decision = plan(options, knowledge.current_config);
  result.events.push_back({EventKind::decision, decision_to_json(decision, *knowledge.current_point, previous)});

  auto executed = execute(decision, knowledge, sim, config);
  for (auto& e : executed.events) result.events.push_back(std::move(e));
  result.trigger = std::move(executed.trigger);
  result.decision = std::move(decision);
  return result;
}

}  // namespace oddevo::mape
