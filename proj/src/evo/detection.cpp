#include "oddevo/evo/detection.hpp"

#include <algorithm>

namespace oddevo::evo {

std::string_view to_string(TriggerKind k) {
  switch (k) {
    case TriggerKind::anomaly: return "anomaly";
    case TriggerKind::novelty: return "novelty";
    case TriggerKind::stakeholder_goal: return "stakeholder_goal";
  }
  return "anomaly";
}

bool outside_context_span(const odd::OddModel& odd, double context) {
  for (const auto& c : odd.configurations()) {
    for (const auto& r : c.regions) {
      if (r.context.contains(context)) return false;
    }
  }
  return true;
}

std::optional<EvolutionTrigger> detect(std::span<const odd::WorkingPoint> recent, const odd::OddModel& odd,
                                       std::int64_t tick, int debounce) {
  if (recent.empty()) return std::nullopt;
  const auto outside = [&](const odd::WorkingPoint& p) { return !odd::contains(odd, p); };

  const auto& latest = recent.back();
  if (!outside(latest)) return std::nullopt;

  // Trailing run of out-of-ODD points, newest last.
  auto first = recent.end();
  while (first != recent.begin() && outside(*(first - 1))) --first;
  const auto run = static_cast<int>(recent.end() - first);

  if (outside_context_span(odd, latest.context)) {
    return EvolutionTrigger{TriggerKind::novelty, {first, recent.end()}, std::nullopt, tick};
  }
  const int k = std::max(debounce, 1);
  if (run >= k) {
    return EvolutionTrigger{TriggerKind::anomaly, {recent.end() - k, recent.end()}, std::nullopt, tick};
  }
  return std::nullopt;
}

}  // namespace oddevo::evo
