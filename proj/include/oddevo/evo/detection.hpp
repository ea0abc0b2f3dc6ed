#pragma once

// Anomaly and novelty detection over the tracked working point.
//
//  - anomaly: the last `debounce` working points all lie outside the ODD.
//  - novelty: the latest working point lies outside the ODD and its context
//    value falls outside the context span of every known region.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "oddevo/odd/odd_model.hpp"

namespace oddevo::evo {

enum class TriggerKind { anomaly, novelty, stakeholder_goal };

std::string_view to_string(TriggerKind k);

struct EvolutionTrigger {
  TriggerKind kind = TriggerKind::anomaly;
  std::vector<odd::WorkingPoint> evidence;
  std::optional<odd::EvolutionTarget> goal;  // stakeholder_goal only
  std::int64_t tick = 0;
};

inline constexpr int kDefaultDebounce = 3;

// `recent` is ordered oldest to newest.
std::optional<EvolutionTrigger> detect(std::span<const odd::WorkingPoint> recent, const odd::OddModel& odd,
                                       std::int64_t tick, int debounce = kDefaultDebounce);

// True when c lies outside the context interval of every region in the model.
bool outside_context_span(const odd::OddModel& odd, double context);

}  // namespace oddevo::evo
