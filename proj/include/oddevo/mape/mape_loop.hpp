#pragma once

// Managing system: a monitor-analyze-plan-execute loop over ODD knowledge.
//
// Each tick the loop tracks the working point (demand, interference), lists
// the configurations whose ODD regions contain it, and keeps or switches to
// the option with the best expected network lifetime. When no configuration
// covers the working point the managed system is driven to a safe state and,
// once detection confirms the condition, an evolution trigger is raised.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oddevo/events.hpp"
#include "oddevo/evo/detection.hpp"
#include "oddevo/odd/odd_model.hpp"
#include "oddevo/sim/iot_sim.hpp"

namespace oddevo::mape {

struct AdaptationGoals {
  double loss_threshold = 0.05;

  void validate() const;
};

struct HistoryEntry {
  std::int64_t tick = 0;
  odd::WorkingPoint point;
  std::string config_id;
};

// Fixed-capacity ring buffer, oldest entry first.
class History {
 public:
  explicit History(std::size_t capacity = 100) : capacity_(capacity) {}

  void push(HistoryEntry entry);
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }
  const HistoryEntry& back() const { return entries_.back(); }
  const std::deque<HistoryEntry>& entries() const { return entries_; }
  std::vector<odd::WorkingPoint> points() const;

 private:
  std::size_t capacity_;
  std::deque<HistoryEntry> entries_;
};

struct Knowledge {
  std::optional<odd::WorkingPoint> current_point;
  std::string current_config;
  odd::OddModel odd;
  AdaptationGoals goals;
  History history;
  std::optional<std::int64_t> last_tick;
  bool safe_state = false;
  // Set once a trigger has been raised for the current out-of-ODD episode.
  bool trigger_latched = false;
};

struct MapeConfig {
  std::string safe_config = "power-max";
  int debounce = evo::kDefaultDebounce;
};

struct Option {
  std::string config_id;
  Interval lifetime_years;

  friend bool operator==(const Option&, const Option&) = default;
};

enum class Reason { stay, switch_config, out_of_odd };

std::string_view to_string(Reason r);

struct AdaptationDecision {
  std::vector<Option> options;
  std::optional<std::string> chosen;
  Reason reason = Reason::out_of_odd;
};

// Returns false (and leaves knowledge untouched) for stale telemetry, i.e. a
// tick not newer than the last one seen.
bool monitor(Knowledge& knowledge, const sim::Telemetry& telemetry);

std::vector<Option> analyze(const Knowledge& knowledge);

// Best fit: largest lifetime lower bound, then upper bound, then the
// incumbent configuration, then lexicographic id.
AdaptationDecision plan(std::span<const Option> options, std::string_view current_config);

struct ExecuteResult {
  Events events;
  std::optional<evo::EvolutionTrigger> trigger;
};

ExecuteResult execute(const AdaptationDecision& decision, Knowledge& knowledge, sim::NetworkState& sim,
                      const MapeConfig& config);

struct TickResult {
  std::optional<AdaptationDecision> decision;  // empty when telemetry was stale
  Events events;
  std::optional<evo::EvolutionTrigger> trigger;
};

// One full loop iteration. Never throws for phase failures; they are
// reported as warning events.
TickResult mape_tick(Knowledge& knowledge, const sim::Telemetry& telemetry, sim::NetworkState& sim,
                     const MapeConfig& config);

nlohmann::json decision_to_json(const AdaptationDecision& d, const odd::WorkingPoint& point,
                                std::string_view previous_config);

}  // namespace oddevo::mape
