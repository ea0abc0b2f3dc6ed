#pragma once

#include <string_view>
#include <vector>

#include <json.hpp>

namespace oddevo {

enum class EventKind { telemetry, decision, trigger, evolution, enactment, command, warning };

std::string_view to_string(EventKind k);
EventKind event_kind_from_string(std::string_view s);

// An event before the log stamps it with seq, tick and ODD version.
struct Event {
  EventKind kind;
  nlohmann::json payload;
};

using Events = std::vector<Event>;

}  // namespace oddevo
