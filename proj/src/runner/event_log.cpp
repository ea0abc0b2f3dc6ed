#include "oddevo/runner/event_log.hpp"

#include <sstream>

#include "oddevo/errors.hpp"

namespace oddevo {

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::telemetry: return "telemetry";
    case EventKind::decision: return "decision";
    case EventKind::trigger: return "trigger";
    case EventKind::evolution: return "evolution";
    case EventKind::enactment: return "enactment";
    case EventKind::command: return "command";
    case EventKind::warning: return "warning";
  }
  return "warning";
}

EventKind event_kind_from_string(std::string_view s) {
  for (auto k : {EventKind::telemetry, EventKind::decision, EventKind::trigger, EventKind::evolution,
                 EventKind::enactment, EventKind::command, EventKind::warning}) {
    if (to_string(k) == s) return k;
  }
  throw ValidationError("unknown event kind '" + std::string(s) + "'");
}

}  // namespace oddevo

namespace oddevo::runner {

using nlohmann::json;

json record_to_json(const EventRecord& r) {
  return json{{"v", kLogSchemaVersion},
              {"seq", r.seq},
              {"tick", r.tick},
              {"kind", std::string(to_string(r.kind))},
              {"odd_version", r.odd_version},
              {"payload", r.payload}};
}

EventRecord record_from_json(const json& j) {
  std::vector<std::string> problems;
  if (!j.is_object()) throw ValidationError("record is not an object");
  if (j.value("v", 0) != kLogSchemaVersion) problems.emplace_back("v: unsupported schema version");
  for (const char* key : {"seq", "tick", "odd_version"}) {
    if (!j.contains(key) || !j[key].is_number_integer()) problems.push_back(std::string(key) + ": integer required");
  }
  if (!j.contains("kind") || !j["kind"].is_string()) problems.emplace_back("kind: string required");
  if (!j.contains("payload") || !j["payload"].is_object()) problems.emplace_back("payload: object required");
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return EventRecord{j["seq"].get<std::uint64_t>(), j["tick"].get<std::int64_t>(),
                     event_kind_from_string(j["kind"].get<std::string>()), j["payload"],
                     j["odd_version"].get<std::uint64_t>()};
}

std::string to_line(const EventRecord& r) { return record_to_json(r).dump(); }

EventRecord parse_line(const std::string& line) {
  try {
    return record_from_json(json::parse(line));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("record is not valid JSON: ") + e.what());
  }
}

EventLog::EventLog(const std::string& path) {
  sink_.emplace(path, std::ios::trunc);
  if (!*sink_) throw Error("io", "cannot open event log '" + path + "' for writing");
}

const EventRecord& EventLog::append(Event event, std::int64_t tick, std::uint64_t odd_version) {
  std::lock_guard lock(mutex_);
  records_.push_back(EventRecord{records_.size() + 1, tick, event.kind, std::move(event.payload), odd_version});
  if (sink_) {
    *sink_ << to_line(records_.back()) << '\n';
    sink_->flush();
  }
  return records_.back();
}

std::vector<EventRecord> EventLog::records() const {
  std::lock_guard lock(mutex_);
  return records_;
}

std::vector<EventRecord> EventLog::since(std::uint64_t from, std::size_t limit) const {
  std::lock_guard lock(mutex_);
  std::vector<EventRecord> out;
  const std::size_t start = from <= 1 ? 0 : static_cast<std::size_t>(from - 1);
  for (std::size_t i = start; i < records_.size() && out.size() < limit; ++i) out.push_back(records_[i]);
  return out;
}

std::uint64_t EventLog::last_seq() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

std::size_t EventLog::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

std::string EventLog::to_text() const {
  std::lock_guard lock(mutex_);
  std::string out;
  for (const auto& r : records_) {
    out += to_line(r);
    out += '\n';
  }
  return out;
}

std::vector<EventRecord> read_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open event log '" + path + "'");
  std::vector<EventRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(parse_line(line));
    } catch (const ValidationError& e) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace oddevo::runner
