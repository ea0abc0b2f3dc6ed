#pragma once

// Append-only event log. One JSON object per line:
//   {"v":1,"seq":N,"tick":T,"kind":"decision","odd_version":V,"payload":{...}}
// seq starts at 1 and is contiguous.

#include <cstdint>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oddevo/events.hpp"

namespace oddevo::runner {

inline constexpr int kLogSchemaVersion = 1;

struct EventRecord {
  std::uint64_t seq = 0;
  std::int64_t tick = 0;
  EventKind kind = EventKind::warning;
  nlohmann::json payload;
  std::uint64_t odd_version = 0;
};

nlohmann::json record_to_json(const EventRecord& r);
EventRecord record_from_json(const nlohmann::json& j);  // ValidationError on schema mismatch
std::string to_line(const EventRecord& r);
EventRecord parse_line(const std::string& line);

// Thread-safe: one writer, any number of readers.
class EventLog {
 public:
  EventLog() = default;
  // Also streams every appended record to `path` (truncated first).
  explicit EventLog(const std::string& path);

  const EventRecord& append(Event event, std::int64_t tick, std::uint64_t odd_version);

  std::vector<EventRecord> records() const;
  // Records with seq >= from, at most `limit` of them.
  std::vector<EventRecord> since(std::uint64_t from, std::size_t limit = SIZE_MAX) const;
  std::uint64_t last_seq() const;
  std::size_t size() const;

  std::string to_text() const;

 private:
  mutable std::mutex mutex_;
  std::vector<EventRecord> records_;
  std::optional<std::ofstream> sink_;
};

std::vector<EventRecord> read_log(const std::string& path);

}  // namespace oddevo::runner
