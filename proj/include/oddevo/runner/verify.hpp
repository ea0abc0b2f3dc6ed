#pragma once

// Log verification against an expectation file, and log replay.
//
// Expectation file (JSON):
//   {"schema": "oddevo.expectation/1",
//    "decisions": [{"config": "power-min", "point": [5, -5], "lifetime_years": [5, 8]},
//                  {"reason": "out_of_odd", "point": [35, -15]}, ...],
//    "evolution": ["trigger", "target", "match", "evidence", "assessment", "enactment", "outcome"],
//    "final_odd_version": 2}
//
// Decisions are compared after collapsing consecutive records with the same
// outcome; evolution labels are compared as an exact sequence.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oddevo/runner/event_log.hpp"

namespace oddevo::runner {

struct VerifyFailure {
  std::optional<std::uint64_t> seq;
  std::string message;
};

struct VerifyReport {
  bool passed = true;
  std::vector<VerifyFailure> failures;
  std::vector<std::string> warnings;
};

// Collapsed decision sequence: one entry per change of outcome.
struct DecisionStep {
  std::uint64_t seq = 0;
  std::string label;  // chosen config id, or "out_of_odd"
  nlohmann::json point;
  nlohmann::json lifetime_years;  // null when out of ODD
};

std::vector<DecisionStep> decision_steps(const std::vector<EventRecord>& records);

// trigger / evolution stages / enactment labels, in log order, with seqs.
std::vector<std::pair<std::uint64_t, std::string>> evolution_labels(const std::vector<EventRecord>& records);

// Structural checks on a log: contiguous seq, monotone tick and ODD version,
// decisions choosing among their own options.
std::vector<VerifyFailure> check_log_integrity(const std::vector<EventRecord>& records);

VerifyReport verify(const std::vector<EventRecord>& records, const nlohmann::json& expectation);
VerifyReport verify_files(const std::string& log_path, const std::string& expectation_path);

// Everything a replay reconstructs from a log.
struct ReplaySummary {
  std::vector<std::uint64_t> odd_versions;  // distinct, in order of appearance
  std::vector<std::string> decisions;       // chosen id or "out_of_odd", one per decision record
  std::string final_config;
  std::vector<std::string> enacted_elements;
};

ReplaySummary replay(const std::vector<EventRecord>& records);

}  // namespace oddevo::runner
