#include "oddevo/runner/verify.hpp"

#include <fstream>

#include "oddevo/errors.hpp"

namespace oddevo::runner {

using nlohmann::json;

namespace {

std::string decision_label(const json& payload) {
  if (payload.value("reason", std::string{}) == "out_of_odd") return "out_of_odd";
  const auto& chosen = payload.at("chosen");
  return chosen.is_string() ? chosen.get<std::string>() : "out_of_odd";
}

json chosen_lifetime(const json& payload, const std::string& label) {
  for (const auto& o : payload.value("options", json::array())) {
    if (o.value("config", std::string{}) == label) return o.at("lifetime_years");
  }
  return nullptr;
}

}  // namespace

std::vector<DecisionStep> decision_steps(const std::vector<EventRecord>& records) {
  std::vector<DecisionStep> steps;
  for (const auto& r : records) {
    if (r.kind != EventKind::decision) continue;
    const std::string label = decision_label(r.payload);
    if (!steps.empty() && steps.back().label == label) continue;
    steps.push_back({r.seq, label, r.payload.value("point", json()), chosen_lifetime(r.payload, label)});
  }
  return steps;
}

std::vector<std::pair<std::uint64_t, std::string>> evolution_labels(const std::vector<EventRecord>& records) {
  std::vector<std::pair<std::uint64_t, std::string>> out;
  for (const auto& r : records) {
    switch (r.kind) {
      case EventKind::trigger: out.emplace_back(r.seq, "trigger"); break;
      case EventKind::enactment: out.emplace_back(r.seq, "enactment"); break;
      case EventKind::evolution: out.emplace_back(r.seq, r.payload.value("stage", std::string("?"))); break;
      default: break;
    }
  }
  return out;
}

std::vector<VerifyFailure> check_log_integrity(const std::vector<EventRecord>& records) {
  std::vector<VerifyFailure> failures;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.seq != i + 1) {
      failures.push_back({r.seq, "seq " + std::to_string(r.seq) + " breaks contiguity (expected " +
                                     std::to_string(i + 1) + ")"});
    }
    if (i > 0 && r.tick < records[i - 1].tick) failures.push_back({r.seq, "tick decreases"});
    if (i > 0 && r.odd_version < records[i - 1].odd_version) failures.push_back({r.seq, "ODD version decreases"});
    if (r.kind == EventKind::decision) {
      if (!r.payload.contains("reason") || !r.payload.contains("chosen") || !r.payload.contains("options")) {
        failures.push_back({r.seq, "decision record lacks reason/chosen/options"});
        continue;
      }
      const std::string reason = r.payload["reason"].get<std::string>();
      const auto& chosen = r.payload["chosen"];
      if (reason == "out_of_odd") {
        if (!chosen.is_null() || !r.payload["options"].empty()) {
          failures.push_back({r.seq, "out_of_odd decision must have no options and no choice"});
        }
      } else if (!chosen.is_string() || chosen_lifetime(r.payload, chosen.get<std::string>()).is_null()) {
        failures.push_back({r.seq, "decision chose a configuration outside its options"});
      }
    }
  }
  return failures;
}

VerifyReport verify(const std::vector<EventRecord>& records, const json& expectation) {
  VerifyReport report;
  const auto fail = [&](std::optional<std::uint64_t> seq, std::string message) {
    report.passed = false;
    report.failures.push_back({seq, std::move(message)});
  };

  for (auto& f : check_log_integrity(records)) fail(f.seq, std::move(f.message));

  if (!expectation.is_object()) {
    fail(std::nullopt, "expectation: must be an object");
    return report;
  }
  const json decisions = expectation.value("decisions", json::array());
  const json evolution = expectation.value("evolution", json::array());
  const bool has_final = expectation.contains("final_odd_version");
  if (decisions.empty() && evolution.empty() && !has_final) {
    report.warnings.emplace_back("expectation is empty; nothing compared");
    return report;
  }

  const auto steps = decision_steps(records);
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    const auto& want = decisions[i];
    const std::string where = "decisions[" + std::to_string(i) + "]";
    if (i >= steps.size()) {
      fail(std::nullopt, where + ": missing from log");
      continue;
    }
    const auto& got = steps[i];
    const std::string want_label =
        want.value("reason", std::string{}) == "out_of_odd" ? "out_of_odd" : want.value("config", std::string{});
    if (got.label != want_label) {
      fail(got.seq, where + ": expected '" + want_label + "', log has '" + got.label + "'");
      continue;
    }
    if (want.contains("point") && got.point != want["point"]) {
      fail(got.seq, where + ": expected point " + want["point"].dump() + ", log has " + got.point.dump());
    }
    if (want.contains("lifetime_years") && got.lifetime_years != want["lifetime_years"]) {
      fail(got.seq, where + ": expected lifetime " + want["lifetime_years"].dump() + ", log has " +
                        got.lifetime_years.dump());
    }
  }
  if (!decisions.empty() && steps.size() > decisions.size()) {
    fail(steps[decisions.size()].seq, "log has " + std::to_string(steps.size() - decisions.size()) +
                                          " unexpected decision change(s)");
  }

  if (expectation.contains("evolution")) {
    const auto labels = evolution_labels(records);
    for (std::size_t i = 0; i < std::max(labels.size(), evolution.size()); ++i) {
      if (i >= labels.size()) {
        fail(std::nullopt, "evolution[" + std::to_string(i) + "]: '" + evolution[i].get<std::string>() +
                               "' missing from log");
        break;
      }
      if (i >= evolution.size()) {
        fail(labels[i].first, "unexpected evolution record '" + labels[i].second + "'");
        break;
      }
      if (labels[i].second != evolution[i].get<std::string>()) {
        fail(labels[i].first, "evolution[" + std::to_string(i) + "]: expected '" +
                                  evolution[i].get<std::string>() + "', log has '" + labels[i].second + "'");
        break;
      }
    }
  }

  if (has_final) {
    const std::uint64_t want = expectation["final_odd_version"].get<std::uint64_t>();
    const std::uint64_t got = records.empty() ? 0 : records.back().odd_version;
    if (got != want) {
      fail(records.empty() ? std::nullopt : std::optional(records.back().seq),
           "final ODD version " + std::to_string(got) + ", expected " + std::to_string(want));
    }
  }
  return report;
}

VerifyReport verify_files(const std::string& log_path, const std::string& expectation_path) {
  VerifyReport report;
  std::vector<EventRecord> records;
  json expectation;
  try {
    records = read_log(log_path);
    std::ifstream in(expectation_path);
    if (!in) throw NotFoundError("cannot open expectation '" + expectation_path + "'");
    expectation = json::parse(in);
  } catch (const Error& e) {
    report.passed = false;
    report.failures.push_back({std::nullopt, e.what()});
    return report;
  } catch (const json::exception& e) {
    report.passed = false;
    report.failures.push_back({std::nullopt, expectation_path + ": " + e.what()});
    return report;
  }
  return verify(records, expectation);
}

ReplaySummary replay(const std::vector<EventRecord>& records) {
  ReplaySummary s;
  for (const auto& r : records) {
    if (s.odd_versions.empty() || s.odd_versions.back() != r.odd_version) s.odd_versions.push_back(r.odd_version);
    if (r.kind == EventKind::decision) {
      const std::string label = decision_label(r.payload);
      s.decisions.push_back(label);
      if (label != "out_of_odd") s.final_config = label;
    } else if (r.kind == EventKind::enactment) {
      s.enacted_elements.push_back(r.payload.value("element_id", std::string{}));
    }
  }
  return s;
}

}  // namespace oddevo::runner
