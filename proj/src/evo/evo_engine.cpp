#include "oddevo/evo/evo_engine.hpp"

#include <algorithm>
#include <numeric>

#include "oddevo/errors.hpp"
#include "oddevo/odd/odd_json.hpp"

namespace oddevo::evo {

using nlohmann::json;

odd::EvolutionTarget derive_target(const EvolutionTrigger& trigger, double margin_utility, double margin_context) {
  if (trigger.kind == TriggerKind::stakeholder_goal) {
    if (!trigger.goal) throw ValidationError("stakeholder trigger carries no goal");
    odd::EvolutionTarget t = *trigger.goal;
    t.origin = odd::TargetOrigin::stakeholder_goal;
    t.created_at = trigger.tick;
    t.validate();
    return t;
  }
  if (trigger.evidence.empty()) throw ValidationError("trigger carries no evidence");
  Interval u{trigger.evidence.front().utility, trigger.evidence.front().utility};
  Interval c{trigger.evidence.front().context, trigger.evidence.front().context};
  for (const auto& p : trigger.evidence) {
    u = Interval::hull(u, {p.utility, p.utility});
    c = Interval::hull(c, {p.context, p.context});
  }
  u = u.inflated(margin_utility);
  c = c.inflated(margin_context);
  // Keep the box inside the valid working-point space.
  u.lo = std::max(u.lo, 0.0);
  c.hi = std::min(c.hi, odd::kMaxContextDb);
  c.lo = std::max(c.lo, odd::kMinContextDb);

  odd::EvolutionTarget t;
  t.regions = {odd::Region{c, u, odd::Knowledge::known_unknown}};
  t.origin = trigger.kind == TriggerKind::novelty ? odd::TargetOrigin::novelty : odd::TargetOrigin::anomaly;
  t.created_at = trigger.tick;
  return t;
}

std::vector<Candidate> search(const odd::EvolutionTarget& target, warehouse::WarehouseClient& warehouse,
                              const std::set<std::string>& platform) {
  const odd::Region hull = target.hull();
  const auto coarse = warehouse.query({{std::string(warehouse::kThroughput), hull.utility},
                                       {std::string(warehouse::kInterference), hull.context}});
  std::vector<Candidate> out;
  for (const auto& entry : coarse.entries) {
    auto m = warehouse.match(entry.element_id, entry.version, target, platform);
    if (m.matched) out.push_back({entry, std::move(m)});
  }
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    const double ma = a.match.total_margin();
    const double mb = b.match.total_margin();
    if (ma != mb) return ma < mb;
    if (a.entry.element_id != b.entry.element_id) return a.entry.element_id < b.entry.element_id;
    return a.entry.version < b.entry.version;
  });
  return out;
}

namespace {

// splitmix64 finalizer; derives independent seeds from (base, run, point).
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

SandboxEvidence sandbox_evaluate(const sim::ElementPackage& element, const sim::InstallSettings& settings,
                                 const odd::EvolutionTarget& target, const sim::NetworkState& base,
                                 const EngineConfig& config) {
  SandboxEvidence ev;
  ev.element_id = element.element_id;
  ev.runs = std::max(config.sandbox_runs, 1);
  for (const auto& region : target.regions) {
    const auto pts = odd::grid_points(region, {config.sandbox_grid, config.sandbox_grid});
    ev.sampled_points.insert(ev.sampled_points.end(), pts.begin(), pts.end());
  }
  ev.worst_loss.assign(ev.sampled_points.size(), 0.0);

  sim::NetworkState installed;
  std::string config_id;
  try {
    installed = sim::install_element(base, element, settings);
    config_id = sim::element_configuration(element, settings).id;
    installed = sim::set_configuration(installed, config_id);
  } catch (const Error& e) {
    ev.failure = e.what();
    ev.pass_fraction = 0.0;
    std::fill(ev.worst_loss.begin(), ev.worst_loss.end(), 1.0);
    return ev;
  }

  const double loss_goal = config.loss_goal.value_or(base.loss_goal);
  const int ticks = std::max(config.sandbox_ticks, 1);
  const int window = std::clamp(config.steady_window, 1, ticks);
  std::size_t passes = 0;
  for (int run = 0; run < ev.runs; ++run) {
    const std::uint64_t run_seed = mix(config.sandbox_seed ^ mix(static_cast<std::uint64_t>(run)));
    for (std::size_t i = 0; i < ev.sampled_points.size(); ++i) {
      const auto& p = ev.sampled_points[i];
      sim::NetworkState state = installed.reseeded(mix(run_seed + i));
      double tail = 0.0;
      for (int t = 0; t < ticks; ++t) {
        auto [next, telemetry] = sim::step(state, {p.context, p.utility});
        state = std::move(next);
        if (t >= ticks - window) tail += telemetry.packet_loss_fraction;
      }
      const double steady = tail / window;
      ev.worst_loss[i] = std::max(ev.worst_loss[i], steady);
      if (steady <= loss_goal) ++passes;
    }
  }
  const auto total = ev.sampled_points.size() * static_cast<std::size_t>(ev.runs);
  ev.pass_fraction = total == 0 ? 0.0 : static_cast<double>(passes) / static_cast<double>(total);
  return ev;
}

bool assess(const SandboxEvidence& evidence, double pass_threshold) {
  return !evidence.failure && evidence.pass_fraction >= pass_threshold;
}

std::string_view to_string(OutcomeStatus s) {
  switch (s) {
    case OutcomeStatus::enacted: return "enacted";
    case OutcomeStatus::rejected: return "rejected";
    case OutcomeStatus::awaiting_approval: return "awaiting_approval";
    case OutcomeStatus::no_candidate: return "no_candidate";
  }
  return "rejected";
}

EvolutionOutcome enact(const warehouse::FetchResult& element, const odd::EvolutionTarget& target,
                       sim::NetworkState& sim, odd::OddModel& odd, const EngineConfig& config) {
  EvolutionOutcome out;
  out.element_id = element.element_id;
  out.version = element.version;
  try {
    auto [pkg, settings] = warehouse::to_package(element);
    settings.inject_failure = config.inject_install_failure;
    sim::NetworkState next_sim = sim::install_element(sim, pkg, settings);
    const odd::ConfigurationOdd extension = sim::element_configuration(pkg, settings);
    odd::OddModel next_odd = odd::odd_union(odd, std::span<const odd::ConfigurationOdd>(&extension, 1));
    const auto cov = odd::coverage(next_odd, target, config.coverage_resolution);
    if (cov.fraction < 1.0) {
      out.status = OutcomeStatus::rejected;
      out.reason = "extended ODD does not cover the evolution target";
      return out;
    }
    sim = std::move(next_sim);
    odd = std::move(next_odd);
    out.status = OutcomeStatus::enacted;
    out.odd_version = odd.version();
    out.reason = "installed as configuration '" + extension.id + "'";
  } catch (const Error& e) {
    out.status = OutcomeStatus::rejected;
    out.reason = std::string("enactment failed, rolled back: ") + e.what();
  }
  return out;
}

json trigger_to_json(const EvolutionTrigger& t) {
  json evidence = json::array();
  for (const auto& p : t.evidence) evidence.push_back(odd::point_to_json(p));
  json j{{"kind", std::string(to_string(t.kind))}, {"evidence", std::move(evidence)}, {"tick", t.tick}};
  if (t.goal) j["goal"] = odd::target_to_json(*t.goal);
  return j;
}

json outcome_to_json(const EvolutionOutcome& o) {
  json j{{"stage", "outcome"}, {"status", std::string(to_string(o.status))}, {"reason", o.reason}};
  j["element_id"] = o.element_id ? json(*o.element_id) : json(nullptr);
  j["version"] = o.version ? json(*o.version) : json(nullptr);
  j["odd_version"] = o.odd_version ? json(*o.odd_version) : json(nullptr);
  if (o.retriable) j["retriable"] = true;
  return j;
}

namespace {

json evidence_to_json(const SandboxEvidence& ev) {
  const double worst = ev.worst_loss.empty() ? 0.0 : *std::max_element(ev.worst_loss.begin(), ev.worst_loss.end());
  json j{{"stage", "evidence"},
         {"element_id", ev.element_id},
         {"runs", ev.runs},
         {"points", ev.sampled_points.size()},
         {"pass_fraction", ev.pass_fraction},
         {"worst_loss", worst}};
  if (ev.failure) j["failure"] = *ev.failure;
  return j;
}

}  // namespace

PipelineResult EvolutionEngine::handle(const EvolutionTrigger& trigger, sim::NetworkState& sim, odd::OddModel& odd) {
  PipelineResult result;
  auto& events = result.events;
  events.push_back({EventKind::trigger, trigger_to_json(trigger)});

  odd::EvolutionTarget target;
  try {
    target = derive_target(trigger, config_.margin_utility, config_.margin_context);
  } catch (const ValidationError& e) {
    result.outcome.status = OutcomeStatus::rejected;
    result.outcome.reason = e.what();
    events.push_back({EventKind::evolution, outcome_to_json(result.outcome)});
    return result;
  }
  json target_json = odd::target_to_json(target);
  target_json["stage"] = "target";
  events.push_back({EventKind::evolution, std::move(target_json)});

  if (pending_) {
    result.coalesced = pending_->target.regions == target.regions;
    result.outcome.status = OutcomeStatus::rejected;
    result.outcome.reason = result.coalesced ? "coalesced with the evolution awaiting approval"
                                             : "another evolution is awaiting approval";
    events.push_back({EventKind::evolution, outcome_to_json(result.outcome)});
    return result;
  }

  if (odd::coverage(odd, target, config_.coverage_resolution).fraction == 1.0) {
    result.outcome.status = OutcomeStatus::rejected;
    result.outcome.reason = "target already covered by the current ODD";
    events.push_back({EventKind::evolution, outcome_to_json(result.outcome)});
    return result;
  }

  std::vector<Candidate> candidates;
  try {
    candidates = search(target, warehouse_, sim.platform_tags);
  } catch (const UnavailableError& e) {
    result.outcome.status = OutcomeStatus::rejected;
    result.outcome.reason = e.what();
    result.outcome.retriable = true;
    events.push_back({EventKind::warning, json{{"phase", "search"}, {"error", e.code()}, {"message", e.what()}}});
    events.push_back({EventKind::evolution, outcome_to_json(result.outcome)});
    return result;
  }
  json ranked = json::array();
  for (const auto& c : candidates) ranked.push_back(warehouse::match_to_json(c.match));
  events.push_back({EventKind::evolution,
                    json{{"stage", "match"}, {"candidates", std::move(ranked)}, {"revision", warehouse_.last_revision()}}});

  if (candidates.empty()) {
    result.outcome.status = OutcomeStatus::no_candidate;
    result.outcome.reason = "no warehouse element matches the evolution target";
    events.push_back({EventKind::evolution, outcome_to_json(result.outcome)});
    return result;
  }

  for (const auto& candidate : candidates) {
    warehouse::FetchResult fetched;
    try {
      fetched = warehouse_.fetch(candidate.entry.element_id, candidate.entry.version);
    } catch (const Error& e) {
      events.push_back({EventKind::warning, json{{"phase", "fetch"},
                                                 {"element_id", candidate.entry.element_id},
                                                 {"error", e.code()},
                                                 {"message", e.what()}}});
      continue;
    }
    auto [pkg, settings] = warehouse::to_package(fetched);
    const SandboxEvidence evidence = sandbox_evaluate(pkg, settings, target, sim, config_);
    events.push_back({EventKind::evolution, evidence_to_json(evidence)});
    const bool accepted = assess(evidence, config_.pass_threshold);
    events.push_back({EventKind::evolution, json{{"stage", "assessment"},
                                                 {"element_id", evidence.element_id},
                                                 {"accepted", accepted},
                                                 {"threshold", config_.pass_threshold}}});
    if (!accepted) continue;

    Pending pending{target, std::move(fetched)};
    if (config_.approval_gate) {
      result.outcome.status = OutcomeStatus::awaiting_approval;
      result.outcome.element_id = pending.element.element_id;
      result.outcome.version = pending.element.version;
      result.outcome.reason = "approval required before enactment";
      pending_ = std::move(pending);
      events.push_back({EventKind::evolution, outcome_to_json(result.outcome)});
      return result;
    }
    auto finished = finish_enactment(pending, sim, odd);
    for (auto& e : finished.events) events.push_back(std::move(e));
    result.outcome = std::move(finished.outcome);
    return result;
  }

  result.outcome.status = OutcomeStatus::rejected;
  result.outcome.reason = "no candidate produced sufficient sandbox evidence";
  events.push_back({EventKind::evolution, outcome_to_json(result.outcome)});
  return result;
}

PipelineResult EvolutionEngine::finish_enactment(const Pending& pending, sim::NetworkState& sim, odd::OddModel& odd) {
  PipelineResult result;
  result.outcome = enact(pending.element, pending.target, sim, odd, config_);
  if (result.outcome.status == OutcomeStatus::enacted) {
    const auto cov = odd::coverage(odd, pending.target, config_.coverage_resolution);
    result.events.push_back({EventKind::enactment, json{{"element_id", pending.element.element_id},
                                                        {"version", pending.element.version},
                                                        {"odd_version", odd.version()},
                                                        {"coverage", cov.fraction}}});
  }
  result.events.push_back({EventKind::evolution, outcome_to_json(result.outcome)});
  return result;
}

PipelineResult EvolutionEngine::approve(sim::NetworkState& sim, odd::OddModel& odd) {
  if (!pending_) throw ValidationError("no enactment is awaiting approval");
  Pending pending = std::move(*pending_);
  pending_.reset();
  return finish_enactment(pending, sim, odd);
}

PipelineResult EvolutionEngine::reject_pending(const std::string& reason) {
  if (!pending_) throw ValidationError("no enactment is awaiting approval");
  PipelineResult result;
  result.outcome.status = OutcomeStatus::rejected;
  result.outcome.element_id = pending_->element.element_id;
  result.outcome.version = pending_->element.version;
  result.outcome.reason = reason;
  pending_.reset();
  result.events.push_back({EventKind::evolution, outcome_to_json(result.outcome)});
  return result;
}

}  // namespace oddevo::evo
