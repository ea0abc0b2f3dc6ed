#include <gtest/gtest.h>

#include "oddevo/errors.hpp"
#include "oddevo/evo/evo_engine.hpp"

using namespace oddevo;
using namespace oddevo::evo;

namespace {

EvolutionTrigger anomaly_at(odd::WorkingPoint p, int n = 3) {
  return {TriggerKind::anomaly, std::vector<odd::WorkingPoint>(n, p), std::nullopt, 12};
}

EvolutionTrigger stakeholder(odd::EvolutionTarget t) { return {TriggerKind::stakeholder_goal, {}, t, 0}; }

struct World {
  warehouse::WarehouseService service;
  warehouse::WarehouseClient client;
  sim::NetworkState sim;
  odd::OddModel odd;

  explicit World(warehouse::Catalogue cat = warehouse::canonical_catalogue())
      : service(std::move(cat)), client(warehouse::in_process(service)) {
    odd = odd::canonical_model();
    sim = sim::init(sim::canonical_sim_config(), odd);
  }
};

std::vector<std::string> stages(const Events& events) {
  std::vector<std::string> out;
  for (const auto& e : events) {
    if (e.kind == EventKind::trigger) out.emplace_back("trigger");
    if (e.kind == EventKind::enactment) out.emplace_back("enactment");
    if (e.kind == EventKind::evolution) out.push_back(e.payload.at("stage").get<std::string>());
  }
  return out;
}

const std::vector<std::string> kFullPipeline{"trigger", "target", "match", "evidence", "assessment", "enactment", "outcome"};

}  // namespace

TEST(DeriveTarget, StakeholderGoalVerbatim) {
  const auto t = derive_target(stakeholder(odd::canonical_evolution_target()));
  EXPECT_EQ(t.regions, odd::canonical_evolution_target().regions);
  EXPECT_EQ(t.origin, odd::TargetOrigin::stakeholder_goal);
}

TEST(DeriveTarget, AnomalyEvidenceInflated) {
  const auto t = derive_target(anomaly_at({35, -15}));
  ASSERT_EQ(t.regions.size(), 1u);
  EXPECT_EQ(t.regions[0].context, (Interval{-17, -13}));
  EXPECT_EQ(t.regions[0].utility, (Interval{33, 37}));
  EXPECT_EQ(t.origin, odd::TargetOrigin::anomaly);
}

TEST(DeriveTarget, ZeroMarginIsBoundingBox) {
  EvolutionTrigger trig{TriggerKind::anomaly, {{30, -10}, {35, -15}, {32, -12}}, std::nullopt, 0};
  const auto t = derive_target(trig, 0, 0);
  EXPECT_EQ(t.regions[0].context, (Interval{-15, -10}));
  EXPECT_EQ(t.regions[0].utility, (Interval{30, 35}));
}

TEST(DeriveTarget, ClampedToValidSpace) {
  const auto t = derive_target(anomaly_at({1, -1}));
  EXPECT_EQ(t.regions[0].context, (Interval{-3, 0}));
  EXPECT_EQ(t.regions[0].utility, (Interval{0, 3}));
}

TEST(DeriveTarget, RejectsEmptyEvidence) {
  EXPECT_THROW(derive_target({TriggerKind::anomaly, {}, std::nullopt, 0}), ValidationError);
  EXPECT_THROW(derive_target({TriggerKind::stakeholder_goal, {}, std::nullopt, 0}), ValidationError);
}

TEST(Search, EvolutionTargetFindsRadioModule) {
  World w;
  const auto found = search(odd::canonical_evolution_target(), w.client, w.sim.platform_tags);
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(found[0].entry.element_id, "radio-module");
}

TEST(Search, NothingCoversEightyPacketsPerSecond) {
  World w;
  const odd::EvolutionTarget t{{odd::box(-10, 0, 60, 80)}, odd::TargetOrigin::stakeholder_goal, 0};
  EXPECT_TRUE(search(t, w.client, w.sim.platform_tags).empty());
}

TEST(Search, TighterFitRankedFirst) {
  World w;
  // lowrate-codec [0,25]x[-40,0] and radio [0,50]x[-30,0] both cover this.
  const odd::EvolutionTarget t{{odd::box(-20, -10, 10, 20)}, odd::TargetOrigin::stakeholder_goal, 0};
  const auto found = search(t, w.client, w.sim.platform_tags);
  ASSERT_EQ(found.size(), 2u);  // lora [0,12] fails, wifi is platform-incompatible
  EXPECT_EQ(found[0].entry.element_id, "lowrate-codec");
  EXPECT_LE(found[0].match.total_margin(), found[1].match.total_margin());
}

TEST(Sandbox, RadioModulePassesEverywhere) {
  World w;
  const auto [pkg, settings] = warehouse::to_package(w.client.fetch("radio-module", "1.0.0"));
  const auto ev = sandbox_evaluate(pkg, settings, odd::canonical_evolution_target(), w.sim, EngineConfig{});
  EXPECT_EQ(ev.pass_fraction, 1.0);
  EXPECT_EQ(ev.sampled_points.size(), 25u);
  EXPECT_EQ(ev.runs, 5);
  EXPECT_FALSE(ev.failure);
}

TEST(Sandbox, UndersizedElementFailsSomewhere) {
  World w;
  auto [pkg, settings] = warehouse::to_package(w.client.fetch("lowrate-codec", "1.2.0"));
  const auto ev = sandbox_evaluate(pkg, settings, odd::canonical_evolution_target(), w.sim, EngineConfig{});
  EXPECT_LT(ev.pass_fraction, 1.0);
  EXPECT_GT(ev.pass_fraction, 0.0);
}

TEST(Sandbox, DeterministicAndIsolated) {
  World w;
  const auto before = w.sim.motes;
  const auto [pkg, settings] = warehouse::to_package(w.client.fetch("lowrate-codec", "1.2.0"));
  const auto a = sandbox_evaluate(pkg, settings, odd::canonical_evolution_target(), w.sim, EngineConfig{});
  const auto b = sandbox_evaluate(pkg, settings, odd::canonical_evolution_target(), w.sim, EngineConfig{});
  EXPECT_EQ(a.worst_loss, b.worst_loss);
  EXPECT_EQ(w.sim.motes, before);
  EXPECT_FALSE(w.sim.capabilities.has("lowrate-codec"));
}

TEST(Assess, Thresholds) {
  SandboxEvidence ev;
  ev.pass_fraction = 1.0;
  EXPECT_TRUE(assess(ev));
  ev.pass_fraction = 0.96;
  EXPECT_FALSE(assess(ev));
  EXPECT_TRUE(assess(ev, 0.95));
  ev.failure = "install failed";
  EXPECT_FALSE(assess(ev, 0.0));
}

TEST(Engine, AnomalyEndToEnd) {
  World w;
  EvolutionEngine engine({}, w.client);
  const auto before = w.odd;
  const auto r = engine.handle(anomaly_at({35, -15}), w.sim, w.odd);
  EXPECT_EQ(r.outcome.status, OutcomeStatus::enacted);
  EXPECT_EQ(*r.outcome.element_id, "radio-module");
  EXPECT_EQ(stages(r.events), kFullPipeline);
  EXPECT_EQ(w.odd.version(), before.version() + 1);
  EXPECT_TRUE(odd::contains(w.odd, {35, -15}));
  EXPECT_TRUE(w.sim.capabilities.has("radio-module"));
  // Extension never removes regions.
  for (const auto& c : before.configurations()) EXPECT_EQ(w.odd.at(c.id), c);
}

TEST(Engine, StakeholderGoalCoversEvolutionTarget) {
  World w;
  EvolutionEngine engine({}, w.client);
  const auto r = engine.handle(stakeholder(odd::canonical_evolution_target()), w.sim, w.odd);
  ASSERT_EQ(r.outcome.status, OutcomeStatus::enacted);
  EXPECT_EQ(odd::coverage(w.odd, odd::canonical_evolution_target(), {21, 21}).fraction, 1.0);
  // A second identical goal is already met.
  const auto again = engine.handle(stakeholder(odd::canonical_evolution_target()), w.sim, w.odd);
  EXPECT_EQ(again.outcome.status, OutcomeStatus::rejected);
  EXPECT_EQ(w.odd.version(), 2u);
}

TEST(Engine, EmptyCatalogueHasNoCandidate) {
  World w{warehouse::Catalogue{}};
  EvolutionEngine engine({}, w.client);
  const auto r = engine.handle(anomaly_at({35, -15}), w.sim, w.odd);
  EXPECT_EQ(r.outcome.status, OutcomeStatus::no_candidate);
  EXPECT_EQ(w.odd.version(), 1u);
}

TEST(Engine, ApprovalGateHoldsUntilApproved) {
  World w;
  EngineConfig cfg;
  cfg.approval_gate = true;
  EvolutionEngine engine(cfg, w.client);
  EXPECT_THROW(engine.approve(w.sim, w.odd), ValidationError);
  const auto r = engine.handle(anomaly_at({35, -15}), w.sim, w.odd);
  EXPECT_EQ(r.outcome.status, OutcomeStatus::awaiting_approval);
  EXPECT_TRUE(engine.awaiting_approval());
  EXPECT_EQ(w.odd.version(), 1u);
  EXPECT_FALSE(w.sim.capabilities.has("radio-module"));

  const auto dup = engine.handle(anomaly_at({35, -15}), w.sim, w.odd);
  EXPECT_TRUE(dup.coalesced);

  const auto ok = engine.approve(w.sim, w.odd);
  EXPECT_EQ(ok.outcome.status, OutcomeStatus::enacted);
  EXPECT_EQ(w.odd.version(), 2u);
  EXPECT_FALSE(engine.awaiting_approval());
}

TEST(Engine, RejectDropsPending) {
  World w;
  EngineConfig cfg;
  cfg.approval_gate = true;
  EvolutionEngine engine(cfg, w.client);
  engine.handle(anomaly_at({35, -15}), w.sim, w.odd);
  const auto r = engine.reject_pending("operator said no");
  EXPECT_EQ(r.outcome.status, OutcomeStatus::rejected);
  EXPECT_FALSE(engine.awaiting_approval());
  EXPECT_EQ(w.odd.version(), 1u);
  EXPECT_THROW(engine.reject_pending("again"), ValidationError);
}

TEST(Engine, InstallFailureRollsBack) {
  World w;
  EngineConfig cfg;
  cfg.inject_install_failure = true;
  EvolutionEngine engine(cfg, w.client);
  const auto sim_before = w.sim.capabilities;
  const auto r = engine.handle(anomaly_at({35, -15}), w.sim, w.odd);
  EXPECT_EQ(r.outcome.status, OutcomeStatus::rejected);
  EXPECT_EQ(w.odd.version(), 1u);
  EXPECT_EQ(w.sim.capabilities, sim_before);
}

TEST(Engine, UnreachableWarehouseIsRetriable) {
  warehouse::WarehouseClient down([](const std::string&, const nlohmann::json&) -> nlohmann::json {
    throw UnavailableError("down");
  });
  World w;
  EvolutionEngine engine({}, down);
  const auto r = engine.handle(anomaly_at({35, -15}), w.sim, w.odd);
  EXPECT_EQ(r.outcome.status, OutcomeStatus::rejected);
  EXPECT_TRUE(r.outcome.retriable);
  EXPECT_EQ(w.odd.version(), 1u);
}

TEST(Engine, Deterministic) {
  World a, b;
  EvolutionEngine ea({}, a.client), eb({}, b.client);
  const auto ra = ea.handle(anomaly_at({35, -15}), a.sim, a.odd);
  const auto rb = eb.handle(anomaly_at({35, -15}), b.sim, b.odd);
  ASSERT_EQ(ra.events.size(), rb.events.size());
  for (std::size_t i = 0; i < ra.events.size(); ++i) EXPECT_EQ(ra.events[i].payload, rb.events[i].payload);
}
