#pragma once

// Evolutionary engine: turns an evolution trigger into an ODD extension.
//
//   trigger -> target -> warehouse search -> sandbox evidence -> assessment
//           -> (approval) -> enactment
//
// Enactment installs the element on the live simulator and extends the ODD
// with the element's configuration (union with the current model). Every
// step before the commit works on copies, so any failure leaves the live
// system and ODD untouched.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "oddevo/events.hpp"
#include "oddevo/evo/detection.hpp"
#include "oddevo/odd/odd_model.hpp"
#include "oddevo/sim/iot_sim.hpp"
#include "oddevo/warehouse/service.hpp"

namespace oddevo::evo {

struct EngineConfig {
  double margin_utility = 2.0;  // packets/sec added around anomaly evidence
  double margin_context = 2.0;  // dB
  int sandbox_runs = 5;
  int sandbox_grid = 5;         // g x g points per target region
  int sandbox_ticks = 20;
  int steady_window = 10;       // trailing ticks averaged for steady-state loss
  double pass_threshold = 1.0;  // required pass_fraction
  std::optional<double> loss_goal;  // default: the managed system's loss goal
  bool approval_gate = false;
  odd::GridResolution coverage_resolution{21, 21};
  std::uint64_t sandbox_seed = 0x5eedULL;
  bool inject_install_failure = false;  // test hook
};

odd::EvolutionTarget derive_target(const EvolutionTrigger& trigger, double margin_utility = 2.0,
                                   double margin_context = 2.0);

struct Candidate {
  warehouse::CatalogueEntry entry;
  warehouse::MatchResult match;
};

// Matched candidates, tightest fit (smallest total margin) first, then by id.
std::vector<Candidate> search(const odd::EvolutionTarget& target, warehouse::WarehouseClient& warehouse,
                              const std::set<std::string>& platform);

struct SandboxEvidence {
  std::string element_id;
  std::vector<odd::WorkingPoint> sampled_points;
  int runs = 0;
  double pass_fraction = 0.0;
  std::vector<double> worst_loss;  // per sampled point, over runs
  std::optional<std::string> failure;
};

// Runs `sandbox_runs` seeded runs of `sandbox_ticks` ticks at every grid
// point of the target on clones of `base` with the element installed.
SandboxEvidence sandbox_evaluate(const sim::ElementPackage& element, const sim::InstallSettings& settings,
                                 const odd::EvolutionTarget& target, const sim::NetworkState& base,
                                 const EngineConfig& config);

bool assess(const SandboxEvidence& evidence, double pass_threshold = 1.0);

enum class OutcomeStatus { enacted, rejected, awaiting_approval, no_candidate };

std::string_view to_string(OutcomeStatus s);

struct EvolutionOutcome {
  OutcomeStatus status = OutcomeStatus::rejected;
  std::optional<std::string> element_id;
  std::optional<std::string> version;
  std::optional<std::uint64_t> odd_version;  // new version when enacted
  std::string reason;
  bool retriable = false;
};

// Installs and extends the ODD, committing to `sim` and `odd` only on success.
EvolutionOutcome enact(const warehouse::FetchResult& element, const odd::EvolutionTarget& target,
                       sim::NetworkState& sim, odd::OddModel& odd, const EngineConfig& config);

struct PipelineResult {
  EvolutionOutcome outcome;
  Events events;
  bool coalesced = false;
};

class EvolutionEngine {
 public:
  EvolutionEngine(EngineConfig config, warehouse::WarehouseClient& warehouse)
      : config_(std::move(config)), warehouse_(warehouse) {}

  // Runs the pipeline for one trigger against the live system.
  PipelineResult handle(const EvolutionTrigger& trigger, sim::NetworkState& sim, odd::OddModel& odd);

  bool awaiting_approval() const { return pending_.has_value(); }
  const odd::EvolutionTarget* pending_target() const { return pending_ ? &pending_->target : nullptr; }

  // Enacts the pending candidate. ValidationError when nothing is pending.
  PipelineResult approve(sim::NetworkState& sim, odd::OddModel& odd);
  // Drops the pending candidate. ValidationError when nothing is pending.
  PipelineResult reject_pending(const std::string& reason);

  EngineConfig& config() { return config_; }
  const EngineConfig& config() const { return config_; }

 private:
  struct Pending {
    odd::EvolutionTarget target;
    warehouse::FetchResult element;
  };

  PipelineResult finish_enactment(const Pending& pending, sim::NetworkState& sim, odd::OddModel& odd);

  EngineConfig config_;
  warehouse::WarehouseClient& warehouse_;
  std::optional<Pending> pending_;
};

nlohmann::json trigger_to_json(const EvolutionTrigger& t);
nlohmann::json outcome_to_json(const EvolutionOutcome& o);

}  // namespace oddevo::evo
