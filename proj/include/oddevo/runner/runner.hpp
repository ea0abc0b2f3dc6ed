#pragma once

// Tick-driven scenario runner. Per tick:
//   1. apply queued guidance commands (tick boundary),
//   2. step the managed system under the current environment,
//   3. run one MAPE iteration,
//   4. hand any evolution trigger to the evolution engine.
// Every outcome is appended to the event log.

#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "oddevo/evo/evo_engine.hpp"
#include "oddevo/mape/mape_loop.hpp"
#include "oddevo/runner/event_log.hpp"
#include "oddevo/runner/scenario.hpp"
#include "oddevo/sim/iot_sim.hpp"
#include "oddevo/warehouse/service.hpp"

namespace oddevo::runner {

struct RunnerOptions {
  std::optional<std::uint64_t> seed;        // overrides the scenario seed
  std::optional<bool> approval_gate;        // overrides the scenario setting
  std::optional<std::string> log_path;      // stream the event log to a file
  std::optional<warehouse::Transport> warehouse;  // remote warehouse; default in-process
};

// Point-in-time view for readers; published after every tick.
struct Snapshot {
  std::int64_t tick = 0;
  std::optional<odd::WorkingPoint> working_point;
  std::string config_id;
  bool safe_state = false;
  bool awaiting_approval = false;
  bool finished = false;
  double loss_goal = 0.0;
  std::optional<sim::Telemetry> last_telemetry;
  odd::OddModel odd;
  std::uint64_t last_seq = 0;
};

nlohmann::json snapshot_to_json(const Snapshot& s);

struct CommandAck {
  std::uint64_t id = 0;
  CommandKind kind = CommandKind::feedback;
};

class Runner {
 public:
  explicit Runner(Scenario scenario, RunnerOptions options = {});
  Runner(const Runner&) = delete;
  Runner& operator=(const Runner&) = delete;

  // Advances one tick. No-op once the trace is exhausted.
  void tick();
  void run();
  bool finished() const { return state_.tick >= scenario_.ticks; }

  // Validates and queues a command for the next tick boundary. Throws
  // ValidationError for malformed commands; nothing is queued then.
  CommandAck submit(GuidanceCommand command);

  std::shared_ptr<const Snapshot> snapshot() const;

  const EventLog& log() const { return *log_; }
  const std::vector<sim::Telemetry>& telemetry() const { return telemetry_; }
  std::string telemetry_csv() const;

  const sim::NetworkState& state() const { return state_; }
  const mape::Knowledge& knowledge() const { return knowledge_; }
  const odd::OddModel& odd() const { return knowledge_.odd; }
  const evo::EvolutionEngine& engine() const { return *engine_; }
  const std::vector<evo::EvolutionOutcome>& outcomes() const { return outcomes_; }
  const Scenario& scenario() const { return scenario_; }
  // Null when a remote warehouse transport was supplied.
  warehouse::WarehouseService* warehouse_service() { return warehouse_service_.get(); }

 private:
  struct QueuedCommand {
    std::uint64_t id;
    GuidanceCommand command;
  };

  void emit(Event event);
  void emit_all(Events events);
  void emit_pipeline(Events events, std::uint64_t version_before);
  void apply_commands();
  void apply(const QueuedCommand& queued);
  void run_pipeline(const evo::EvolutionTrigger& trigger);
  void record_outcome(const evo::PipelineResult& result);
  void publish_snapshot();

  Scenario scenario_;
  std::unique_ptr<EventLog> log_;
  std::unique_ptr<warehouse::WarehouseService> warehouse_service_;
  std::unique_ptr<warehouse::WarehouseClient> warehouse_client_;
  std::unique_ptr<evo::EvolutionEngine> engine_;

  sim::NetworkState state_;
  mape::Knowledge knowledge_;
  std::int64_t current_tick_ = 0;
  std::vector<sim::Telemetry> telemetry_;
  std::vector<evo::EvolutionOutcome> outcomes_;
  std::size_t next_scripted_ = 0;

  mutable std::mutex command_mutex_;
  std::deque<QueuedCommand> queue_;
  std::uint64_t next_command_id_ = 1;

  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const Snapshot> snapshot_;
};

// Validates a command body against its kind; throws ValidationError.
void validate_command(const GuidanceCommand& command);

}  // namespace oddevo::runner
