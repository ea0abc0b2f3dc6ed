#include "oddevo/runner/runner.hpp"

#include <charconv>

#include "oddevo/errors.hpp"
#include "oddevo/odd/odd_json.hpp"

namespace oddevo::runner {

using nlohmann::json;

json snapshot_to_json(const Snapshot& s) {
  json j{{"tick", s.tick},
         {"working_point", s.working_point ? odd::point_to_json(*s.working_point) : json(nullptr)},
         {"config", s.config_id},
         {"safe_state", s.safe_state},
         {"awaiting_approval", s.awaiting_approval},
         {"finished", s.finished},
         {"loss_goal", s.loss_goal},
         {"odd_version", s.odd.version()},
         {"last_seq", s.last_seq}};
  if (s.last_telemetry) {
    const auto& t = *s.last_telemetry;
    j["telemetry"] = json{{"tick", t.tick},
                          {"demand", t.demand},
                          {"interference", t.interference},
                          {"achieved", t.achieved_throughput},
                          {"loss", t.packet_loss_fraction},
                          {"lifetime_years", odd::interval_to_json(t.lifetime_estimate_years)}};
  }
  return j;
}

void validate_command(const GuidanceCommand& command) {
  const json& body = command.body;
  if (!body.is_object()) throw ValidationError("body: must be an object");
  switch (command.kind) {
    case CommandKind::add_evolution_target:
      if (!body.contains("regions")) throw ValidationError("body.regions: missing");
      (void)odd::target_from_json(json{{"regions", body["regions"]}});
      break;
    case CommandKind::add_goal: {
      if (!body.contains("loss_threshold") || !body["loss_threshold"].is_number()) {
        throw ValidationError("body.loss_threshold: number required");
      }
      mape::AdaptationGoals{body["loss_threshold"].get<double>()}.validate();
      break;
    }
    case CommandKind::feedback: {
      const auto verdict = body.value("verdict", std::string{});
      if (verdict != "accept" && verdict != "reject") throw ValidationError("body.verdict: 'accept' or 'reject'");
      if (!body.contains("target_seq") || !body["target_seq"].is_number_unsigned()) {
        throw ValidationError("body.target_seq: non-negative integer required");
      }
      break;
    }
    case CommandKind::approve:
      break;
  }
}

Runner::Runner(Scenario scenario, RunnerOptions options) : scenario_(std::move(scenario)) {
  if (options.seed) scenario_.network.seed = *options.seed;
  if (options.approval_gate) scenario_.evolution.approval_gate = *options.approval_gate;
  for (const auto& sc : scenario_.commands) validate_command(sc.command);

  log_ = options.log_path ? std::make_unique<EventLog>(*options.log_path) : std::make_unique<EventLog>();
  if (options.warehouse) {
    warehouse_client_ = std::make_unique<warehouse::WarehouseClient>(*options.warehouse);
  } else {
    warehouse_service_ = std::make_unique<warehouse::WarehouseService>(scenario_.catalogue);
    warehouse_client_ = std::make_unique<warehouse::WarehouseClient>(warehouse::in_process(*warehouse_service_));
  }
  engine_ = std::make_unique<evo::EvolutionEngine>(scenario_.evolution, *warehouse_client_);

  state_ = sim::init(scenario_.network, scenario_.odd);
  knowledge_.odd = scenario_.odd;
  knowledge_.current_config = state_.config_id;
  knowledge_.goals.loss_threshold = scenario_.network.loss_goal;
  knowledge_.history = mape::History(scenario_.history_capacity);
  publish_snapshot();
}

void Runner::emit(Event event) { log_->append(std::move(event), current_tick_, knowledge_.odd.version()); }

void Runner::emit_all(Events events) {
  for (auto& e : events) emit(std::move(e));
}

CommandAck Runner::submit(GuidanceCommand command) {
  validate_command(command);
  if (command.kind == CommandKind::approve && !snapshot()->awaiting_approval) {
    throw ValidationError("approve: no enactment is awaiting approval");
  }
  std::lock_guard lock(command_mutex_);
  const std::uint64_t id = next_command_id_++;
  const CommandKind kind = command.kind;
  queue_.push_back({id, std::move(command)});
  return {id, kind};
}

void Runner::apply_commands() {
  while (next_scripted_ < scenario_.commands.size() && scenario_.commands[next_scripted_].tick <= current_tick_) {
    auto cmd = scenario_.commands[next_scripted_++].command;
    cmd.issued_at = current_tick_;
    std::lock_guard lock(command_mutex_);
    queue_.push_back({next_command_id_++, std::move(cmd)});
  }
  std::deque<QueuedCommand> pending;
  {
    std::lock_guard lock(command_mutex_);
    pending.swap(queue_);
  }
  for (const auto& q : pending) apply(q);
}

void Runner::apply(const QueuedCommand& queued) {
  const auto& cmd = queued.command;
  json ack{{"id", queued.id}, {"kind", std::string(to_string(cmd.kind))}, {"body", cmd.body},
           {"issued_at", cmd.issued_at}};
  const auto accept = [&](json result) {
    ack["accepted"] = true;
    ack["result"] = std::move(result);
    emit({EventKind::command, ack});
  };
  const auto refuse = [&](const std::string& why) {
    ack["accepted"] = false;
    ack["result"] = why;
    emit({EventKind::command, ack});
  };

  switch (cmd.kind) {
    case CommandKind::add_goal: {
      const double threshold = cmd.body["loss_threshold"].get<double>();
      knowledge_.goals.loss_threshold = threshold;
      engine_->config().loss_goal = threshold;
      accept(json{{"loss_threshold", threshold}});
      return;
    }
    case CommandKind::add_evolution_target: {
      accept("evolution requested");
      evo::EvolutionTrigger trigger;
      trigger.kind = evo::TriggerKind::stakeholder_goal;
      trigger.goal = odd::target_from_json(json{{"regions", cmd.body["regions"]}});
      trigger.tick = current_tick_;
      run_pipeline(trigger);
      return;
    }
    case CommandKind::approve: {
      if (!engine_->awaiting_approval()) {
        refuse("no enactment is awaiting approval");
        return;
      }
      accept("approved");
      const std::uint64_t before = knowledge_.odd.version();
      auto result = engine_->approve(state_, knowledge_.odd);
      emit_pipeline(std::move(result.events), before);
      record_outcome(result);
      return;
    }
    case CommandKind::feedback: {
      const auto verdict = cmd.body["verdict"].get<std::string>();
      if (verdict == "reject" && engine_->awaiting_approval()) {
        accept("pending enactment rejected");
        auto result = engine_->reject_pending("rejected by operator feedback");
        emit_all(std::move(result.events));
        record_outcome(result);
        return;
      }
      accept("feedback recorded");
      return;
    }
  }
}

void Runner::run_pipeline(const evo::EvolutionTrigger& trigger) {
  const std::uint64_t before = knowledge_.odd.version();
  auto result = engine_->handle(trigger, state_, knowledge_.odd);
  emit_pipeline(std::move(result.events), before);
  record_outcome(result);
}

void Runner::emit_pipeline(Events events, std::uint64_t version_before) {
  // Records up to the enactment carry the version they were produced under.
  std::uint64_t version = version_before;
  for (auto& e : events) {
    if (e.kind == EventKind::enactment) version = knowledge_.odd.version();
    log_->append(std::move(e), current_tick_, version);
  }
}

void Runner::record_outcome(const evo::PipelineResult& result) {
  if (result.outcome.retriable) knowledge_.trigger_latched = false;
  outcomes_.push_back(result.outcome);
}

void Runner::tick() {
  if (finished()) return;
  current_tick_ = state_.tick;
  apply_commands();

  const sim::Environment env = scenario_.trace.at(current_tick_);
  auto [next, telemetry] = sim::step(state_, env);
  state_ = std::move(next);
  emit({EventKind::telemetry, json{{"demand", telemetry.demand},
                                   {"interference", telemetry.interference},
                                   {"achieved", telemetry.achieved_throughput},
                                   {"loss", telemetry.packet_loss_fraction},
                                   {"config", telemetry.config_id},
                                   {"energy_mj", telemetry.energy_used_mj},
                                   {"lifetime_years", odd::interval_to_json(telemetry.lifetime_estimate_years)}}});
  telemetry_.push_back(telemetry);

  auto result = mape::mape_tick(knowledge_, telemetry, state_, scenario_.mape);
  emit_all(std::move(result.events));
  if (result.trigger) run_pipeline(*result.trigger);
  publish_snapshot();
}

void Runner::run() {
  while (!finished()) tick();
}

std::shared_ptr<const Snapshot> Runner::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return snapshot_;
}

void Runner::publish_snapshot() {
  auto s = std::make_shared<Snapshot>();
  s->tick = state_.tick;
  s->working_point = knowledge_.current_point;
  s->config_id = state_.config_id;
  s->safe_state = knowledge_.safe_state;
  s->awaiting_approval = engine_->awaiting_approval();
  s->finished = finished();
  s->loss_goal = knowledge_.goals.loss_threshold;
  if (!telemetry_.empty()) s->last_telemetry = telemetry_.back();
  s->odd = knowledge_.odd;
  s->last_seq = log_->last_seq();
  std::lock_guard lock(snapshot_mutex_);
  snapshot_ = std::move(s);
}

namespace {

void append_number(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

std::string Runner::telemetry_csv() const {
  std::string out = "tick,demand,interference,achieved,loss,config\n";
  for (const auto& t : telemetry_) {
    out += std::to_string(t.tick);
    out += ',';
    append_number(out, t.demand);
    out += ',';
    append_number(out, t.interference);
    out += ',';
    append_number(out, t.achieved_throughput);
    out += ',';
    append_number(out, t.packet_loss_fraction);
    out += ',';
    out += t.config_id;
    out += '\n';
  }
  return out;
}

}  // namespace oddevo::runner
