// oddevo: scenario runner, log verifier, guidance service and warehouse tool.
//
//   oddevo run --scenario S [--seed N] [--approval-gate] [--log F] [--telemetry F] [--warehouse-url URL]
//   oddevo verify --log F --expect E
//   oddevo replay --log F
//   oddevo serve --scenario S [--port P] [--realtime MS] [--running]
//   oddevo warehouse list|publish --catalogue C [--entry E]

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <thread>

#include <CLI11.hpp>

#include "oddevo/errors.hpp"
#include "oddevo/runner/guidance_service.hpp"
#include "oddevo/runner/runner.hpp"
#include "oddevo/runner/verify.hpp"
#include "oddevo/warehouse/catalogue.hpp"

namespace {

using namespace oddevo;
using nlohmann::json;

volatile std::sig_atomic_t g_stop = 0;

void handle_signal(int) { g_stop = 1; }

void print_error(const Error& e) {
  std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
}

// Accepts http://host:port[/prefix].
warehouse::Transport transport_for(const std::string& url) {
  static const std::regex re(R"(^http://([^:/]+):(\d+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw ValidationError("--warehouse-url: expected http://host:port[/prefix]");
  const std::string prefix = m[3].matched ? m[3].str() : "/warehouse";
  return warehouse::over_http(m[1].str(), std::stoi(m[2].str()), prefix);
}

int cmd_run(const std::string& scenario_path, std::optional<std::uint64_t> seed, bool gate,
            const std::string& log_path, const std::string& telemetry_path, const std::string& warehouse_url) {
  runner::RunnerOptions opts;
  opts.seed = seed;
  if (gate) opts.approval_gate = true;
  if (!log_path.empty()) opts.log_path = log_path;
  if (!warehouse_url.empty()) opts.warehouse = transport_for(warehouse_url);

  runner::Runner r(runner::load_scenario(scenario_path), opts);
  r.run();

  if (!telemetry_path.empty()) {
    std::ofstream out(telemetry_path, std::ios::binary);
    if (!out) throw NotFoundError("cannot write '" + telemetry_path + "'");
    out << r.telemetry_csv();
  }
  if (log_path.empty()) std::cout << r.log().to_text();

  const auto snap = r.snapshot();
  std::cerr << r.scenario().name << ": " << r.state().tick << " ticks, " << r.log().size() << " events, config "
            << snap->config_id << ", odd v" << snap->odd.version() << (snap->safe_state ? ", safe state" : "")
            << "\n";
  for (const auto& o : r.outcomes()) {
    std::cerr << "  evolution: " << evo::to_string(o.status) << (o.element_id ? " " + *o.element_id : "") << " ("
              << o.reason << ")\n";
  }
  return 0;
}

int cmd_verify(const std::string& log_path, const std::string& expect_path) {
  const auto report = runner::verify_files(log_path, expect_path);
  for (const auto& w : report.warnings) std::cout << "warning: " << w << "\n";
  for (const auto& f : report.failures) {
    std::cout << "FAIL";
    if (f.seq) std::cout << " at seq " << *f.seq;
    std::cout << ": " << f.message << "\n";
  }
  std::cout << (report.passed ? "PASS" : "FAIL") << "\n";
  return report.passed ? 0 : 1;
}

int cmd_replay(const std::string& log_path) {
  const auto s = runner::replay(runner::read_log(log_path));
  json j{{"odd_versions", s.odd_versions},
         {"decisions", s.decisions},
         {"final_config", s.final_config},
         {"enacted_elements", s.enacted_elements}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_serve(const std::string& scenario_path, std::optional<std::uint64_t> seed, bool gate,
              const std::string& log_path, int port, int realtime_ms, bool running) {
  runner::RunnerOptions opts;
  opts.seed = seed;
  if (gate) opts.approval_gate = true;
  if (!log_path.empty()) opts.log_path = log_path;
  runner::Runner r(runner::load_scenario(scenario_path), opts);

  runner::ServiceOptions sopts;
  sopts.ms_per_tick = realtime_ms;
  sopts.start_paused = !running;
  runner::GuidanceService service(r, sopts);
  const int bound = service.start("127.0.0.1", port);
  std::cout << "serving " << r.scenario().name << " on http://127.0.0.1:" << bound << "/api"
            << (running ? "" : " (paused)") << "\n"
            << std::flush;

  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  service.stop();
  return 0;
}

int cmd_warehouse_list(const std::string& catalogue_path) {
  const auto cat = warehouse::load_catalogue(catalogue_path);
  std::cout << "revision " << cat.revision() << "\n";
  for (const auto& e : cat.list()) std::cout << e.element_id << " " << e.version << " " << e.checksum << "\n";
  return 0;
}

int cmd_warehouse_publish(const std::string& catalogue_path, const std::string& entry_path) {
  warehouse::Catalogue cat;
  if (std::ifstream probe(catalogue_path); probe) cat = warehouse::load_catalogue(catalogue_path);
  std::ifstream in(entry_path);
  if (!in) throw NotFoundError("cannot open '" + entry_path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(entry_path + ": " + e.what());
  }
  cat.publish(warehouse::entry_from_json(j));
  warehouse::save_catalogue(cat, catalogue_path);
  std::cout << "published, revision " << cat.revision() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ODD-driven self-adaptation and evolution runner"};
  app.require_subcommand(1);

  std::string scenario, log_path, telemetry_path, warehouse_url, expect_path, catalogue_path, entry_path;
  std::optional<std::uint64_t> seed;
  bool gate = false, running = false;
  int port = 8080, realtime_ms = 0;

  auto* run = app.add_subcommand("run", "Run a scenario to completion");
  run->add_option("--scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_flag("--approval-gate", gate, "Hold enactments for operator approval");
  run->add_option("--log", log_path, "Event log output (default: stdout)");
  run->add_option("--telemetry", telemetry_path, "Telemetry CSV output");
  run->add_option("--warehouse-url", warehouse_url, "Remote warehouse, http://host:port[/prefix]");

  auto* verify = app.add_subcommand("verify", "Compare an event log with an expectation file");
  verify->add_option("--log", log_path, "Event log")->required();
  verify->add_option("--expect", expect_path, "Expectation file")->required();

  auto* replay = app.add_subcommand("replay", "Summarize ODD versions and decisions from a log");
  replay->add_option("--log", log_path, "Event log")->required();

  auto* serve = app.add_subcommand("serve", "Serve the guidance API over a scenario");
  serve->add_option("--scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  serve->add_option("--seed", seed, "Override the scenario seed");
  serve->add_flag("--approval-gate", gate, "Hold enactments for operator approval");
  serve->add_option("--log", log_path, "Event log output");
  serve->add_option("--port", port, "Listen port (0 picks one)")->check(CLI::Range(0, 65535));
  serve->add_option("--realtime", realtime_ms, "Milliseconds per tick while running")->check(CLI::NonNegativeNumber);
  serve->add_flag("--running", running, "Start ticking immediately instead of paused");

  auto* wh = app.add_subcommand("warehouse", "Catalogue maintenance");
  wh->require_subcommand(1);
  auto* wh_list = wh->add_subcommand("list", "List catalogue entries");
  wh_list->add_option("--catalogue", catalogue_path, "Catalogue file")->required()->check(CLI::ExistingFile);
  auto* wh_pub = wh->add_subcommand("publish", "Publish an entry into a catalogue file");
  wh_pub->add_option("--catalogue", catalogue_path, "Catalogue file (created if missing)")->required();
  wh_pub->add_option("--entry", entry_path, "Entry file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(scenario, seed, gate, log_path, telemetry_path, warehouse_url);
    if (*verify) return cmd_verify(log_path, expect_path);
    if (*replay) return cmd_replay(log_path);
    if (*serve) return cmd_serve(scenario, seed, gate, log_path, port, realtime_ms, running);
    if (*wh_list) return cmd_warehouse_list(catalogue_path);
    if (*wh_pub) return cmd_warehouse_publish(catalogue_path, entry_path);
  } catch (const Error& e) {
    print_error(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
