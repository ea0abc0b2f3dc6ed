#pragma once

// HTTP guidance service over a Runner. See docs/API.md.
//
//   GET  /api/state                     snapshot (working point, config, safe state, ...)
//   GET  /api/odd                       ODD model with version
//   GET  /api/events?from=N&limit=L     records with seq >= N, plus "next"
//   POST /api/commands/goal             {"loss_threshold": x}
//   POST /api/commands/evolution-target {"regions": [[c_lo, c_hi, u_lo, u_hi], ...]}
//   POST /api/commands/approve          {}
//   POST /api/commands/feedback         {"verdict": "accept"|"reject", "target_seq": n}
//   POST /api/control/pause | resume | step {"ticks": n}
//
// One loop thread owns the runner's write side. Handlers only read published
// snapshots and the log, or enqueue commands, so they never wait on a tick.

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "oddevo/runner/runner.hpp"

namespace httplib {
class Server;
}

namespace oddevo::runner {

struct ServiceOptions {
  int ms_per_tick = 0;          // 0: tick as fast as possible while running
  bool start_paused = true;
  bool mount_warehouse = true;  // serve /warehouse/* when the runner hosts it
};

class GuidanceService {
 public:
  GuidanceService(Runner& runner, ServiceOptions options = {});
  ~GuidanceService();
  GuidanceService(const GuidanceService&) = delete;
  GuidanceService& operator=(const GuidanceService&) = delete;

  // Binds and starts serving plus the tick loop. Port 0 picks a free port.
  // Returns the bound port; throws UnavailableError when binding fails.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();

  bool paused() const { return paused_.load(); }
  void pause();
  void resume();
  void step(int ticks);

 private:
  void loop();
  void routes();

  Runner& runner_;
  ServiceOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread http_thread_;
  std::thread loop_thread_;

  std::atomic<bool> paused_{true};
  std::atomic<bool> stopping_{false};
  std::mutex loop_mutex_;
  std::condition_variable loop_cv_;
  int pending_steps_ = 0;  // guarded by loop_mutex_
};

}  // namespace oddevo::runner
