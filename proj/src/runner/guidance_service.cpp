#include "oddevo/runner/guidance_service.hpp"

#include <chrono>

#include <httplib.h>

#include "oddevo/errors.hpp"
#include "oddevo/odd/odd_json.hpp"

namespace oddevo::runner {

using nlohmann::json;

namespace {

constexpr std::size_t kDefaultEventLimit = 500;
constexpr std::size_t kMaxEventLimit = 10000;

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, const Error& e) {
  json problems = json::array();
  if (const auto* v = dynamic_cast<const ValidationError*>(&e)) problems = v->problems();
  reply(res, warehouse::http_status_for(e.code()),
        json{{"error", {{"code", e.code()}, {"message", e.what()}, {"problems", problems}}}});
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("body: not valid JSON (") + e.what() + ")");
  }
}

std::size_t query_number(const httplib::Request& req, const std::string& key, std::size_t fallback) {
  if (!req.has_param(key)) return fallback;
  const std::string raw = req.get_param_value(key);
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(raw, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != raw.size() || raw.empty() || raw[0] == '-') throw ValidationError(key + ": non-negative integer required");
  return static_cast<std::size_t>(v);
}

}  // namespace

GuidanceService::GuidanceService(Runner& runner, ServiceOptions options)
    : runner_(runner), options_(options), server_(std::make_unique<httplib::Server>()) {
  paused_ = options_.start_paused;
  routes();
}

GuidanceService::~GuidanceService() { stop(); }

void GuidanceService::routes() {
  auto& s = *server_;

  s.Get("/api/state", [this](const httplib::Request&, httplib::Response& res) {
    json j = snapshot_to_json(*runner_.snapshot());
    j["paused"] = paused_.load();
    reply(res, 200, j);
  });

  s.Get("/api/odd", [this](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, odd::model_to_json(runner_.snapshot()->odd));
  });

  s.Get("/api/events", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      const std::size_t from = query_number(req, "from", 1);
      const std::size_t limit = std::min(query_number(req, "limit", kDefaultEventLimit), kMaxEventLimit);
      const auto records = runner_.log().since(from, limit);
      json events = json::array();
      for (const auto& r : records) events.push_back(record_to_json(r));
      const std::uint64_t next = records.empty() ? std::max<std::uint64_t>(from, 1) : records.back().seq + 1;
      reply(res, 200, json{{"events", events}, {"next", next}});
    } catch (const Error& e) {
      reply_error(res, e);
    }
  });

  const auto command = [this](CommandKind kind) {
    return [this, kind](const httplib::Request& req, httplib::Response& res) {
      try {
        GuidanceCommand cmd;
        cmd.kind = kind;
        cmd.body = parse_body(req);
        cmd.issued_at = runner_.snapshot()->tick;
        const auto ack = runner_.submit(std::move(cmd));
        reply(res, 202, json{{"command_id", ack.id}, {"kind", std::string(to_string(ack.kind))}});
      } catch (const Error& e) {
        reply_error(res, e);
      }
    };
  };
  s.Post("/api/commands/goal", command(CommandKind::add_goal));
  s.Post("/api/commands/evolution-target", command(CommandKind::add_evolution_target));
  s.Post("/api/commands/approve", command(CommandKind::approve));
  s.Post("/api/commands/feedback", command(CommandKind::feedback));

  s.Post("/api/control/pause", [this](const httplib::Request&, httplib::Response& res) {
    pause();
    reply(res, 200, json{{"paused", true}});
  });
  s.Post("/api/control/resume", [this](const httplib::Request&, httplib::Response& res) {
    resume();
    reply(res, 200, json{{"paused", false}});
  });
  s.Post("/api/control/step", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      const json body = parse_body(req);
      const json ticks = body.value("ticks", json(1));
      if (!ticks.is_number_integer() || ticks.get<int>() < 1) throw ValidationError("ticks: positive integer required");
      step(ticks.get<int>());
      reply(res, 202, json{{"ticks", ticks}});
    } catch (const Error& e) {
      reply_error(res, e);
    }
  });

  if (options_.mount_warehouse && runner_.warehouse_service()) {
    warehouse::mount(s, *runner_.warehouse_service());
  }
}

int GuidanceService::start(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw UnavailableError("cannot bind " + host + ":" + std::to_string(port));
  http_thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  loop_thread_ = std::thread([this] { loop(); });
  return bound;
}

void GuidanceService::stop() {
  if (stopping_.exchange(true)) return;
  loop_cv_.notify_all();
  server_->stop();
  if (http_thread_.joinable()) http_thread_.join();
  if (loop_thread_.joinable()) loop_thread_.join();
}

void GuidanceService::pause() { paused_ = true; }

void GuidanceService::resume() {
  paused_ = false;
  loop_cv_.notify_all();
}

void GuidanceService::step(int ticks) {
  {
    std::lock_guard lock(loop_mutex_);
    pending_steps_ += ticks;
  }
  loop_cv_.notify_all();
}

void GuidanceService::loop() {
  using clock = std::chrono::steady_clock;
  while (!stopping_) {
    {
      std::unique_lock lock(loop_mutex_);
      loop_cv_.wait_for(lock, std::chrono::milliseconds(50), [this] {
        return stopping_ || ((!paused_ || pending_steps_ > 0) && !runner_.finished());
      });
      if (stopping_) return;
      if (runner_.finished() || (paused_ && pending_steps_ == 0)) continue;
      if (pending_steps_ > 0) --pending_steps_;
    }
    const auto started = clock::now();
    runner_.tick();
    if (options_.ms_per_tick > 0) {
      std::unique_lock lock(loop_mutex_);
      loop_cv_.wait_until(lock, started + std::chrono::milliseconds(options_.ms_per_tick),
                          [this] { return stopping_.load(); });
    }
  }
}

}  // namespace oddevo::runner
