#pragma once

// Request/response interface to a warehouse.
//
// Endpoints: list, query, match, fetch, publish. Request and response bodies
// are JSON objects mirroring the catalogue file schema; every response
// carries the catalogue `revision`. Failures are returned as
// {"revision": n, "error": {"code": ..., "message": ..., "problems": [...]}}.
// See docs/API.md for the exact shapes.

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "oddevo/warehouse/catalogue.hpp"

namespace httplib {
class Server;
}

namespace oddevo::warehouse {

// Thread-safe catalogue host. Reads run concurrently; publishes serialize.
class WarehouseService {
 public:
  explicit WarehouseService(Catalogue catalogue, std::optional<std::string> persist_path = std::nullopt);

  // Dispatches one request. Never throws; errors are encoded in the body.
  nlohmann::json handle(const std::string& endpoint, const nlohmann::json& request);

  std::uint64_t revision() const;
  Catalogue snapshot() const;

 private:
  nlohmann::json dispatch(const std::string& endpoint, const nlohmann::json& request);

  mutable std::shared_mutex mutex_;
  Catalogue catalogue_;
  std::optional<std::string> persist_path_;
};

// HTTP status for an error code carried in a response body.
int http_status_for(const std::string& code);

// Mounts POST <prefix>/<endpoint> handlers on an httplib server.
void mount(httplib::Server& server, WarehouseService& service, const std::string& prefix = "/warehouse");

using Transport = std::function<nlohmann::json(const std::string& endpoint, const nlohmann::json& request)>;

Transport in_process(WarehouseService& service);
// UnavailableError when the remote warehouse cannot be reached.
Transport over_http(const std::string& host, int port, const std::string& prefix = "/warehouse");

// Typed client over any transport. Error bodies are rethrown as the matching
// oddevo::Error subclass.
class WarehouseClient {
 public:
  explicit WarehouseClient(Transport transport) : transport_(std::move(transport)) {}

  std::vector<CatalogueEntry> list();
  QueryResult query(const std::vector<Predicate>& filter);
  MatchResult match(const std::string& element_id, const std::string& version, const odd::EvolutionTarget& target,
                    const std::set<std::string>& platform);
  FetchResult fetch(const std::string& element_id, const std::string& version);
  std::uint64_t publish(const CatalogueEntry& entry);  // returns new revision

  std::uint64_t last_revision() const { return last_revision_; }

 private:
  nlohmann::json call(const std::string& endpoint, const nlohmann::json& request);

  Transport transport_;
  std::uint64_t last_revision_ = 0;
};

}  // namespace oddevo::warehouse
