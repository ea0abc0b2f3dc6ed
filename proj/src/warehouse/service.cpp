#include "oddevo/warehouse/service.hpp"

#include <httplib.h>

#include <mutex>

#include "oddevo/errors.hpp"
#include "oddevo/odd/odd_json.hpp"

namespace oddevo::warehouse {

using nlohmann::json;

WarehouseService::WarehouseService(Catalogue catalogue, std::optional<std::string> persist_path)
    : catalogue_(std::move(catalogue)), persist_path_(std::move(persist_path)) {}

std::uint64_t WarehouseService::revision() const {
  std::shared_lock lock(mutex_);
  return catalogue_.revision();
}

Catalogue WarehouseService::snapshot() const {
  std::shared_lock lock(mutex_);
  return catalogue_;
}

json WarehouseService::handle(const std::string& endpoint, const json& request) {
  try {
    return dispatch(endpoint, request);
  } catch (const ValidationError& e) {
    return json{{"revision", revision()},
                {"error", {{"code", e.code()}, {"message", e.what()}, {"problems", e.problems()}}}};
  } catch (const Error& e) {
    return json{{"revision", revision()},
                {"error", {{"code", e.code()}, {"message", e.what()}, {"problems", json::array()}}}};
  } catch (const json::exception& e) {
    return json{{"revision", revision()},
                {"error", {{"code", "validation"},
                           {"message", std::string("malformed request: ") + e.what()},
                           {"problems", json::array()}}}};
  }
}

json WarehouseService::dispatch(const std::string& endpoint, const json& request) {
  if (!request.is_object()) throw ValidationError("request body must be a JSON object");

  if (endpoint == "publish") {
    CatalogueEntry entry = entry_from_json(request.at("entry"));
    std::unique_lock lock(mutex_);
    Catalogue next = catalogue_;
    next.publish(entry);
    if (persist_path_) save_catalogue(next, *persist_path_);
    catalogue_ = std::move(next);
    return json{{"revision", catalogue_.revision()},
                {"element_id", entry.element_id},
                {"version", entry.version}};
  }

  std::shared_lock lock(mutex_);
  if (endpoint == "list") {
    json entries = json::array();
    for (const auto& e : catalogue_.list()) entries.push_back(entry_to_json(e));
    return json{{"revision", catalogue_.revision()}, {"entries", std::move(entries)}};
  }
  if (endpoint == "query") {
    std::vector<Predicate> filter;
    for (const auto& p : request.value("filter", json::array())) filter.push_back(predicate_from_json(p));
    const auto result = query(catalogue_, filter);
    json entries = json::array();
    for (const auto& e : result.entries) entries.push_back(entry_to_json(e));
    return json{{"revision", catalogue_.revision()}, {"entries", std::move(entries)}, {"warnings", result.warnings}};
  }
  if (endpoint == "match") {
    const auto id = request.at("element_id").get<std::string>();
    const auto version = request.at("version").get<std::string>();
    const auto* entry = catalogue_.find(id, version);
    if (entry == nullptr) throw NotFoundError("element '" + id + "' version '" + version + "' not in catalogue");
    const auto target = odd::target_from_json(request.at("target"));
    const auto platform = request.value("platform", std::set<std::string>{});
    return json{{"revision", catalogue_.revision()}, {"result", match_to_json(match(*entry, target, platform))}};
  }
  if (endpoint == "fetch") {
    const auto f = fetch(catalogue_, request.at("element_id").get<std::string>(), request.at("version").get<std::string>());
    return json{{"revision", catalogue_.revision()},
                {"element",
                 {{"element_id", f.element_id},
                  {"version", f.version},
                  {"payload", f.payload},
                  {"payload_sha256", f.checksum},
                  {"usage_guide", usage_guide_to_json(f.usage_guide)},
                  {"data_sheet", data_sheet_to_json(f.data_sheet)}}}};
  }
  throw NotFoundError("unknown warehouse endpoint '" + endpoint + "'");
}

int http_status_for(const std::string& code) {
  if (code == "validation") return 400;
  if (code == "not_found") return 404;
  if (code == "conflict") return 409;
  if (code == "integrity") return 422;
  if (code == "unavailable") return 503;
  return 500;
}

void mount(httplib::Server& server, WarehouseService& service, const std::string& prefix) {
  for (const char* endpoint : {"list", "query", "match", "fetch", "publish"}) {
    server.Post(prefix + "/" + endpoint, [&service, ep = std::string(endpoint)](const httplib::Request& req,
                                                                                 httplib::Response& res) {
      json body;
      json response;
      try {
        body = req.body.empty() ? json::object() : json::parse(req.body);
        response = service.handle(ep, body);
      } catch (const json::parse_error& e) {
        response = json{{"revision", service.revision()},
                        {"error", {{"code", "validation"},
                                   {"message", std::string("body is not JSON: ") + e.what()},
                                   {"problems", json::array()}}}};
      }
      res.status = response.contains("error") ? http_status_for(response["error"]["code"].get<std::string>()) : 200;
      res.set_content(response.dump(), "application/json");
    });
  }
}

Transport in_process(WarehouseService& service) {
  return [&service](const std::string& endpoint, const json& request) { return service.handle(endpoint, request); };
}

Transport over_http(const std::string& host, int port, const std::string& prefix) {
  return [host, port, prefix](const std::string& endpoint, const json& request) {
    httplib::Client client(host, port);
    client.set_connection_timeout(2, 0);
    client.set_read_timeout(10, 0);
    auto res = client.Post(prefix + "/" + endpoint, request.dump(), "application/json");
    if (!res) {
      throw UnavailableError("warehouse at " + host + ":" + std::to_string(port) +
                             " unreachable: " + httplib::to_string(res.error()));
    }
    try {
      return json::parse(res->body);
    } catch (const json::parse_error& e) {
      throw UnavailableError(std::string("warehouse returned a non-JSON body: ") + e.what());
    }
  };
}

json WarehouseClient::call(const std::string& endpoint, const json& request) {
  json response = transport_(endpoint, request);
  last_revision_ = response.value("revision", last_revision_);
  if (response.contains("error")) {
    const auto& err = response["error"];
    const auto code = err.value("code", std::string("internal"));
    const auto message = err.value("message", std::string("warehouse error"));
    if (code == "validation") {
      auto problems = err.value("problems", std::vector<std::string>{});
      if (problems.empty()) problems.push_back(message);
      throw ValidationError(std::move(problems));
    }
    if (code == "conflict") throw ConflictError(message);
    if (code == "not_found") throw NotFoundError(message);
    if (code == "integrity") throw IntegrityError(message);
    if (code == "unavailable") throw UnavailableError(message);
    throw Error(code, message);
  }
  return response;
}

std::vector<CatalogueEntry> WarehouseClient::list() {
  std::vector<CatalogueEntry> out;
  const json response = call("list", json::object());
  for (const auto& e : response.at("entries")) out.push_back(entry_from_json(e));
  return out;
}

QueryResult WarehouseClient::query(const std::vector<Predicate>& filter) {
  json preds = json::array();
  for (const auto& p : filter) preds.push_back(predicate_to_json(p));
  const json response = call("query", json{{"filter", std::move(preds)}});
  QueryResult result;
  for (const auto& e : response.at("entries")) result.entries.push_back(entry_from_json(e));
  result.warnings = response.value("warnings", std::vector<std::string>{});
  return result;
}

MatchResult WarehouseClient::match(const std::string& element_id, const std::string& version,
                                   const odd::EvolutionTarget& target, const std::set<std::string>& platform) {
  const json response = call("match", json{{"element_id", element_id},
                                           {"version", version},
                                           {"target", odd::target_to_json(target)},
                                           {"platform", platform}});
  return match_from_json(response.at("result"));
}

FetchResult WarehouseClient::fetch(const std::string& element_id, const std::string& version) {
  const json e = call("fetch", json{{"element_id", element_id}, {"version", version}}).at("element");
  FetchResult f{e.at("element_id").get<std::string>(),
                e.at("version").get<std::string>(),
                e.at("payload").get<std::string>(),
                e.at("payload_sha256").get<std::string>(),
                usage_guide_from_json(e.at("usage_guide")),
                data_sheet_from_json(e.at("data_sheet"))};
  if (sha256_hex(f.payload) != f.checksum) {
    throw IntegrityError("payload received for '" + f.element_id + "' does not match its checksum");
  }
  return f;
}

std::uint64_t WarehouseClient::publish(const CatalogueEntry& entry) {
  return call("publish", json{{"entry", entry_to_json(entry)}}).at("revision").get<std::uint64_t>();
}

}  // namespace oddevo::warehouse
