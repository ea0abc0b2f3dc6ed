#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <thread>

#include <httplib.h>

#include "oddevo/errors.hpp"
#include "oddevo/warehouse/catalogue.hpp"
#include "oddevo/warehouse/service.hpp"

using namespace oddevo;
using namespace oddevo::warehouse;
using nlohmann::json;

namespace {

odd::EvolutionTarget odd_e() { return odd::canonical_evolution_target(); }

const std::set<std::string> kMote{"deltaiot-mote"};

CatalogueEntry with_throughput(CatalogueEntry e, Interval range) {
  e.data_sheet.capabilities[std::string(kThroughput)] = NumericRange{range, "packets/sec"};
  return e;
}

std::vector<std::string> ids(const std::vector<CatalogueEntry>& entries) {
  std::vector<std::string> out;
  for (const auto& e : entries) out.push_back(e.element_id);
  return out;
}

}  // namespace

TEST(Publish, GrowsCatalogueAndRecordsChecksum) {
  Catalogue c;
  c.publish(radio_module_entry());
  EXPECT_EQ(c.size(), 1u);
  EXPECT_EQ(c.revision(), 1u);
  const auto* e = c.find("radio-module", "1.0.0");
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->checksum, sha256_hex(e->payload));
  EXPECT_EQ(e->checksum.size(), 64u);
}

TEST(Publish, FreeFunctionLeavesInputUntouched) {
  const Catalogue empty;
  const auto next = publish(empty, radio_module_entry());
  EXPECT_EQ(empty.size(), 0u);
  EXPECT_EQ(next.size(), 1u);
}

TEST(Publish, RejectsDuplicatesAndInvalidEntries) {
  Catalogue c;
  c.publish(radio_module_entry());
  EXPECT_THROW(c.publish(radio_module_entry()), ConflictError);

  auto no_tags = radio_module_entry();
  no_tags.version = "1.0.1";
  no_tags.usage_guide.platform_tags.clear();
  EXPECT_THROW(c.publish(no_tags), ValidationError);

  auto bad_sum = radio_module_entry();
  bad_sum.version = "1.0.2";
  bad_sum.checksum = std::string(64, '0');
  EXPECT_THROW(c.publish(bad_sum), IntegrityError);

  auto inverted = with_throughput(radio_module_entry(), {50, 0});
  inverted.version = "1.0.3";
  EXPECT_THROW(c.publish(inverted), ValidationError);
  EXPECT_EQ(c.revision(), 1u);
}

TEST(Sha256, KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Query, ThroughputCoverIncludesRadio) {
  const auto c = canonical_catalogue();
  const auto r = query(c, {{"throughput", Interval{20, 40}}});
  const auto found = ids(r.entries);
  EXPECT_NE(std::find(found.begin(), found.end(), "radio-module"), found.end());
  EXPECT_EQ(std::find(found.begin(), found.end(), "lowrate-codec"), found.end());
}

TEST(Query, EmptyFilterReturnsEverything) {
  const auto c = canonical_catalogue();
  EXPECT_EQ(query(c, {}).entries.size(), c.size());
}

TEST(Query, InterferenceCoverExcludesRadio) {
  const auto found = ids(query(canonical_catalogue(), {{"interference", Interval{-40, 0}}}).entries);
  EXPECT_EQ(std::find(found.begin(), found.end(), "radio-module"), found.end());
  EXPECT_NE(std::find(found.begin(), found.end(), "lowrate-codec"), found.end());
}

TEST(Query, EnumerationAndUnknownCapability) {
  const auto c = canonical_catalogue();
  EXPECT_EQ(ids(query(c, {{"modulation", std::set<std::string>{"FM"}}}).entries),
            std::vector<std::string>{"radio-module"});
  const auto r = query(c, {{"colour", Interval{0, 1}}});
  EXPECT_TRUE(r.entries.empty());
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Match, RadioModuleMatchesEvolutionTarget) {
  const auto m = match(radio_module_entry(), odd_e(), kMote);
  EXPECT_TRUE(m.matched);
  EXPECT_TRUE(m.failures.empty());
  // hull [-20,0]x[20,40] inside [-30,0]x[0,50]
  EXPECT_DOUBLE_EQ(m.margin.at("throughput"), 20 + 10);
  EXPECT_DOUBLE_EQ(m.margin.at("interference"), 10 + 0);
}

TEST(Match, NarrowThroughputFails) {
  const auto m = match(with_throughput(radio_module_entry(), {0, 15}), odd_e(), kMote);
  EXPECT_FALSE(m.matched);
  ASSERT_FALSE(m.failures.empty());
  EXPECT_EQ(m.failures.front().first, "throughput");
}

TEST(Match, DisjointPlatformFails) {
  const auto m = match(radio_module_entry(), odd_e(), {"linux-gateway"});
  EXPECT_FALSE(m.matched);
  bool compat = false;
  for (const auto& [cap, why] : m.failures) compat |= cap == "compatibility";
  EXPECT_TRUE(compat);
}

TEST(Match, MonotoneInSheetRanges) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> d(0, 80), c(-60, 0);
  for (int i = 0; i < 2000; ++i) {
    int u1 = d(rng), u2 = d(rng), c1 = c(rng), c2 = c(rng);
    const odd::EvolutionTarget t{{odd::box(std::min(c1, c2), std::max(c1, c2), std::min(u1, u2), std::max(u1, u2))},
                                 odd::TargetOrigin::stakeholder_goal, 0};
    int s1 = d(rng), s2 = d(rng);
    const Interval sheet{double(std::min(s1, s2)), double(std::max(s1, s2))};
    const Interval wider{sheet.lo - d(rng) / 4.0, sheet.hi + d(rng) / 4.0};
    const bool narrow = match(with_throughput(radio_module_entry(), sheet), t, kMote).matched;
    const bool wide = match(with_throughput(radio_module_entry(), wider), t, kMote).matched;
    ASSERT_TRUE(!narrow || wide);
  }
}

TEST(Match, TargetsInsideContributionAlwaysMatch) {
  const auto entry = radio_module_entry();
  const auto contribution = entry.odd_contribution();
  ASSERT_EQ(contribution.size(), 1u);
  EXPECT_EQ(contribution[0].context, (Interval{-30, 0}));
  EXPECT_EQ(contribution[0].utility, (Interval{0, 50}));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 50), cx(-30, 0);
  for (int i = 0; i < 500; ++i) {
    const double a = u(rng), b = u(rng), p = cx(rng), q = cx(rng);
    const odd::EvolutionTarget t{{odd::box(std::min(p, q), std::max(p, q), std::min(a, b), std::max(a, b))},
                                 odd::TargetOrigin::anomaly, 0};
    EXPECT_TRUE(match(entry, t, kMote).matched);
  }
}

TEST(Fetch, ReturnsPayloadWithChecksum) {
  const auto f = fetch(canonical_catalogue(), "radio-module", "1.0.0");
  EXPECT_EQ(sha256_hex(f.payload), f.checksum);
  EXPECT_EQ(f.usage_guide.platform_tags, kMote);
}

TEST(Fetch, NotFoundAndIntegrity) {
  const auto c = canonical_catalogue();
  EXPECT_THROW(fetch(c, "nope", "1.0.0"), NotFoundError);
  EXPECT_THROW(fetch(c, "radio-module", "9.9.9"), NotFoundError);
  auto tampered = radio_module_entry();
  tampered.checksum = sha256_hex(tampered.payload);
  tampered.payload += " ";
  const auto bad = Catalogue::from_entries({tampered}, 1);
  EXPECT_THROW(fetch(bad, "radio-module", "1.0.0"), IntegrityError);
}

TEST(ToPackage, UsageGuideDefaults) {
  const auto [pkg, settings] = to_package(fetch(canonical_catalogue(), "radio-module", "1.0.0"));
  EXPECT_EQ(pkg.throughput, (Interval{0, 50}));
  EXPECT_EQ(pkg.interference, (Interval{-30, 0}));
  EXPECT_EQ(settings.config_id, "radio-module");
  EXPECT_EQ(settings.power, sim::PowerSetting::maximum);
  EXPECT_EQ(settings.lifetime_years, (Interval{1, 3}));
}

TEST(CatalogueJson, RoundTripAndDataFileInSync) {
  const auto c = canonical_catalogue();
  const auto back = catalogue_from_json(catalogue_to_json(c));
  EXPECT_EQ(back.list(), c.list());
  EXPECT_EQ(back.revision(), c.revision());
  const auto file = load_catalogue(std::string(ODDEVO_DATA_DIR) + "/catalogue/canonical.json");
  EXPECT_EQ(file.list(), c.list());
}

TEST(CatalogueJson, SaveLoad) {
  const auto path = (std::filesystem::temp_directory_path() / "oddevo_catalogue_test.json").string();
  save_catalogue(canonical_catalogue(), path);
  EXPECT_EQ(load_catalogue(path).list(), canonical_catalogue().list());
  std::filesystem::remove(path);
  EXPECT_THROW(load_catalogue(path), NotFoundError);
}

TEST(Service, EveryResponseCarriesRevision) {
  WarehouseService svc(canonical_catalogue());
  for (const char* ep : {"list", "query", "match", "fetch", "publish", "bogus"}) {
    const auto r = svc.handle(ep, json::object());
    EXPECT_EQ(r.at("revision"), 4) << ep;
  }
}

TEST(Service, ErrorBodies) {
  WarehouseService svc(canonical_catalogue());
  auto r = svc.handle("fetch", json{{"element_id", "nope"}, {"version", "1"}});
  EXPECT_EQ(r["error"]["code"], "not_found");
  r = svc.handle("publish", json{{"entry", entry_to_json(radio_module_entry())}});
  EXPECT_EQ(r["error"]["code"], "conflict");
  r = svc.handle("query", json{{"filter", json::array({json{{"capability", "throughput"}}})}});
  EXPECT_EQ(r["error"]["code"], "validation");
  EXPECT_TRUE(r["error"]["problems"].is_array());
  r = svc.handle("list", json::array());
  EXPECT_EQ(r["error"]["code"], "validation");
}

TEST(Service, ClientOverInProcessTransport) {
  WarehouseService svc(Catalogue{});
  WarehouseClient client(in_process(svc));
  EXPECT_TRUE(client.list().empty());
  EXPECT_EQ(client.publish(radio_module_entry()), 1u);
  EXPECT_THROW(client.publish(radio_module_entry()), ConflictError);
  EXPECT_EQ(client.list().size(), 1u);
  EXPECT_TRUE(client.match("radio-module", "1.0.0", odd_e(), kMote).matched);
  EXPECT_THROW(client.match("nope", "1.0.0", odd_e(), kMote), NotFoundError);
  const auto f = client.fetch("radio-module", "1.0.0");
  EXPECT_EQ(sha256_hex(f.payload), f.checksum);
  EXPECT_EQ(client.query({{"throughput", Interval{20, 40}}}).entries.size(), 1u);
  EXPECT_EQ(client.last_revision(), 1u);
}

TEST(Service, ClientDetectsPayloadTamperingInTransit) {
  WarehouseService svc(canonical_catalogue());
  Transport corrupt = [&svc](const std::string& ep, const json& req) {
    auto r = svc.handle(ep, req);
    if (ep == "fetch" && r.contains("element")) r["element"]["payload"] = "evil";
    return r;
  };
  WarehouseClient client(corrupt);
  EXPECT_THROW(client.fetch("radio-module", "1.0.0"), IntegrityError);
}

TEST(Service, PersistsPublishes) {
  const auto path = (std::filesystem::temp_directory_path() / "oddevo_persist_test.json").string();
  {
    WarehouseService svc(Catalogue{}, path);
    WarehouseClient(in_process(svc)).publish(radio_module_entry());
  }
  EXPECT_EQ(load_catalogue(path).size(), 1u);
  std::filesystem::remove(path);
}

TEST(Http, StatusMapping) {
  EXPECT_EQ(http_status_for("validation"), 400);
  EXPECT_EQ(http_status_for("not_found"), 404);
  EXPECT_EQ(http_status_for("conflict"), 409);
  EXPECT_EQ(http_status_for("integrity"), 422);
  EXPECT_EQ(http_status_for("unavailable"), 503);
}

TEST(Http, RemoteWarehouseIsDropIn) {
  WarehouseService svc(canonical_catalogue());
  httplib::Server server;
  mount(server, svc);
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  WarehouseClient remote(over_http("127.0.0.1", port));
  WarehouseClient local(in_process(svc));
  EXPECT_EQ(remote.list(), local.list());
  EXPECT_EQ(remote.match("radio-module", "1.0.0", odd_e(), kMote).total_margin(),
            local.match("radio-module", "1.0.0", odd_e(), kMote).total_margin());
  EXPECT_THROW(remote.fetch("nope", "1"), NotFoundError);

  httplib::Client raw("127.0.0.1", port);
  auto res = raw.Post("/warehouse/fetch", R"({"element_id":"nope","version":"1"})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
  res = raw.Post("/warehouse/list", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  res = raw.Post("/warehouse/publish", json{{"entry", entry_to_json(radio_module_entry())}}.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 409);

  server.stop();
  t.join();
  EXPECT_THROW(remote.list(), UnavailableError);
}
