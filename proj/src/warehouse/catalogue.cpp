#include "oddevo/warehouse/catalogue.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "oddevo/errors.hpp"
#include "oddevo/odd/odd_json.hpp"

namespace oddevo::warehouse {

using nlohmann::json;

namespace {

const std::set<std::string, std::less<>> kVocabulary = {std::string(kThroughput), std::string(kInterference),
                                                        std::string(kFrequency), std::string(kModulation)};

std::string describe(const Interval& iv) {
  std::ostringstream os;
  os << "[" << iv.lo << ", " << iv.hi << "]";
  return os.str();
}

}  // namespace

const NumericRange* DataSheet::numeric(std::string_view name) const {
  auto it = capabilities.find(std::string(name));
  if (it == capabilities.end()) return nullptr;
  return std::get_if<NumericRange>(&it->second);
}

const EnumSet* DataSheet::enumerated(std::string_view name) const {
  auto it = capabilities.find(std::string(name));
  if (it == capabilities.end()) return nullptr;
  return std::get_if<EnumSet>(&it->second);
}

void DataSheet::validate() const {
  std::vector<std::string> problems;
  for (const auto& [name, cap] : capabilities) {
    if (const auto* r = std::get_if<NumericRange>(&cap)) {
      if (!r->range.well_formed()) problems.push_back("data_sheet." + name + ": range lo > hi");
      if (r->unit.empty()) problems.push_back("data_sheet." + name + ": unit missing");
    } else if (std::get<EnumSet>(cap).values.empty()) {
      problems.push_back("data_sheet." + name + ": empty enumeration");
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

std::optional<std::string> ParameterSpec::check(const json& value) const {
  if (type == "number") {
    if (!value.is_number()) return "expected a number";
    const double v = value.get<double>();
    if (min && v < *min) return "below minimum";
    if (max && v > *max) return "above maximum";
    return std::nullopt;
  }
  if (type == "string") {
    if (!value.is_string()) return "expected a string";
    return std::nullopt;
  }
  if (type == "enum") {
    if (!value.is_string()) return "expected a string";
    if (std::find(choices.begin(), choices.end(), value.get<std::string>()) == choices.end()) {
      return "not one of the allowed choices";
    }
    return std::nullopt;
  }
  if (type == "interval") {
    if (!value.is_array() || value.size() != 2 || !value[0].is_number() || !value[1].is_number()) {
      return "expected [lo, hi]";
    }
    const double lo = value[0].get<double>();
    const double hi = value[1].get<double>();
    if (lo > hi) return "interval lo > hi";
    if (min && lo < *min) return "below minimum";
    if (max && hi > *max) return "above maximum";
    return std::nullopt;
  }
  return "unknown parameter type '" + type + "'";
}

void UsageGuide::validate() const {
  std::vector<std::string> problems;
  if (platform_tags.empty()) problems.emplace_back("usage_guide.platform_tags: at least one tag is required");
  if (obtain.empty()) problems.emplace_back("usage_guide.obtain: payload reference missing");
  for (const auto& [name, spec] : configure) {
    if (auto why = spec.check(spec.default_value)) {
      problems.push_back("usage_guide.configure." + name + ": default " + *why);
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

void CatalogueEntry::validate() const {
  std::vector<std::string> problems;
  if (element_id.empty()) problems.emplace_back("element_id: empty");
  if (version.empty()) problems.emplace_back("version: empty");
  try {
    data_sheet.validate();
  } catch (const ValidationError& e) {
    problems.insert(problems.end(), e.problems().begin(), e.problems().end());
  }
  try {
    usage_guide.validate();
  } catch (const ValidationError& e) {
    problems.insert(problems.end(), e.problems().begin(), e.problems().end());
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

std::vector<odd::Region> CatalogueEntry::odd_contribution() const {
  const auto* tp = data_sheet.numeric(kThroughput);
  const auto* itf = data_sheet.numeric(kInterference);
  if (tp == nullptr || itf == nullptr) return {};
  return {odd::Region{itf->range, tp->range, odd::Knowledge::known_unknown}};
}

double MatchResult::total_margin() const {
  double total = 0.0;
  for (const auto& [_, m] : margin) total += m;
  return total;
}

void Catalogue::publish(CatalogueEntry entry) {
  entry.validate();
  const std::string digest = sha256_hex(entry.payload);
  if (!entry.checksum.empty() && entry.checksum != digest) {
    throw IntegrityError("supplied checksum does not match payload of '" + entry.element_id + "'");
  }
  entry.checksum = digest;
  auto key = std::make_pair(entry.element_id, entry.version);
  if (entries_.contains(key)) {
    throw ConflictError("element '" + entry.element_id + "' version '" + entry.version + "' already published");
  }
  entries_.emplace(std::move(key), std::move(entry));
  ++revision_;
}

std::vector<CatalogueEntry> Catalogue::list() const {
  std::vector<CatalogueEntry> out;
  out.reserve(entries_.size());
  for (const auto& [_, e] : entries_) out.push_back(e);
  return out;
}

const CatalogueEntry* Catalogue::find(std::string_view element_id, std::string_view version) const {
  auto it = entries_.find(std::make_pair(std::string(element_id), std::string(version)));
  return it == entries_.end() ? nullptr : &it->second;
}

Catalogue Catalogue::from_entries(std::vector<CatalogueEntry> entries, std::uint64_t revision) {
  Catalogue c;
  for (auto& e : entries) {
    e.validate();
    auto key = std::make_pair(e.element_id, e.version);
    if (c.entries_.contains(key)) {
      throw ConflictError("catalogue lists '" + e.element_id + "' version '" + e.version + "' twice");
    }
    c.entries_.emplace(std::move(key), std::move(e));
  }
  c.revision_ = std::max<std::uint64_t>(revision, c.entries_.size());
  return c;
}

Catalogue publish(const Catalogue& catalogue, CatalogueEntry entry) {
  Catalogue next = catalogue;
  next.publish(std::move(entry));
  return next;
}

namespace {

bool satisfies(const CatalogueEntry& e, const Predicate& p) {
  if (const auto* covers = std::get_if<Interval>(&p.requirement)) {
    const auto* r = e.data_sheet.numeric(p.capability);
    return r != nullptr && r->range.contains(*covers);
  }
  const auto& wanted = std::get<std::set<std::string>>(p.requirement);
  const auto* have = e.data_sheet.enumerated(p.capability);
  return have != nullptr && std::includes(have->values.begin(), have->values.end(), wanted.begin(), wanted.end());
}

}  // namespace

QueryResult query(const Catalogue& catalogue, const std::vector<Predicate>& filter) {
  QueryResult result;
  for (const auto& p : filter) {
    if (!kVocabulary.contains(p.capability)) {
      result.warnings.push_back("unknown capability '" + p.capability + "' in filter");
    }
  }
  if (!result.warnings.empty()) return result;
  for (auto& e : catalogue.list()) {
    if (std::all_of(filter.begin(), filter.end(), [&](const Predicate& p) { return satisfies(e, p); })) {
      result.entries.push_back(std::move(e));
    }
  }
  return result;
}

MatchResult match(const CatalogueEntry& entry, const odd::EvolutionTarget& target,
                  const std::set<std::string>& platform) {
  target.validate();
  MatchResult m;
  m.element_id = entry.element_id;
  m.version = entry.version;

  const auto check_dimension = [&](std::string_view name, auto region_interval) {
    const auto* sheet = entry.data_sheet.numeric(name);
    if (sheet == nullptr) {
      m.failures.emplace_back(std::string(name), "capability missing from data sheet");
      return;
    }
    bool ok = true;
    for (const auto& r : target.regions) {
      const Interval want = region_interval(r);
      if (!sheet->range.contains(want)) {
        m.failures.emplace_back(std::string(name),
                                "range " + describe(sheet->range) + " does not contain " + describe(want));
        ok = false;
      }
    }
    if (ok) {
      const Interval hull = region_interval(target.hull());
      m.margin[std::string(name)] = (hull.lo - sheet->range.lo) + (sheet->range.hi - hull.hi);
    }
  };
  check_dimension(kThroughput, [](const odd::Region& r) { return r.utility; });
  check_dimension(kInterference, [](const odd::Region& r) { return r.context; });

  const auto& offered = entry.usage_guide.platform_tags;
  const bool compatible = std::any_of(platform.begin(), platform.end(),
                                      [&](const std::string& tag) { return offered.contains(tag); });
  if (!compatible) m.failures.emplace_back("compatibility", "no platform tag in common with the usage guide");

  m.matched = m.failures.empty();
  return m;
}

FetchResult fetch(const Catalogue& catalogue, std::string_view element_id, std::string_view version) {
  const auto* e = catalogue.find(element_id, version);
  if (e == nullptr) {
    throw NotFoundError("element '" + std::string(element_id) + "' version '" + std::string(version) +
                        "' not in catalogue");
  }
  if (sha256_hex(e->payload) != e->checksum) {
    throw IntegrityError("payload checksum mismatch for '" + e->element_id + "' version '" + e->version + "'");
  }
  return FetchResult{e->element_id, e->version, e->payload, e->checksum, e->usage_guide, e->data_sheet};
}

std::pair<sim::ElementPackage, sim::InstallSettings> to_package(const FetchResult& fetched) {
  const auto* tp = fetched.data_sheet.numeric(kThroughput);
  const auto* itf = fetched.data_sheet.numeric(kInterference);
  if (tp == nullptr || itf == nullptr) {
    throw ValidationError("element '" + fetched.element_id + "' data sheet lacks throughput or interference");
  }
  sim::ElementPackage pkg{fetched.element_id, fetched.version, tp->range, itf->range,
                          fetched.usage_guide.platform_tags};
  sim::InstallSettings settings;
  const auto& cfg = fetched.usage_guide.configure;
  if (auto it = cfg.find("config_id"); it != cfg.end()) settings.config_id = it->second.default_value.get<std::string>();
  if (auto it = cfg.find("power_setting"); it != cfg.end()) {
    settings.power = sim::power_from_string(it->second.default_value.get<std::string>());
  }
  if (auto it = cfg.find("lifetime_years"); it != cfg.end()) {
    settings.lifetime_years = odd::interval_from_json(it->second.default_value);
  }
  return {std::move(pkg), std::move(settings)};
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw IntegrityError("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0x0f]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

json data_sheet_to_json(const DataSheet& sheet) {
  json j = json::object();
  for (const auto& [name, cap] : sheet.capabilities) {
    if (const auto* r = std::get_if<NumericRange>(&cap)) {
      j[name] = json{{"range", odd::interval_to_json(r->range)}, {"unit", r->unit}};
    } else {
      j[name] = json{{"values", std::get<EnumSet>(cap).values}};
    }
  }
  return j;
}

DataSheet data_sheet_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("data_sheet must be an object");
  DataSheet sheet;
  for (const auto& [name, v] : j.items()) {
    if (v.contains("range")) {
      sheet.capabilities[name] = NumericRange{odd::interval_from_json(v.at("range")), v.value("unit", std::string{})};
    } else if (v.contains("values")) {
      sheet.capabilities[name] = EnumSet{v.at("values").get<std::set<std::string>>()};
    } else {
      throw ValidationError("data_sheet." + name + ": needs 'range' or 'values'");
    }
  }
  sheet.validate();
  return sheet;
}

json usage_guide_to_json(const UsageGuide& guide) {
  json configure = json::object();
  for (const auto& [name, spec] : guide.configure) {
    json p{{"type", spec.type}, {"default", spec.default_value}};
    if (spec.min) p["min"] = *spec.min;
    if (spec.max) p["max"] = *spec.max;
    if (!spec.choices.empty()) p["choices"] = spec.choices;
    configure[name] = std::move(p);
  }
  return json{{"platform_tags", guide.platform_tags},
              {"obtain", guide.obtain},
              {"integrate", guide.integrate},
              {"configure", std::move(configure)}};
}

UsageGuide usage_guide_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("usage_guide must be an object");
  UsageGuide g;
  g.platform_tags = j.value("platform_tags", std::set<std::string>{});
  g.obtain = j.value("obtain", std::string{});
  g.integrate = j.value("integrate", std::vector<std::string>{});
  if (j.contains("configure")) {
    for (const auto& [name, p] : j.at("configure").items()) {
      ParameterSpec spec;
      spec.type = p.at("type").get<std::string>();
      spec.default_value = p.at("default");
      if (p.contains("min")) spec.min = p.at("min").get<double>();
      if (p.contains("max")) spec.max = p.at("max").get<double>();
      spec.choices = p.value("choices", std::vector<std::string>{});
      g.configure.emplace(name, std::move(spec));
    }
  }
  return g;
}

json entry_to_json(const CatalogueEntry& entry) {
  return json{{"element_id", entry.element_id},
              {"version", entry.version},
              {"data_sheet", data_sheet_to_json(entry.data_sheet)},
              {"usage_guide", usage_guide_to_json(entry.usage_guide)},
              {"payload", entry.payload},
              {"payload_sha256", entry.checksum}};
}

CatalogueEntry entry_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("catalogue entry must be an object");
  try {
    CatalogueEntry e;
    e.element_id = j.value("element_id", std::string{});
    e.version = j.value("version", std::string{});
    e.data_sheet = data_sheet_from_json(j.value("data_sheet", json::object()));
    e.usage_guide = usage_guide_from_json(j.value("usage_guide", json::object()));
    e.payload = j.value("payload", std::string{});
    e.checksum = j.value("payload_sha256", std::string{});
    return e;
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("catalogue entry has the wrong shape: ") + ex.what());
  }
}

json catalogue_to_json(const Catalogue& catalogue) {
  json entries = json::array();
  for (const auto& e : catalogue.list()) entries.push_back(entry_to_json(e));
  return json{{"schema", kCatalogueSchema}, {"revision", catalogue.revision()}, {"entries", std::move(entries)}};
}

Catalogue catalogue_from_json(const json& j) {
  if (!j.is_object() || j.value("schema", std::string{}) != kCatalogueSchema) {
    throw ValidationError(std::string("catalogue schema must be '") + kCatalogueSchema + "'");
  }
  std::vector<CatalogueEntry> entries;
  for (const auto& e : j.at("entries")) entries.push_back(entry_from_json(e));
  return Catalogue::from_entries(std::move(entries), j.value("revision", std::uint64_t{0}));
}

json match_to_json(const MatchResult& m) {
  json failures = json::array();
  for (const auto& [cap, why] : m.failures) failures.push_back(json{{"capability", cap}, {"reason", why}});
  return json{{"element_id", m.element_id},
              {"version", m.version},
              {"matched", m.matched},
              {"margin", m.margin},
              {"total_margin", m.total_margin()},
              {"failures", std::move(failures)}};
}

MatchResult match_from_json(const json& j) {
  MatchResult m;
  m.element_id = j.at("element_id").get<std::string>();
  m.version = j.at("version").get<std::string>();
  m.matched = j.at("matched").get<bool>();
  m.margin = j.at("margin").get<std::map<std::string, double>>();
  for (const auto& f : j.at("failures")) {
    m.failures.emplace_back(f.at("capability").get<std::string>(), f.at("reason").get<std::string>());
  }
  return m;
}

json predicate_to_json(const Predicate& p) {
  if (const auto* covers = std::get_if<Interval>(&p.requirement)) {
    return json{{"capability", p.capability}, {"covers", odd::interval_to_json(*covers)}};
  }
  return json{{"capability", p.capability}, {"includes", std::get<std::set<std::string>>(p.requirement)}};
}

Predicate predicate_from_json(const json& j) {
  if (!j.is_object() || !j.contains("capability")) throw ValidationError("predicate needs 'capability'");
  Predicate p;
  p.capability = j.at("capability").get<std::string>();
  if (j.contains("covers")) {
    p.requirement = odd::interval_from_json(j.at("covers"));
  } else if (j.contains("includes")) {
    p.requirement = j.at("includes").get<std::set<std::string>>();
  } else {
    throw ValidationError("predicate needs 'covers' or 'includes'");
  }
  return p;
}

Catalogue load_catalogue(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open catalogue file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("catalogue file '" + path + "' is not valid JSON: " + e.what());
  }
  return catalogue_from_json(j);
}

void save_catalogue(const Catalogue& catalogue, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("io", "cannot write catalogue file '" + path + "'");
  out << catalogue_to_json(catalogue).dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Canonical content

namespace {

UsageGuide mote_guide(const std::string& id, const std::string& version, const std::string& power,
                      Interval lifetime) {
  UsageGuide g;
  g.platform_tags = {"deltaiot-mote"};
  g.obtain = "warehouse://" + id + "/" + version;
  g.integrate = {"flash-driver", "register-configuration", "extend-adaptation-options"};
  g.configure["config_id"] = ParameterSpec{"string", id, std::nullopt, std::nullopt, {}};
  g.configure["power_setting"] = ParameterSpec{"enum", power, std::nullopt, std::nullopt, {"minimum", "medium", "maximum"}};
  g.configure["lifetime_years"] =
      ParameterSpec{"interval", json::array({lifetime.lo, lifetime.hi}), 0.0, std::nullopt, {}};
  return g;
}

CatalogueEntry make_entry(std::string id, std::string version, DataSheet sheet, UsageGuide guide) {
  CatalogueEntry e;
  e.payload = json{{"element", id}, {"version", version}, {"image", id + "-" + version + ".bin"}}.dump();
  e.element_id = std::move(id);
  e.version = std::move(version);
  e.data_sheet = std::move(sheet);
  e.usage_guide = std::move(guide);
  return e;
}

}  // namespace

CatalogueEntry radio_module_entry() {
  DataSheet sheet;
  sheet.capabilities[std::string(kFrequency)] = NumericRange{{415, 868}, "MHz"};
  sheet.capabilities[std::string(kModulation)] = EnumSet{{"FM"}};
  sheet.capabilities[std::string(kThroughput)] = NumericRange{{0, 50}, "packets/sec"};
  sheet.capabilities[std::string(kInterference)] = NumericRange{{-30, 0}, "dB"};
  auto guide = mote_guide("radio-module", "1.0.0", "maximum", {1, 3});
  guide.integrate = {"flash-radio-driver", "enable-frequency-switch-415-868", "extend-adaptation-options"};
  return make_entry("radio-module", "1.0.0", std::move(sheet), std::move(guide));
}

Catalogue canonical_catalogue() {
  Catalogue c;
  c.publish(radio_module_entry());

  DataSheet codec;
  codec.capabilities[std::string(kThroughput)] = NumericRange{{0, 25}, "packets/sec"};
  codec.capabilities[std::string(kInterference)] = NumericRange{{-40, 0}, "dB"};
  c.publish(make_entry("lowrate-codec", "1.2.0", std::move(codec), mote_guide("lowrate-codec", "1.2.0", "medium", {2, 4})));

  DataSheet lora;
  lora.capabilities[std::string(kFrequency)] = NumericRange{{863, 870}, "MHz"};
  lora.capabilities[std::string(kModulation)] = EnumSet{{"LoRa"}};
  lora.capabilities[std::string(kThroughput)] = NumericRange{{0, 12}, "packets/sec"};
  lora.capabilities[std::string(kInterference)] = NumericRange{{-55, 0}, "dB"};
  c.publish(make_entry("lora-longrange", "0.9.0", std::move(lora), mote_guide("lora-longrange", "0.9.0", "maximum", {2, 5})));

  DataSheet wifi;
  wifi.capabilities[std::string(kThroughput)] = NumericRange{{0, 70}, "packets/sec"};
  wifi.capabilities[std::string(kInterference)] = NumericRange{{-15, 0}, "dB"};
  auto wifi_guide = mote_guide("wifi-bridge", "2.0.0", "maximum", {1, 2});
  wifi_guide.platform_tags = {"linux-gateway"};
  c.publish(make_entry("wifi-bridge", "2.0.0", std::move(wifi), std::move(wifi_guide)));
  return c;
}

}  // namespace oddevo::warehouse
