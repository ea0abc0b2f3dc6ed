#pragma once

// Computing warehouse catalogue: auto-evolution-enabled elements described
// by a data sheet (capability ranges) and a usage guide (how to obtain,
// integrate and configure the element).
//
// Semantic matching is typed containment over a fixed capability vocabulary:
// throughput (packets/sec), interference (dB), frequency (MHz), modulation.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "oddevo/odd/interval.hpp"
#include "oddevo/odd/odd_model.hpp"
#include "oddevo/sim/iot_sim.hpp"

namespace oddevo::warehouse {

inline constexpr std::string_view kThroughput = "throughput";
inline constexpr std::string_view kInterference = "interference";
inline constexpr std::string_view kFrequency = "frequency";
inline constexpr std::string_view kModulation = "modulation";

struct NumericRange {
  Interval range;
  std::string unit;

  friend bool operator==(const NumericRange&, const NumericRange&) = default;
};

struct EnumSet {
  std::set<std::string> values;

  friend bool operator==(const EnumSet&, const EnumSet&) = default;
};

using Capability = std::variant<NumericRange, EnumSet>;

struct DataSheet {
  std::map<std::string, Capability> capabilities;

  const NumericRange* numeric(std::string_view name) const;
  const EnumSet* enumerated(std::string_view name) const;
  void validate() const;

  friend bool operator==(const DataSheet&, const DataSheet&) = default;
};

struct ParameterSpec {
  std::string type;  // "number" | "string" | "interval" | "enum"
  nlohmann::json default_value;
  std::optional<double> min;
  std::optional<double> max;
  std::vector<std::string> choices;  // enum only

  // Empty when `value` satisfies the spec, otherwise the reason.
  std::optional<std::string> check(const nlohmann::json& value) const;

  friend bool operator==(const ParameterSpec&, const ParameterSpec&) = default;
};

struct UsageGuide {
  std::set<std::string> platform_tags;
  std::string obtain;                  // payload reference
  std::vector<std::string> integrate;  // declarative integration steps
  std::map<std::string, ParameterSpec> configure;

  void validate() const;

  friend bool operator==(const UsageGuide&, const UsageGuide&) = default;
};

struct CatalogueEntry {
  std::string element_id;
  std::string version;
  DataSheet data_sheet;
  UsageGuide usage_guide;
  std::string payload;
  std::string checksum;  // sha256 hex of payload, recorded at publish time

  void validate() const;
  // The box [interference] x [throughput] claimed by the data sheet; empty
  // when either range is missing.
  std::vector<odd::Region> odd_contribution() const;

  friend bool operator==(const CatalogueEntry&, const CatalogueEntry&) = default;
};

struct Predicate {
  std::string capability;
  // covers: the sheet range must contain this interval.
  // includes: the sheet enumeration must contain every value.
  std::variant<Interval, std::set<std::string>> requirement;
};

struct QueryResult {
  std::vector<CatalogueEntry> entries;
  std::vector<std::string> warnings;
};

struct MatchResult {
  std::string element_id;
  std::string version;
  bool matched = false;
  std::map<std::string, double> margin;  // per-dimension slack around the target hull
  std::vector<std::pair<std::string, std::string>> failures;

  double total_margin() const;
};

struct FetchResult {
  std::string element_id;
  std::string version;
  std::string payload;
  std::string checksum;
  UsageGuide usage_guide;
  DataSheet data_sheet;
};

// Append-only catalogue. Revision counts successful publishes.
class Catalogue {
 public:
  Catalogue() = default;

  // ValidationError for invalid entries, ConflictError for a reused
  // id+version, IntegrityError when a supplied checksum does not match.
  void publish(CatalogueEntry entry);

  std::vector<CatalogueEntry> list() const;  // ordered by (element_id, version)
  std::size_t size() const { return entries_.size(); }
  std::uint64_t revision() const { return revision_; }
  const CatalogueEntry* find(std::string_view element_id, std::string_view version) const;

  // Used by file loading; keeps stored checksums untouched.
  static Catalogue from_entries(std::vector<CatalogueEntry> entries, std::uint64_t revision);

 private:
  std::map<std::pair<std::string, std::string>, CatalogueEntry> entries_;
  std::uint64_t revision_ = 0;
};

Catalogue publish(const Catalogue& catalogue, CatalogueEntry entry);

QueryResult query(const Catalogue& catalogue, const std::vector<Predicate>& filter);

MatchResult match(const CatalogueEntry& entry, const odd::EvolutionTarget& target,
                  const std::set<std::string>& platform);

// NotFoundError when absent; IntegrityError when the payload checksum no
// longer matches the catalogue record.
FetchResult fetch(const Catalogue& catalogue, std::string_view element_id, std::string_view version);

// Install-ready view of a fetched element. Configuration defaults come from
// the usage guide parameters `config_id`, `power_setting`, `lifetime_years`.
std::pair<sim::ElementPackage, sim::InstallSettings> to_package(const FetchResult& fetched);

std::string sha256_hex(std::string_view data);

// Structured-text encodings (see docs/FORMATS.md).
inline constexpr const char* kCatalogueSchema = "oddevo.catalogue/1";

nlohmann::json data_sheet_to_json(const DataSheet& sheet);
DataSheet data_sheet_from_json(const nlohmann::json& j);
nlohmann::json usage_guide_to_json(const UsageGuide& guide);
UsageGuide usage_guide_from_json(const nlohmann::json& j);
nlohmann::json entry_to_json(const CatalogueEntry& entry);
CatalogueEntry entry_from_json(const nlohmann::json& j);
nlohmann::json catalogue_to_json(const Catalogue& catalogue);
Catalogue catalogue_from_json(const nlohmann::json& j);
nlohmann::json match_to_json(const MatchResult& m);
MatchResult match_from_json(const nlohmann::json& j);
nlohmann::json predicate_to_json(const Predicate& p);
Predicate predicate_from_json(const nlohmann::json& j);

Catalogue load_catalogue(const std::string& path);
void save_catalogue(const Catalogue& catalogue, const std::string& path);

// The radio module from the running example plus a few distractors.
Catalogue canonical_catalogue();
CatalogueEntry radio_module_entry();

}  // namespace oddevo::warehouse
