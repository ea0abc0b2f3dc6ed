#pragma once

// Deterministic discrete-time simulator of a DeltaIoT-style multi-hop IoT
// network. One tick is one simulated minute.
//
// The capability model is derived from the ODD boxes: the maximum
// sustainable throughput of a configuration at interference c is the largest
// utility upper bound over its boxes whose context interval contains c.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "oddevo/odd/odd_model.hpp"

namespace oddevo::sim {

enum class PowerSetting { minimum, medium, maximum };

std::string_view to_string(PowerSetting p);
PowerSetting power_from_string(std::string_view s);

struct EnergyTable {
  double minimum_mj = 1.0;
  double medium_mj = 2.0;
  double maximum_mj = 4.0;

  double per_tick(PowerSetting p) const;
};

struct MoteSpec {
  std::string id;
  std::string parent;  // gateway id or another mote id
};

// Static description of the managed system, as read from a scenario file.
struct SimConfig {
  std::string gateway_id = "gateway";
  std::vector<MoteSpec> motes;
  std::uint64_t seed = 0;
  std::set<std::string> platform_tags;
  EnergyTable energy;
  double battery_capacity_mj = 50000.0;
  double loss_goal = 0.05;
  // Power setting each initial configuration drives the motes with.
  std::map<std::string, PowerSetting> power_of_config = {{"power-min", PowerSetting::minimum},
                                                         {"power-medium", PowerSetting::medium},
                                                         {"power-max", PowerSetting::maximum}};
  std::string initial_config = "power-min";

  // Throws ValidationError listing every offending field.
  void validate() const;
};

// Canonical 15-mote tree rooted at "gateway".
SimConfig canonical_sim_config(std::uint64_t seed = 42);

struct CapabilityEntry {
  std::vector<odd::Region> regions;
  PowerSetting power = PowerSetting::minimum;
  Interval lifetime_years;

  friend bool operator==(const CapabilityEntry&, const CapabilityEntry&) = default;
};

class CapabilityModel {
 public:
  CapabilityModel() = default;
  CapabilityModel(const odd::OddModel& odd, const std::map<std::string, PowerSetting>& power_of_config);

  bool has(std::string_view config_id) const;
  const CapabilityEntry& at(std::string_view config_id) const;  // NotFoundError
  void add(std::string config_id, CapabilityEntry entry);       // ConflictError
  std::vector<std::string> ids() const;

  // Maximum sustainable throughput at the given interference; 0 outside every box.
  double t_max(std::string_view config_id, double interference_db) const;

  friend bool operator==(const CapabilityModel&, const CapabilityModel&) = default;

 private:
  std::map<std::string, CapabilityEntry, std::less<>> entries_;
};

struct Mote {
  std::string id;
  double battery_mj = 0.0;
  PowerSetting power_setting = PowerSetting::minimum;
  std::string parent_link;
  std::vector<std::string> installed_elements;
  bool alive = true;

  friend bool operator==(const Mote&, const Mote&) = default;
};

struct Environment {
  double interference = 0.0;  // dB
  double demand = 0.0;        // packets/sec
};

struct Telemetry {
  std::int64_t tick = 0;
  double achieved_throughput = 0.0;
  double packet_loss_fraction = 0.0;
  double interference = 0.0;
  double demand = 0.0;
  double energy_used_mj = 0.0;
  Interval lifetime_estimate_years;
  std::string config_id;
};

struct NetworkState {
  std::vector<Mote> motes;
  std::string gateway_id;
  std::int64_t tick = 0;
  std::uint64_t rng_seed = 0;
  std::mt19937_64 rng;
  std::string config_id;
  CapabilityModel capabilities;
  std::set<std::string> platform_tags;
  EnergyTable energy;
  double battery_capacity_mj = 0.0;
  double loss_goal = 0.05;

  const Mote* find_mote(std::string_view id) const;
  std::size_t alive_count() const;
  double remaining_battery_fraction() const;

  // Same network, independent noise stream.
  NetworkState reseeded(std::uint64_t seed) const;
};

// A warehouse element prepared for installation: the capability ranges from
// its data sheet plus the platform tags from its usage guide.
struct ElementPackage {
  std::string element_id;
  std::string version;
  Interval throughput;    // packets/sec
  Interval interference;  // dB
  std::set<std::string> platform_tags;
};

struct InstallSettings {
  std::string config_id;  // empty: use element_id
  PowerSetting power = PowerSetting::maximum;
  Interval lifetime_years{1, 3};
  odd::Knowledge knowledge = odd::Knowledge::known_unknown;
  // Fault injection used by rollback tests.
  bool inject_failure = false;
};

// The ODD configuration an installed element claims: one box spanning the
// data-sheet interference and throughput ranges.
odd::ConfigurationOdd element_configuration(const ElementPackage& element, const InstallSettings& settings);

NetworkState init(const SimConfig& config, const odd::OddModel& odd);

// Advances one tick under the state's active configuration.
std::pair<NetworkState, Telemetry> step(const NetworkState& state, const Environment& env);

NetworkState set_configuration(const NetworkState& state, std::string_view config_id);

// EnactmentError on incompatible usage guide or injected failure; the input
// state is never modified.
NetworkState install_element(const NetworkState& state, const ElementPackage& element,
                             const InstallSettings& settings);

Interval lifetime_estimate(const NetworkState& state, std::string_view config_id);

// Loss fraction implied by achieved vs demanded throughput.
double packet_loss(double achieved, double demand);

}  // namespace oddevo::sim
