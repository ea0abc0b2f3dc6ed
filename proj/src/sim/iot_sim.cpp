#include "oddevo/sim/iot_sim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "oddevo/errors.hpp"

namespace oddevo::sim {

std::string_view to_string(PowerSetting p) {
  switch (p) {
    case PowerSetting::minimum: return "minimum";
    case PowerSetting::medium: return "medium";
    case PowerSetting::maximum: return "maximum";
  }
  return "minimum";
}

PowerSetting power_from_string(std::string_view s) {
  if (s == "minimum") return PowerSetting::minimum;
  if (s == "medium") return PowerSetting::medium;
  if (s == "maximum") return PowerSetting::maximum;
  throw ValidationError("unknown power setting '" + std::string(s) + "'");
}

double EnergyTable::per_tick(PowerSetting p) const {
  switch (p) {
    case PowerSetting::minimum: return minimum_mj;
    case PowerSetting::medium: return medium_mj;
    case PowerSetting::maximum: return maximum_mj;
  }
  return maximum_mj;
}

void SimConfig::validate() const {
  std::vector<std::string> problems;
  if (gateway_id.empty()) problems.emplace_back("gateway_id: empty");
  if (motes.empty()) problems.emplace_back("motes: at least one mote is required");

  std::map<std::string, std::string> parent_of;
  for (const auto& m : motes) {
    if (m.id.empty()) {
      problems.emplace_back("motes: mote with empty id");
      continue;
    }
    if (m.id == gateway_id) problems.push_back("motes." + m.id + ": id collides with the gateway");
    if (!parent_of.emplace(m.id, m.parent).second) problems.push_back("motes." + m.id + ": duplicated id");
  }
  for (const auto& [id, parent] : parent_of) {
    if (parent != gateway_id && !parent_of.contains(parent)) {
      problems.push_back("motes." + id + ".parent: unknown parent '" + parent + "'");
      continue;
    }
    // Walk toward the gateway; revisiting a mote means a cycle.
    std::set<std::string> seen{id};
    std::string cur = parent;
    while (cur != gateway_id) {
      if (!seen.insert(cur).second) {
        problems.push_back("motes." + id + ".parent: cycle, no path to the gateway");
        break;
      }
      auto it = parent_of.find(cur);
      if (it == parent_of.end()) break;
      cur = it->second;
    }
  }
  if (platform_tags.empty()) problems.emplace_back("platform_tags: at least one tag is required");
  if (!(energy.minimum_mj > 0 && energy.minimum_mj < energy.medium_mj && energy.medium_mj < energy.maximum_mj)) {
    problems.emplace_back("energy: require 0 < minimum < medium < maximum");
  }
  if (!(battery_capacity_mj > 0)) problems.emplace_back("battery_capacity_mj: must be positive");
  if (!(loss_goal > 0 && loss_goal < 1)) problems.emplace_back("loss_goal: must lie in (0, 1)");
  if (initial_config.empty()) problems.emplace_back("initial_config: empty");
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

SimConfig canonical_sim_config(std::uint64_t seed) {
  SimConfig cfg;
  cfg.seed = seed;
  cfg.platform_tags = {"deltaiot-mote"};
  // Three branches of depth five, mirroring a small multi-hop deployment.
  for (int branch = 0; branch < 3; ++branch) {
    std::string parent = cfg.gateway_id;
    for (int depth = 0; depth < 5; ++depth) {
      std::string id = "mote-" + std::to_string(branch * 5 + depth + 1);
      cfg.motes.push_back({id, parent});
      parent = id;
    }
  }
  return cfg;
}

CapabilityModel::CapabilityModel(const odd::OddModel& odd,
                                 const std::map<std::string, PowerSetting>& power_of_config) {
  for (const auto& c : odd.configurations()) {
    auto it = power_of_config.find(c.id);
    if (it == power_of_config.end()) {
      throw ValidationError("no power setting declared for configuration '" + c.id + "'");
    }
    entries_.emplace(c.id, CapabilityEntry{c.regions, it->second, c.lifetime_years});
  }
}

bool CapabilityModel::has(std::string_view config_id) const { return entries_.find(config_id) != entries_.end(); }

const CapabilityEntry& CapabilityModel::at(std::string_view config_id) const {
  auto it = entries_.find(config_id);
  if (it == entries_.end()) throw NotFoundError("unknown configuration '" + std::string(config_id) + "'");
  return it->second;
}

void CapabilityModel::add(std::string config_id, CapabilityEntry entry) {
  if (has(config_id)) throw ConflictError("configuration '" + config_id + "' already installed");
  entries_.emplace(std::move(config_id), std::move(entry));
}

std::vector<std::string> CapabilityModel::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : entries_) out.push_back(id);
  return out;
}

double CapabilityModel::t_max(std::string_view config_id, double interference_db) const {
  double best = 0.0;
  for (const auto& r : at(config_id).regions) {
    if (r.context.contains(interference_db)) best = std::max(best, r.utility.hi);
  }
  return best;
}

const Mote* NetworkState::find_mote(std::string_view id) const {
  auto it = std::find_if(motes.begin(), motes.end(), [&](const Mote& m) { return m.id == id; });
  return it == motes.end() ? nullptr : &*it;
}

std::size_t NetworkState::alive_count() const {
  return static_cast<std::size_t>(std::count_if(motes.begin(), motes.end(), [](const Mote& m) { return m.alive; }));
}

double NetworkState::remaining_battery_fraction() const {
  if (motes.empty() || battery_capacity_mj <= 0) return 0.0;
  double total = 0.0;
  for (const auto& m : motes) total += m.battery_mj;
  return total / (battery_capacity_mj * static_cast<double>(motes.size()));
}

NetworkState NetworkState::reseeded(std::uint64_t seed) const {
  NetworkState copy = *this;
  copy.rng_seed = seed;
  copy.rng.seed(seed);
  return copy;
}

odd::ConfigurationOdd element_configuration(const ElementPackage& element, const InstallSettings& settings) {
  odd::ConfigurationOdd c;
  c.id = settings.config_id.empty() ? element.element_id : settings.config_id;
  c.regions = {odd::Region{element.interference, element.throughput, settings.knowledge}};
  c.lifetime_years = settings.lifetime_years;
  return c;
}

NetworkState init(const SimConfig& config, const odd::OddModel& odd) {
  config.validate();
  NetworkState s;
  s.gateway_id = config.gateway_id;
  s.rng_seed = config.seed;
  s.rng.seed(config.seed);
  s.capabilities = CapabilityModel(odd, config.power_of_config);
  if (!s.capabilities.has(config.initial_config)) {
    throw ValidationError("initial_config: unknown configuration '" + config.initial_config + "'");
  }
  s.config_id = config.initial_config;
  s.platform_tags = config.platform_tags;
  s.energy = config.energy;
  s.battery_capacity_mj = config.battery_capacity_mj;
  s.loss_goal = config.loss_goal;
  const PowerSetting power = s.capabilities.at(s.config_id).power;
  for (const auto& m : config.motes) {
    s.motes.push_back(Mote{m.id, config.battery_capacity_mj, power, m.parent, {}, true});
  }
  return s;
}

double packet_loss(double achieved, double demand) {
  if (!(demand > 0)) return 0.0;
  return std::max(0.0, 1.0 - achieved / demand);
}

namespace {

// Uniform in [0, 1) from the top 53 bits; identical on every platform.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

constexpr double kNoiseAmplitude = 0.25;  // packets/sec

}  // namespace

std::pair<NetworkState, Telemetry> step(const NetworkState& state, const Environment& env) {
  if (env.demand < 0 || env.interference > 0) {
    throw ValidationError("environment requires demand >= 0 and interference <= 0");
  }
  NetworkState next = state;
  const CapabilityEntry& cap = next.capabilities.at(next.config_id);
  const double per_mote = next.energy.per_tick(cap.power);

  double energy_used = 0.0;
  for (auto& m : next.motes) {
    if (!m.alive) continue;
    const double spent = std::min(per_mote, m.battery_mj);
    m.battery_mj -= spent;
    energy_used += spent;
    if (m.battery_mj <= 0.0) {
      m.battery_mj = 0.0;
      m.alive = false;
    }
  }

  const double alive_share =
      next.motes.empty() ? 0.0 : static_cast<double>(next.alive_count()) / static_cast<double>(next.motes.size());
  const double capacity = next.capabilities.t_max(next.config_id, env.interference);
  // Noise never exceeds loss_goal * demand so that in-ODD demand stays within
  // the loss goal even for small demands.
  const double amplitude = std::min(kNoiseAmplitude, next.loss_goal * env.demand);
  const double noise = -amplitude * unit_uniform(next.rng);
  const double achieved = std::max(0.0, std::min(env.demand, capacity) * alive_share + noise);

  Telemetry t;
  t.tick = next.tick;
  t.achieved_throughput = achieved;
  t.packet_loss_fraction = packet_loss(achieved, env.demand);
  t.interference = env.interference;
  t.demand = env.demand;
  t.energy_used_mj = energy_used;
  t.config_id = next.config_id;
  t.lifetime_estimate_years = lifetime_estimate(next, next.config_id);
  ++next.tick;
  return {std::move(next), std::move(t)};
}

NetworkState set_configuration(const NetworkState& state, std::string_view config_id) {
  const CapabilityEntry& cap = state.capabilities.at(config_id);
  NetworkState next = state;
  next.config_id = std::string(config_id);
  for (auto& m : next.motes) m.power_setting = cap.power;
  return next;
}

NetworkState install_element(const NetworkState& state, const ElementPackage& element,
                             const InstallSettings& settings) {
  const bool compatible = std::any_of(element.platform_tags.begin(), element.platform_tags.end(),
                                      [&](const std::string& tag) { return state.platform_tags.contains(tag); });
  if (!compatible) {
    throw EnactmentError("element '" + element.element_id + "' usage guide is incompatible with the platform");
  }
  if (settings.inject_failure) {
    throw EnactmentError("injected installation failure for '" + element.element_id + "'");
  }
  const odd::ConfigurationOdd config = element_configuration(element, settings);
  config.validate();
  NetworkState next = state;
  try {
    next.capabilities.add(config.id, CapabilityEntry{config.regions, settings.power, config.lifetime_years});
  } catch (const ConflictError& e) {
    throw EnactmentError(e.what());
  }
  for (auto& m : next.motes) m.installed_elements.push_back(element.element_id);
  return next;
}

Interval lifetime_estimate(const NetworkState& state, std::string_view config_id) {
  return state.capabilities.at(config_id).lifetime_years.scaled(state.remaining_battery_fraction());
}

}  // namespace oddevo::sim
