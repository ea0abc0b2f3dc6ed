#include "oddevo/odd/odd_model.hpp"

#include <algorithm>
#include <set>

#include "oddevo/errors.hpp"

namespace oddevo::odd {

bool WorkingPoint::valid() const {
  return utility >= 0.0 && context <= kMaxContextDb && context >= kMinContextDb;
}

std::string_view to_string(Knowledge k) {
  switch (k) {
    case Knowledge::known_known: return "known_known";
    case Knowledge::known_unknown: return "known_unknown";
    case Knowledge::unknown_unknown: return "unknown_unknown";
  }
  return "known_known";
}

Knowledge knowledge_from_string(std::string_view s) {
  if (s == "known_known") return Knowledge::known_known;
  if (s == "known_unknown") return Knowledge::known_unknown;
  if (s == "unknown_unknown") return Knowledge::unknown_unknown;
  throw ValidationError("unknown knowledge tag '" + std::string(s) + "'");
}

std::string_view to_string(TargetOrigin o) {
  switch (o) {
    case TargetOrigin::stakeholder_goal: return "stakeholder_goal";
    case TargetOrigin::anomaly: return "anomaly";
    case TargetOrigin::novelty: return "novelty";
  }
  return "stakeholder_goal";
}

TargetOrigin target_origin_from_string(std::string_view s) {
  if (s == "stakeholder_goal") return TargetOrigin::stakeholder_goal;
  if (s == "anomaly") return TargetOrigin::anomaly;
  if (s == "novelty") return TargetOrigin::novelty;
  throw ValidationError("unknown target origin '" + std::string(s) + "'");
}

Region box(double c_lo, double c_hi, double u_lo, double u_hi, Knowledge knowledge) {
  return Region{{c_lo, c_hi}, {u_lo, u_hi}, knowledge};
}

void ConfigurationOdd::validate() const {
  std::vector<std::string> problems;
  if (id.empty()) problems.emplace_back("configuration id is empty");
  if (regions.empty()) problems.push_back("configuration '" + id + "' has no regions");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (!regions[i].well_formed()) {
      problems.push_back("configuration '" + id + "' region " + std::to_string(i) +
                         " has an inverted interval");
    }
  }
  if (!lifetime_years.well_formed() || !(lifetime_years.lo > 0.0)) {
    problems.push_back("configuration '" + id + "' lifetime must satisfy 0 < lo <= hi");
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

bool ConfigurationOdd::contains(const WorkingPoint& p) const {
  return odd::contains(std::span<const Region>(regions), p);
}

OddModel::OddModel(std::vector<ConfigurationOdd> configurations, std::uint64_t version)
    : configurations_(std::move(configurations)), version_(version) {
  std::set<std::string> ids;
  for (const auto& c : configurations_) {
    c.validate();
    if (!ids.insert(c.id).second) throw ConflictError("duplicate configuration id '" + c.id + "'");
  }
  std::sort(configurations_.begin(), configurations_.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
}

const ConfigurationOdd* OddModel::find(std::string_view id) const {
  auto it = std::lower_bound(configurations_.begin(), configurations_.end(), id,
                             [](const ConfigurationOdd& c, std::string_view key) { return c.id < key; });
  if (it == configurations_.end() || it->id != id) return nullptr;
  return &*it;
}

const ConfigurationOdd& OddModel::at(std::string_view id) const {
  if (const auto* c = find(id)) return *c;
  throw NotFoundError("unknown configuration '" + std::string(id) + "'");
}

std::vector<Region> OddModel::all_regions() const {
  std::vector<Region> out;
  for (const auto& c : configurations_) out.insert(out.end(), c.regions.begin(), c.regions.end());
  return out;
}

void EvolutionTarget::validate() const {
  if (regions.empty()) throw ValidationError("evolution target has no regions");
  for (const auto& r : regions) {
    if (!r.well_formed()) throw ValidationError("evolution target region has an inverted interval");
  }
}

Region EvolutionTarget::hull() const {
  validate();
  Region h = regions.front();
  for (const auto& r : regions) {
    h.context = Interval::hull(h.context, r.context);
    h.utility = Interval::hull(h.utility, r.utility);
  }
  return h;
}

bool contains(std::span<const Region> regions, const WorkingPoint& p) {
  return std::any_of(regions.begin(), regions.end(), [&](const Region& r) { return r.contains(p); });
}

bool contains(const OddModel& model, const WorkingPoint& p) {
  return std::any_of(model.configurations().begin(), model.configurations().end(),
                     [&](const ConfigurationOdd& c) { return c.contains(p); });
}

std::vector<std::string> satisfying_configs(const OddModel& model, const WorkingPoint& p) {
  std::vector<std::string> ids;
  for (const auto& c : model.configurations()) {
    if (c.contains(p)) ids.push_back(c.id);
  }
  return ids;  // already lexicographic: configurations are sorted by id
}

OddModel odd_union(const OddModel& a, std::span<const ConfigurationOdd> b) {
  std::vector<ConfigurationOdd> merged = a.configurations();
  for (const auto& c : b) {
    if (a.find(c.id) != nullptr) {
      throw ConflictError("configuration id '" + c.id + "' already present in ODD version " +
                          std::to_string(a.version()));
    }
    merged.push_back(c);
  }
  return OddModel(std::move(merged), a.version() + 1);
}

namespace {

double lattice(const Interval& iv, int i, int n) {
  if (n <= 1) return iv.lo;
  if (i == n - 1) return iv.hi;
  return iv.lo + (iv.hi - iv.lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

}  // namespace

std::vector<WorkingPoint> grid_points(const Region& region, GridResolution resolution) {
  std::vector<WorkingPoint> out;
  out.reserve(static_cast<std::size_t>(resolution.n_utility) * resolution.n_context);
  for (int i = 0; i < resolution.n_utility; ++i) {
    for (int j = 0; j < resolution.n_context; ++j) {
      out.push_back({lattice(region.utility, i, resolution.n_utility),
                     lattice(region.context, j, resolution.n_context)});
    }
  }
  return out;
}

CoverageReport coverage(const OddModel& model, const EvolutionTarget& target,
                        GridResolution resolution) {
  if (resolution.n_utility < 2 || resolution.n_context < 2) {
    throw ValidationError("coverage resolution must be at least 2x2");
  }
  target.validate();
  CoverageReport report;
  report.grid_resolution = resolution;
  std::size_t hits = 0;
  for (const auto& region : target.regions) {
    for (const auto& p : grid_points(region, resolution)) {
      ++report.sampled;
      if (contains(model, p)) {
        ++hits;
      } else {
        report.uncovered_samples.push_back(p);
      }
    }
  }
  report.fraction = report.uncovered_samples.empty()
                        ? 1.0
                        : static_cast<double>(hits) / static_cast<double>(report.sampled);
  return report;
}

OddModel canonical_model() {
  return OddModel(
      {
          ConfigurationOdd{"power-min", {box(-12, 0, 0, 10)}, {5, 8}},
          ConfigurationOdd{"power-medium", {box(-12, 0, 0, 20), box(-22, -12, 0, 10)}, {3, 5}},
          ConfigurationOdd{"power-max",
                           {box(-10, 0, 0, 30), box(-22, -10, 0, 20), box(-30, -22, 0, 10)},
                           {1, 3}},
      },
      1);
}

EvolutionTarget canonical_evolution_target() {
  return EvolutionTarget{{box(-20, 0, 20, 40)}, TargetOrigin::stakeholder_goal, 0};
}

}  // namespace oddevo::odd
