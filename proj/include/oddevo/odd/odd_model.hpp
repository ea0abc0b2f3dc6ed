#pragma once

// Operational design domain (ODD) region algebra.
//
// An ODD is a set of working points (utility, context). Here utility is the
// demanded throughput in packets/sec and context is network interference in
// dB (non-positive). Each configuration of the managed system claims a finite
// set of axis-aligned boxes; the system ODD is the union over configurations.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oddevo/odd/interval.hpp"

namespace oddevo::odd {

inline constexpr double kMinContextDb = -60.0;
inline constexpr double kMaxContextDb = 0.0;

struct WorkingPoint {
  double utility = 0.0;  // packets/sec
  double context = 0.0;  // dB

  bool valid() const;
  friend bool operator==(const WorkingPoint&, const WorkingPoint&) = default;
};

enum class Knowledge { known_known, known_unknown, unknown_unknown };

std::string_view to_string(Knowledge k);
Knowledge knowledge_from_string(std::string_view s);

struct Region {
  Interval context;  // dB
  Interval utility;  // packets/sec
  Knowledge knowledge = Knowledge::known_known;

  bool well_formed() const { return context.well_formed() && utility.well_formed(); }
  bool contains(const WorkingPoint& p) const {
    return context.contains(p.context) && utility.contains(p.utility);
  }
  // Geometric containment; knowledge tags are ignored.
  bool contains(const Region& other) const {
    return context.contains(other.context) && utility.contains(other.utility);
  }

  friend bool operator==(const Region&, const Region&) = default;
};

// Convenience for the [c_lo, c_hi] x [u_lo, u_hi] notation used throughout.
Region box(double c_lo, double c_hi, double u_lo, double u_hi,
           Knowledge knowledge = Knowledge::known_known);

struct ConfigurationOdd {
  std::string id;
  std::vector<Region> regions;
  Interval lifetime_years;

  // Throws ValidationError when regions are empty, malformed, or the
  // lifetime lower bound is not positive.
  void validate() const;
  bool contains(const WorkingPoint& p) const;

  friend bool operator==(const ConfigurationOdd&, const ConfigurationOdd&) = default;
};

// Immutable snapshot. Configurations are kept sorted by id.
class OddModel {
 public:
  OddModel() = default;
  OddModel(std::vector<ConfigurationOdd> configurations, std::uint64_t version);

  const std::vector<ConfigurationOdd>& configurations() const { return configurations_; }
  std::uint64_t version() const { return version_; }

  const ConfigurationOdd* find(std::string_view id) const;
  const ConfigurationOdd& at(std::string_view id) const;  // NotFoundError
  bool empty() const { return configurations_.empty(); }

  // Every region of every configuration.
  std::vector<Region> all_regions() const;

  friend bool operator==(const OddModel&, const OddModel&) = default;

 private:
  std::vector<ConfigurationOdd> configurations_;
  std::uint64_t version_ = 1;
};

enum class TargetOrigin { stakeholder_goal, anomaly, novelty };

std::string_view to_string(TargetOrigin o);
TargetOrigin target_origin_from_string(std::string_view s);

struct EvolutionTarget {
  std::vector<Region> regions;
  TargetOrigin origin = TargetOrigin::stakeholder_goal;
  std::int64_t created_at = 0;

  void validate() const;
  // Smallest box enclosing every target region.
  Region hull() const;

  friend bool operator==(const EvolutionTarget&, const EvolutionTarget&) = default;
};

struct GridResolution {
  int n_utility = 21;
  int n_context = 21;
};

struct CoverageReport {
  double fraction = 0.0;
  std::vector<WorkingPoint> uncovered_samples;
  GridResolution grid_resolution;
  std::size_t sampled = 0;
};

bool contains(std::span<const Region> regions, const WorkingPoint& p);
bool contains(const OddModel& model, const WorkingPoint& p);

// Ids of all configurations whose regions contain p, lexicographic.
std::vector<std::string> satisfying_configs(const OddModel& model, const WorkingPoint& p);

// Eq. (1) extension: result holds both configuration sets, version + 1.
// Throws ConflictError on a duplicate configuration id.
OddModel odd_union(const OddModel& a, std::span<const ConfigurationOdd> b);

// Samples an evenly spaced n_utility x n_context grid (endpoints included)
// over each target region and counts the samples contained in the model.
CoverageReport coverage(const OddModel& model, const EvolutionTarget& target,
                        GridResolution resolution = {});

// Grid samples used by coverage(), exposed for oracles and the sandbox.
std::vector<WorkingPoint> grid_points(const Region& region, GridResolution resolution);

// Canonical DeltaIoT-style model: power-min, power-medium, power-max.
OddModel canonical_model();

// The stakeholder evolution target: c in [-20, 0] dB, u in [20, 40] packets/sec.
EvolutionTarget canonical_evolution_target();

}  // namespace oddevo::odd
