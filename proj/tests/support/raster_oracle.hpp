#pragma once

// Exact reference models for the ODD algebra.
//
// Boxes live on a 0.1 lattice and are stored as integer tenths, so point
// membership and grid sampling can be evaluated with integer arithmetic
// only. The library works in doubles; these oracles never touch it.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "oddevo/odd/odd_model.hpp"

namespace oracle {

struct IBox {
  std::int64_t c_lo, c_hi, u_lo, u_hi;  // tenths of dB / tenths of packets/sec
};

struct IConfig {
  std::string id;
  std::vector<IBox> boxes;
};

using IModel = std::vector<IConfig>;

inline double tenths(std::int64_t v) { return static_cast<double>(v) / 10.0; }

inline oddevo::odd::Region to_region(const IBox& b) {
  return oddevo::odd::box(tenths(b.c_lo), tenths(b.c_hi), tenths(b.u_lo), tenths(b.u_hi));
}

inline oddevo::odd::ConfigurationOdd to_config(const IConfig& c, double life_lo = 1.0, double life_hi = 2.0) {
  oddevo::odd::ConfigurationOdd out{c.id, {}, {life_lo, life_hi}};
  for (const auto& b : c.boxes) out.regions.push_back(to_region(b));
  return out;
}

inline oddevo::odd::OddModel to_model(const IModel& m, std::uint64_t version = 1) {
  std::vector<oddevo::odd::ConfigurationOdd> configs;
  for (const auto& c : m) configs.push_back(to_config(c));
  return oddevo::odd::OddModel(std::move(configs), version);
}

// Uniform lattice value in [lo, hi] tenths.
inline std::int64_t draw(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

// Context in [-60, 0] dB, utility in [0, 60] packets/sec.
inline IBox random_box(std::mt19937_64& rng) {
  std::int64_t c1 = draw(rng, -600, 0), c2 = draw(rng, -600, 0);
  std::int64_t u1 = draw(rng, 0, 600), u2 = draw(rng, 0, 600);
  return {std::min(c1, c2), std::max(c1, c2), std::min(u1, u2), std::max(u1, u2)};
}

inline IConfig random_config(std::mt19937_64& rng, const std::string& id, int max_boxes = 4) {
  IConfig c{id, {}};
  const int n = static_cast<int>(draw(rng, 1, max_boxes));
  for (int i = 0; i < n; ++i) c.boxes.push_back(random_box(rng));
  return c;
}

inline IModel random_model(std::mt19937_64& rng, int max_configs = 4, const std::string& prefix = "cfg") {
  IModel m;
  const int n = static_cast<int>(draw(rng, 1, max_configs));
  for (int i = 0; i < n; ++i) m.push_back(random_config(rng, prefix + std::to_string(i)));
  return m;
}

inline bool member(const IBox& b, std::int64_t u, std::int64_t c) {
  return b.c_lo <= c && c <= b.c_hi && b.u_lo <= u && u <= b.u_hi;
}

inline bool member(const IConfig& cfg, std::int64_t u, std::int64_t c) {
  for (const auto& b : cfg.boxes) {
    if (member(b, u, c)) return true;
  }
  return false;
}

inline bool member(const IModel& m, std::int64_t u, std::int64_t c) {
  for (const auto& cfg : m) {
    if (member(cfg, u, c)) return true;
  }
  return false;
}

struct RasterCount {
  std::size_t hits = 0;
  std::size_t sampled = 0;
};

// Counts grid samples of `target` (n_u x n_c points, endpoints included)
// inside the model. Coordinates are scaled by (n-1) so every sample is an
// integer. `grow` widens (+1) or shrinks (-1) each model box by one grid
// cell of the target in each dimension.
inline RasterCount raster_coverage(const IModel& m, const IBox& target, int n_u, int n_c, int grow = 0) {
  const std::int64_t su = n_u - 1, sc = n_c - 1;
  const std::int64_t du = target.u_hi - target.u_lo, dc = target.c_hi - target.c_lo;
  RasterCount out;
  for (int i = 0; i < n_u; ++i) {
    const std::int64_t u = su * target.u_lo + du * i;
    for (int j = 0; j < n_c; ++j) {
      const std::int64_t c = sc * target.c_lo + dc * j;
      ++out.sampled;
      bool hit = false;
      for (const auto& cfg : m) {
        for (const auto& b : cfg.boxes) {
          if (sc * b.c_lo - grow * dc <= c && c <= sc * b.c_hi + grow * dc && su * b.u_lo - grow * du <= u &&
              u <= su * b.u_hi + grow * du) {
            hit = true;
            break;
          }
        }
        if (hit) break;
      }
      if (hit) ++out.hits;
    }
  }
  return out;
}

// The canonical model written out independently, in tenths.
inline IModel canonical() {
  return {
      {"power-max", {{-100, 0, 0, 300}, {-220, -100, 0, 200}, {-300, -220, 0, 100}}},
      {"power-medium", {{-120, 0, 0, 200}, {-220, -120, 0, 100}}},
      {"power-min", {{-120, 0, 0, 100}}},
  };
}

inline IBox evolution_target() { return {-200, 0, 200, 400}; }

}  // namespace oracle
