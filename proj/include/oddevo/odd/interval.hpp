#pragma once

#include <algorithm>
#include <compare>

namespace oddevo {

// Closed real interval [lo, hi]. Boundary points are members.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  constexpr bool well_formed() const { return lo <= hi; }
  constexpr bool contains(double x) const { return lo <= x && x <= hi; }
  constexpr bool contains(const Interval& other) const {
    return lo <= other.lo && other.hi <= hi;
  }
  constexpr double width() const { return hi - lo; }
  constexpr Interval scaled(double k) const { return {lo * k, hi * k}; }
  constexpr Interval inflated(double margin) const { return {lo - margin, hi + margin}; }

  static constexpr Interval hull(const Interval& a, const Interval& b) {
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
  }

  friend constexpr bool operator==(const Interval&, const Interval&) = default;
};

}  // namespace oddevo
