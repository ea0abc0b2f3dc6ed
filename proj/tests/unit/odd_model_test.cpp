#include <gtest/gtest.h>

#include <random>

#include "oddevo/errors.hpp"
#include "oddevo/odd/odd_json.hpp"
#include "oddevo/odd/odd_model.hpp"
#include "raster_oracle.hpp"

using namespace oddevo;
using namespace oddevo::odd;

namespace {

const ConfigurationOdd& cfg(const OddModel& m, const char* id) { return m.at(id); }

ConfigurationOdd radio_config() {
  return ConfigurationOdd{"radio-module", {box(-30, 0, 0, 50, Knowledge::known_unknown)}, {1, 3}};
}

}  // namespace

TEST(Contains, PowerMinHoldsPointOne) {
  const auto m = canonical_model();
  EXPECT_TRUE(cfg(m, "power-min").contains({5, -5}));
}

TEST(Contains, ClosedBoundary) {
  const Region r = box(-12, 0, 0, 10);
  EXPECT_TRUE(r.contains(WorkingPoint{10, -12}));
  EXPECT_FALSE(r.contains(WorkingPoint{10.0001, -12}));
  EXPECT_FALSE(r.contains(WorkingPoint{10, -12.0001}));
}

TEST(Contains, CornersAreMembers) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    const Region r = oracle::to_region(oracle::random_box(rng));
    for (double u : {r.utility.lo, r.utility.hi}) {
      for (double c : {r.context.lo, r.context.hi}) EXPECT_TRUE(r.contains(WorkingPoint{u, c}));
    }
  }
}

TEST(Contains, AgreesWithLatticeBitmap) {
  // 10,000 lattice points against the integer membership test.
  std::mt19937_64 rng(11);
  const auto im = oracle::canonical();
  const auto m = oracle::to_model(im);
  for (int i = 0; i < 10000; ++i) {
    const auto u = oracle::draw(rng, 0, 600), c = oracle::draw(rng, -600, 0);
    ASSERT_EQ(contains(m, {oracle::tenths(u), oracle::tenths(c)}), oracle::member(im, u, c)) << u << "," << c;
  }
}

TEST(SatisfyingConfigs, ReferencePoints) {
  const auto m = canonical_model();
  EXPECT_EQ(satisfying_configs(m, {20, -5}), (std::vector<std::string>{"power-max", "power-medium"}));
  EXPECT_TRUE(satisfying_configs(m, {35, -15}).empty());
  EXPECT_EQ(satisfying_configs(m, {5, -5}), (std::vector<std::string>{"power-max", "power-medium", "power-min"}));
  EXPECT_EQ(satisfying_configs(m, {5, -28}), (std::vector<std::string>{"power-max"}));
}

TEST(SatisfyingConfigs, NonEmptyIffContained) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const auto m = oracle::to_model(oracle::random_model(rng));
    for (int i = 0; i < 200; ++i) {
      const WorkingPoint p{oracle::tenths(oracle::draw(rng, 0, 600)), oracle::tenths(oracle::draw(rng, -600, 0))};
      const auto regions = m.all_regions();
      EXPECT_EQ(!satisfying_configs(m, p).empty(), contains(std::span<const Region>(regions), p));
    }
  }
}

TEST(OddModel, RejectsDuplicatesAndInvertedBoxes) {
  EXPECT_THROW(OddModel({{"a", {box(-1, 0, 0, 1)}, {1, 2}}, {"a", {box(-1, 0, 0, 1)}, {1, 2}}}, 1), ConflictError);
  EXPECT_THROW(OddModel({{"a", {box(0, -1, 0, 1)}, {1, 2}}}, 1), ValidationError);
  EXPECT_THROW(OddModel({{"a", {}, {1, 2}}}, 1), ValidationError);
  EXPECT_THROW(OddModel({{"a", {box(-1, 0, 0, 1)}, {0, 2}}}, 1), ValidationError);
}

TEST(Union, RadioModuleCoversEvolutionPoint) {
  const auto a = canonical_model();
  const std::vector<ConfigurationOdd> b{radio_config()};
  const auto u = odd_union(a, b);
  EXPECT_TRUE(contains(u, {35, -15}));
  EXPECT_FALSE(contains(a, {35, -15}));
  EXPECT_EQ(u.version(), a.version() + 1);
}

TEST(Union, EmptySetBumpsVersionOnly) {
  const auto a = canonical_model();
  const auto u = odd_union(a, {});
  EXPECT_EQ(u.configurations(), a.configurations());
  EXPECT_EQ(u.version(), 2u);
}

TEST(Union, DuplicateIdConflicts) {
  const auto a = canonical_model();
  const std::vector<ConfigurationOdd> b{{"power-min", {box(-1, 0, 0, 1)}, {1, 2}}};
  EXPECT_THROW(odd_union(a, b), ConflictError);
}

TEST(Union, MembershipIsDisjunction) {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 100; ++k) {
    const auto ia = oracle::random_model(rng, 3, "a");
    const auto ib = oracle::random_model(rng, 3, "b");
    const auto a = oracle::to_model(ia);
    std::vector<ConfigurationOdd> b;
    for (const auto& c : ib) b.push_back(oracle::to_config(c));
    const auto u = odd_union(a, b);
    for (int i = 0; i < 1000; ++i) {
      const auto pu = oracle::draw(rng, 0, 600), pc = oracle::draw(rng, -600, 0);
      const WorkingPoint p{oracle::tenths(pu), oracle::tenths(pc)};
      const bool in_b = std::any_of(b.begin(), b.end(), [&](const auto& c) { return c.contains(p); });
      ASSERT_EQ(contains(u, p), contains(a, p) || in_b);
      ASSERT_EQ(contains(u, p), oracle::member(ia, pu, pc) || oracle::member(ib, pu, pc));
    }
  }
}

TEST(Union, VersionStrictlyIncreases) {
  auto m = canonical_model();
  for (int i = 0; i < 10; ++i) {
    const std::vector<ConfigurationOdd> b{{"extra-" + std::to_string(i), {box(-1, 0, 0, 1)}, {1, 2}}};
    const auto next = odd_union(m, b);
    EXPECT_GT(next.version(), m.version());
    m = next;
  }
}

TEST(Coverage, CanonicalAgainstEvolutionTargetMatchesHandCount) {
  const auto report = coverage(canonical_model(), canonical_evolution_target(), {21, 21});
  const auto oracle_count =
      oracle::raster_coverage(oracle::canonical(), oracle::evolution_target(), 21, 21);
  EXPECT_EQ(oracle_count.hits, 131u);
  EXPECT_EQ(oracle_count.sampled, 441u);
  EXPECT_EQ(report.sampled, 441u);
  EXPECT_EQ(report.sampled - report.uncovered_samples.size(), 131u);
  EXPECT_DOUBLE_EQ(report.fraction, 131.0 / 441.0);
  EXPECT_LT(report.fraction, 1.0);
}

TEST(Coverage, FullAfterRadioModule) {
  const std::vector<ConfigurationOdd> b{radio_config()};
  const auto report = coverage(odd_union(canonical_model(), b), canonical_evolution_target(), {21, 21});
  EXPECT_EQ(report.fraction, 1.0);
  EXPECT_TRUE(report.uncovered_samples.empty());
}

TEST(Coverage, TargetInsideOneRegionIsFullAtAnyResolution) {
  const EvolutionTarget t{{box(-8, -2, 1, 9)}, TargetOrigin::stakeholder_goal, 0};
  for (int n : {2, 3, 7, 21, 64}) EXPECT_EQ(coverage(canonical_model(), t, {n, n}).fraction, 1.0) << n;
}

TEST(Coverage, RejectsDegenerateResolutionAndEmptyTarget) {
  EXPECT_THROW(coverage(canonical_model(), canonical_evolution_target(), {1, 21}), ValidationError);
  EXPECT_THROW(coverage(canonical_model(), EvolutionTarget{}, {21, 21}), ValidationError);
}

TEST(Coverage, NeverDecreasesUnderUnion) {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 100; ++k) {
    const auto a = oracle::to_model(oracle::random_model(rng, 3, "a"));
    const EvolutionTarget t{{oracle::to_region(oracle::random_box(rng))}, TargetOrigin::stakeholder_goal, 0};
    std::vector<ConfigurationOdd> b{oracle::to_config(oracle::random_config(rng, "b"))};
    EXPECT_GE(coverage(odd_union(a, b), t).fraction, coverage(a, t).fraction);
  }
}

TEST(GridPoints, IncludesEndpoints) {
  const auto pts = grid_points(box(-20, 0, 20, 40), {21, 21});
  ASSERT_EQ(pts.size(), 441u);
  EXPECT_EQ(pts.front(), (WorkingPoint{20, -20}));
  EXPECT_EQ(pts.back(), (WorkingPoint{40, 0}));
}

TEST(OddJson, RoundTripsModelAndTarget) {
  std::vector<ConfigurationOdd> b{radio_config()};
  const auto m = odd_union(canonical_model(), b);
  EXPECT_EQ(parse_model(serialize(m)), m);
  const EvolutionTarget t{{box(-17, -13, 33, 37, Knowledge::known_unknown)}, TargetOrigin::anomaly, 12};
  EXPECT_EQ(target_from_json(target_to_json(t)), t);
}

TEST(OddJson, RejectsMalformedInput) {
  EXPECT_THROW(parse_model("{"), ValidationError);
  EXPECT_THROW(parse_model(R"({"schema":"other","version":1,"configurations":[]})"), ValidationError);
  EXPECT_THROW(parse_model(R"({"schema":"oddevo.odd/1","version":1,"configurations":[{"id":"a","boxes":[[0,-1,0,1]],"lifetime_years":[1,2]}]})"),
               ValidationError);
}
