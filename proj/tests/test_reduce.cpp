#include "stationcover/reduce.hpp"
#include "stationcover/solve.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace stationcover;

namespace {

Instance star() { return build_instance({{"a", "b"}, {"a", "c"}, {"a", "d"}}); }
Instance triangle() { return build_instance({{"a", "b"}, {"b", "c"}, {"a", "c"}}); }

std::set<std::string> station_set(const Instance& inst) {
  std::set<std::string> out;
  for (auto t : inst.tokens()) out.insert(std::string(t));
  return out;
}

bool has_dominance(const Instance& inst) {
  const auto n = inst.station_count();
  for (StationId s2 = 0; s2 < n; ++s2)
    for (StationId s1 = 0; s1 < n; ++s1) {
      if (s1 == s2) continue;
      auto i1 = inst.incidence(s1), i2 = inst.incidence(s2);
      if (std::includes(i1.begin(), i1.end(), i2.begin(), i2.end())) return true;
    }
  for (std::size_t a = 0; a < inst.connection_count(); ++a)
    for (std::size_t b = 0; b < inst.connection_count(); ++b) {
      if (a == b) continue;
      std::set<StationId> sa(inst.connection(a).begin(), inst.connection(a).end());
      std::set<StationId> sb(inst.connection(b).begin(), inst.connection(b).end());
      if (std::includes(sb.begin(), sb.end(), sa.begin(), sa.end())) return true;
    }
  return false;
}

}  // namespace

TEST(Reduce, StarCollapsesToSingleStation) {
  auto rep = reduce_to_core(star());
  EXPECT_EQ(rep.core.station_count(), 1u);
  EXPECT_EQ(rep.core.token(0), "a");
  EXPECT_EQ(rep.core.connection_count(), 1u);
  EXPECT_EQ(rep.complexity, 1u);
  EXPECT_EQ(rep.removed_stations.size(), 3u);
  EXPECT_EQ(rep.removed_connections.size(), 2u);
  for (const auto& r : rep.removed_stations) EXPECT_EQ(star().token(r.witness), "a");
}

TEST(Reduce, TriangleIsAlreadyACore) {
  auto rep = reduce_to_core(triangle());
  EXPECT_EQ(rep.core.station_count(), 3u);
  EXPECT_EQ(rep.core.connection_count(), 3u);
  EXPECT_EQ(rep.complexity, 3u);
  EXPECT_DOUBLE_EQ(rep.relative_core_complexity, 1.0);
  EXPECT_TRUE(rep.removed_stations.empty());
  EXPECT_TRUE(rep.removed_connections.empty());
}

TEST(Reduce, MutualDominanceRemovesLargerToken) {
  auto rep = reduce_to_core(build_instance({{"a", "b"}, {"b", "a"}}));
  ASSERT_EQ(rep.core.station_count(), 1u);
  EXPECT_EQ(rep.core.token(0), "a");
  ASSERT_EQ(rep.removed_connections.size(), 1u);
  EXPECT_EQ(rep.removed_connections[0].connection, 1u);
}

TEST(Reduce, WitnessesAreValidAtRemovalTime) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = oracle::random_instance(rng, 14, 10, 0.25);
    auto rep = reduce_to_core(inst);
    for (const auto& r : rep.removed_stations) EXPECT_NE(r.station, r.witness);
    for (const auto& r : rep.removed_connections) EXPECT_NE(r.connection, r.witness);
    EXPECT_EQ(rep.removed_stations.size() + rep.core.station_count(), inst.station_count());
    EXPECT_EQ(rep.removed_connections.size() + rep.core.connection_count(), inst.connection_count());
  }
}

TEST(Reduce, CoreMatchesDefinitionOracle) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 80; ++trial) {
    auto inst = oracle::random_instance(rng, 4 + trial % 12, 2 + trial % 10, 0.15 + 0.05 * (trial % 6));
    auto rep = reduce_to_core(inst);
    auto ref = oracle::reduce_by_definition(inst);
    EXPECT_EQ(rep.core.station_count(), ref.stations.size());
    EXPECT_EQ(rep.core.connection_count(), ref.connections.size());
    EXPECT_FALSE(has_dominance(rep.core));
  }
}

TEST(Reduce, OrderInvariance) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = oracle::random_instance(rng, 16, 12, 0.2);
    auto base = reduce_to_core(inst);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      auto rep = reduce_to_core(inst, {seed});
      EXPECT_EQ(rep.core.station_count(), base.core.station_count());
      EXPECT_EQ(rep.core.connection_count(), base.core.connection_count());
      EXPECT_FALSE(has_dominance(rep.core));
    }
    std::mt19937_64 orng(trial);
    auto ref = oracle::reduce_by_definition(inst, &orng);
    EXPECT_EQ(ref.stations.size(), base.core.station_count());
  }
}

TEST(Reduce, Idempotence) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = oracle::random_instance(rng, 15, 10, 0.2);
    auto core = reduce_to_core(inst).core;
    auto again = reduce_to_core(core);
    EXPECT_TRUE(again.removed_stations.empty());
    EXPECT_TRUE(again.removed_connections.empty());
    EXPECT_EQ(write_hsd(again.core), write_hsd(core));
  }
}

TEST(Reduce, OptimumPreservedAndCoreCoverLifts) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    auto inst = oracle::random_instance(rng, 6 + trial % 14, 3 + trial % 12, 0.1 + 0.04 * (trial % 8));
    auto rep = reduce_to_core(inst);
    auto core_opt = solve_naive(rep.core);
    EXPECT_EQ(core_opt.size(), solve_naive(inst).size());
    EXPECT_TRUE(verify_cover(inst, core_opt));
  }
}

TEST(Reduce, ConnectedInputKeepsAtLeastOneStation) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = largest_component(oracle::random_instance(rng, 12, 8, 0.3));
    if (inst.connection_count() == 0) continue;
    auto rep = reduce_to_core(inst);
    EXPECT_GE(rep.core.station_count(), 1u);
    EXPECT_LE(rep.complexity, rep.core.station_count());
    EXPECT_GE(rep.relative_core_complexity, 0.0);
    EXPECT_LE(rep.relative_core_complexity, 1.0);
  }
}

TEST(Reduce, IsolatedStationsAreRemoved) {
  auto rep = reduce_to_core(build_instance({"a", "b", "x"}, {{"a", "b"}}));
  EXPECT_EQ(station_set(rep.core), (std::set<std::string>{"a"}));
}

TEST(Reduce, OriginMapsPointIntoInput) {
  auto inst = build_instance({{"p", "q", "r"}, {"q", "s"}, {"r", "s"}, {"p", "s"}});
  auto rep = reduce_to_core(inst);
  ASSERT_EQ(rep.core_station_origin.size(), rep.core.station_count());
  for (StationId s = 0; s < rep.core.station_count(); ++s)
    EXPECT_EQ(rep.core.token(s), inst.token(rep.core_station_origin[s]));
  ASSERT_EQ(rep.core_connection_origin.size(), rep.core.connection_count());
}

TEST(ComplexityStats, Cases) {
  auto empty = complexity_stats(Instance{}, 10);
  EXPECT_EQ(empty.complexity, 0u);
  EXPECT_DOUBLE_EQ(empty.relative, 0.0);

  auto same = complexity_stats(triangle(), 3);
  EXPECT_EQ(same.complexity, 3u);
  EXPECT_DOUBLE_EQ(same.relative, 1.0);

  auto small = complexity_stats(triangle(), 300);
  EXPECT_DOUBLE_EQ(small.relative, 0.01);

  auto two = complexity_stats(build_instance({{"a", "b"}, {"c", "d"}, {"d", "e"}, {"c", "e"}}), 10);
  EXPECT_EQ(two.complexity, 3u);
}
