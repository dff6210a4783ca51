#include "stationcover/model.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>

using namespace stationcover;

namespace {

std::multiset<std::set<std::string>> connection_sets(const Instance& inst) {
  std::multiset<std::set<std::string>> out;
  for (std::size_t c = 0; c < inst.connection_count(); ++c) {
    auto t = inst.connection_tokens(c);
    out.emplace(t.begin(), t.end());
  }
  return out;
}

}  // namespace

TEST(BuildInstance, DirectConstruction) {
  auto inst = build_instance({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}});
  EXPECT_EQ(inst.station_count(), 3u);
  EXPECT_EQ(inst.connection_count(), 2u);
  EXPECT_EQ(inst.connection_tokens(1), (TokenSequence{"b", "c"}));
}

TEST(BuildInstance, RepeatedStationCollapsesToFirstOccurrence) {
  auto inst = build_instance({"a"}, {{"a", "a"}});
  ASSERT_EQ(inst.connection_count(), 1u);
  EXPECT_EQ(inst.connection_tokens(0), (TokenSequence{"a"}));

  auto loop = build_instance({{"b", "a", "c", "a", "b"}});
  EXPECT_EQ(loop.connection_tokens(0), (TokenSequence{"b", "a", "c"}));
}

TEST(BuildInstance, Rejections) {
  EXPECT_THROW(build_instance({"a"}, {{}}), Error);
  EXPECT_THROW(build_instance({"a"}, {{"a", "z"}}), Error);
  EXPECT_THROW(build_instance({{"a b"}}), Error);
  EXPECT_THROW(build_instance({{""}}), Error);
}

TEST(BuildInstance, IncidenceAndLookup) {
  auto inst = build_instance({{"a", "b"}, {"a", "c"}});
  EXPECT_EQ(inst.degree(inst.id_of("a")), 2u);
  EXPECT_FALSE(inst.find("zz").has_value());
  EXPECT_THROW(inst.id_of("zz"), Error);
}

TEST(Components, DisjointConnections) {
  auto parts = connected_components(build_instance({{"a", "b"}, {"c", "d"}}));
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_EQ(parts[0].station_count(), 2u);
  EXPECT_EQ(parts[1].station_count(), 2u);
  EXPECT_EQ(parts[0].token(0), "a");
}

TEST(Components, SharedStationJoins) {
  auto parts = connected_components(build_instance({{"a", "b"}, {"b", "c"}}));
  ASSERT_EQ(parts.size(), 1u);
  EXPECT_EQ(parts[0].station_count(), 3u);
}

TEST(Components, IsolatedStationIsItsOwnComponent) {
  auto parts = connected_components(build_instance({"a", "b", "x"}, {{"a", "b"}}));
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_EQ(parts[0].station_count(), 2u);
  EXPECT_EQ(parts[1].station_count(), 1u);
  EXPECT_EQ(parts[1].token(0), "x");
  EXPECT_EQ(parts[1].connection_count(), 0u);
}

TEST(Components, LargestComponent) {
  auto big = largest_component(build_instance({{"a", "b"}, {"b", "c"}, {"d", "e"}}));
  EXPECT_EQ(big.station_count(), 3u);
  EXPECT_EQ(big.connection_count(), 2u);

  auto single = build_instance({{"a", "b"}});
  EXPECT_EQ(connection_sets(largest_component(single)), connection_sets(single));

  auto tie = largest_component(build_instance({{"q", "r"}, {"c", "z"}}));
  EXPECT_EQ(tie.token(0), "c");

  EXPECT_THROW(largest_component(Instance{}), Error);
}

TEST(Components, PartitionProperty) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    auto inst = oracle::random_instance(rng, 15, 6, 0.12);
    auto parts = connected_components(inst);
    std::size_t stations = 0, conns = 0;
    std::set<std::string> seen;
    for (const auto& p : parts) {
      stations += p.station_count();
      conns += p.connection_count();
      for (auto t : p.tokens()) EXPECT_TRUE(seen.insert(std::string(t)).second);
    }
    EXPECT_EQ(stations, inst.station_count());
    EXPECT_EQ(conns, inst.connection_count());
    for (std::size_t i = 1; i < parts.size(); ++i) EXPECT_GE(parts[i - 1].station_count(), parts[i].station_count());
  }
}

TEST(DegreeStats, Counting) {
  auto st = degree_stats(build_instance({{"a", "b"}, {"a", "c"}}));
  EXPECT_EQ(st.station_degrees, (std::vector<std::size_t>{2, 1, 1}));
  EXPECT_DOUBLE_EQ(st.delta_S, 4.0 / 3.0);
  EXPECT_DOUBLE_EQ(st.delta_C, 2.0);
  EXPECT_DOUBLE_EQ(st.ratio, 1.5);
}

TEST(DegreeStats, CompleteIncidence) {
  auto st = degree_stats(build_instance({{"a", "b", "c"}, {"c", "b", "a"}, {"b", "a", "c"}, {"a", "c", "b"}}));
  EXPECT_DOUBLE_EQ(st.delta_S, 4.0);
}

TEST(DegreeStats, HandshakeIdentity) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = oracle::random_instance(rng, 12, 9, 0.3);
    auto st = degree_stats(inst);
    const double pairs = static_cast<double>(inst.incidence_count());
    EXPECT_NEAR(st.delta_S * static_cast<double>(inst.station_count()), pairs, 1e-9);
    EXPECT_NEAR(st.delta_C * static_cast<double>(inst.connection_count()), pairs, 1e-9);
    EXPECT_NEAR(st.delta_C, st.delta_S * st.ratio, 1e-9);
  }
  EXPECT_THROW(degree_stats(Instance{}), Error);
}

TEST(Hsd, ReadsConnectionsAndSkipsComments) {
  auto inst = read_hsd("a b\nb c\n");
  EXPECT_EQ(inst.connection_count(), 2u);
  EXPECT_EQ(inst.connection_tokens(0), (TokenSequence{"a", "b"}));

  auto commented = read_hsd("# comment\na b\n");
  EXPECT_EQ(commented.connection_count(), 1u);
  EXPECT_EQ(commented.station_count(), 2u);
}

TEST(Hsd, BlankConnectionLineIsAnError) {
  EXPECT_THROW(read_hsd("\n"), Error);
  EXPECT_THROW(read_hsd("a b\n   \nc\n"), Error);
}

TEST(Hsd, IsolatedStationsSurviveRoundTrip) {
  auto inst = build_instance({"a", "b", "x"}, {{"a", "b"}});
  auto text = write_hsd(inst);
  EXPECT_EQ(text, "#@stations x\na b\n");
  auto back = read_hsd(text);
  EXPECT_EQ(back.station_count(), 3u);
}

TEST(Hsd, RoundTripProperty) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    auto inst = oracle::random_instance(rng, 10 + trial % 7, 1 + trial % 9, 0.2);
    auto back = read_hsd(write_hsd(inst));
    EXPECT_TRUE(std::equal(inst.tokens().begin(), inst.tokens().end(), back.tokens().begin(), back.tokens().end()));
    EXPECT_EQ(connection_sets(inst), connection_sets(back));
    for (std::size_t c = 0; c < inst.connection_count(); ++c) EXPECT_EQ(inst.connection_tokens(c), back.connection_tokens(c));
  }
}
