#include "stationcover/metrics.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace stationcover;

namespace {

using Edges = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

Edges random_bipartite_edges(std::mt19937_64& rng, std::size_t left, std::size_t right, double p) {
  Edges out;
  std::bernoulli_distribution take(p);
  for (std::uint32_t l = 0; l < left; ++l)
    for (std::uint32_t r = 0; r < right; ++r)
      if (take(rng)) out.emplace_back(l, r);
  return out;
}

std::uint64_t sum_of(const std::vector<std::uint64_t>& v) {
  std::uint64_t s = 0;
  for (auto x : v) s += x;
  return s;
}

}  // namespace

TEST(Ccdf, Counting) {
  std::vector<std::uint64_t> a{1, 1, 2};
  auto c = ccdf(a);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].value, 1u);
  EXPECT_DOUBLE_EQ(c[0].fraction, 1.0);
  EXPECT_EQ(c[1].value, 2u);
  EXPECT_DOUBLE_EQ(c[1].fraction, 1.0 / 3.0);

  std::vector<std::uint64_t> one{5};
  auto s = ccdf(one);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_DOUBLE_EQ(s[0].fraction, 1.0);

  std::vector<std::uint64_t> four{4, 2, 3, 1};
  auto f = ccdf(four);
  ASSERT_EQ(f.size(), 4u);
  EXPECT_DOUBLE_EQ(f[1].fraction, 0.75);
  EXPECT_DOUBLE_EQ(f[2].fraction, 0.5);
  EXPECT_DOUBLE_EQ(f[3].fraction, 0.25);

  EXPECT_THROW(ccdf(std::vector<std::uint64_t>{}), Error);
}

TEST(HurwitzZeta, MatchesRiemannZetaAtOne) {
  for (double s : {1.5, 2.0, 2.5, 3.5, 6.0, 12.0}) EXPECT_NEAR(hurwitz_zeta(s, 1.0), std::riemann_zeta(s), 1e-10 * std::riemann_zeta(s));
}

TEST(HurwitzZeta, ShiftIdentity) {
  for (double s : {1.2, 2.7, 4.0})
    for (double q : {1.0, 3.0, 17.0})
      EXPECT_NEAR(hurwitz_zeta(s, q) - hurwitz_zeta(s, q + 1.0), std::pow(q, -s), 1e-12);
  EXPECT_THROW(hurwitz_zeta(1.0, 1.0), Error);
}

TEST(PowerLaw, RecoversExponent) {
  std::mt19937_64 rng(97);
  oracle::DiscretePowerLaw law(3.5);
  std::vector<double> betas, kss;
  for (int t = 0; t < 9; ++t) {
    std::vector<std::uint64_t> xs(2000);
    for (auto& x : xs) x = law(rng);
    auto fit = fit_power_law(xs);
    betas.push_back(fit.beta);
    kss.push_back(fit.ks);
    EXPECT_GE(fit.n_tail, 10u);
    EXPECT_GE(fit.xmin, 1u);
    EXPECT_GE(fit.ks, 0.0);
    EXPECT_LE(fit.ks, 1.0);
  }
  std::nth_element(betas.begin(), betas.begin() + 4, betas.end());
  std::nth_element(kss.begin(), kss.begin() + 4, kss.end());
  EXPECT_GE(betas[4], 3.2);
  EXPECT_LE(betas[4], 3.8);
  EXPECT_LE(kss[4], 0.05);
}

TEST(PowerLaw, GeometricSamplesFitWorse) {
  std::mt19937_64 rng(101);
  oracle::DiscretePowerLaw law(2.5);
  std::geometric_distribution<std::uint64_t> geo(0.3);
  double ks_power = 0, ks_geo = 0;
  for (int t = 0; t < 5; ++t) {
    std::vector<std::uint64_t> a(2000), b(2000);
    for (auto& x : a) x = law(rng);
    for (auto& x : b) x = 1 + geo(rng);
    ks_power += fit_power_law(a).ks;
    ks_geo += fit_power_law(b).ks;
  }
  EXPECT_GT(ks_geo, 1.5 * ks_power);
}

TEST(PowerLaw, DuplicationLeavesFitUnchanged) {
  // Every distinct value appears at least ten times, so the admissible xmin
  // candidates are the same before and after duplication.
  std::mt19937_64 rng(103);
  oracle::DiscretePowerLaw law(2.8);
  for (int t = 0; t < 5; ++t) {
    std::vector<std::uint64_t> xs(3000);
    for (auto& x : xs) x = law(rng);
    std::map<std::uint64_t, int> counts;
    for (auto x : xs) ++counts[x];
    std::erase_if(xs, [&](std::uint64_t x) { return counts[x] < 10; });
    auto single = fit_power_law(xs);
    auto doubled = xs;
    doubled.insert(doubled.end(), xs.begin(), xs.end());
    auto twice = fit_power_law(doubled);
    EXPECT_EQ(single.xmin, twice.xmin);
    EXPECT_NEAR(single.beta, twice.beta, 1e-4);
    EXPECT_NEAR(single.ks, twice.ks, 1e-6);
  }
}

TEST(PowerLaw, DegenerateInput) {
  std::vector<std::uint64_t> flat(100, 4);
  try {
    fit_power_law(flat);
    FAIL() << "expected error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("no tail"), std::string::npos);
  }
  EXPECT_THROW(fit_power_law(std::vector<std::uint64_t>{0, 1, 2}), Error);
  EXPECT_THROW(fit_power_law(std::vector<std::uint64_t>{}), Error);
}

TEST(Clustering, DuplicatePairIsOneFourCycle) {
  auto c = bipartite_clustering(build_instance({{"a", "b"}, {"a", "b"}}));
  EXPECT_TRUE(c.defined);
  EXPECT_EQ(c.counts.cycles4, 1u);
  EXPECT_EQ(c.counts.paths3, 4u);
  EXPECT_DOUBLE_EQ(c.kappa, 1.0);
}

TEST(Clustering, K23) {
  auto c = bipartite_clustering(build_instance({{"a", "b"}, {"a", "b"}, {"a", "b"}}));
  EXPECT_EQ(c.counts.paths3, 12u);
  EXPECT_EQ(c.counts.cycles4, 3u);
  EXPECT_DOUBLE_EQ(c.kappa, 1.0);
}

TEST(Clustering, PathPeelsAwayToUndefined) {
  auto c = bipartite_clustering(build_instance({{"a", "b"}, {"b", "c"}}));
  EXPECT_FALSE(c.defined);
  EXPECT_DOUBLE_EQ(c.kappa, 0.0);
}

TEST(Clustering, TriangleIsSixCycle) {
  auto inst = build_instance({{"a", "b"}, {"b", "c"}, {"a", "c"}});
  auto c = bipartite_clustering(inst);
  auto ref = oracle::enumerate_paths_cycles(3, 3, {{0, 0}, {1, 0}, {1, 1}, {2, 1}, {0, 2}, {2, 2}});
  EXPECT_EQ(c.counts.paths3, ref.paths3);
  EXPECT_EQ(c.counts.cycles4, ref.cycles4);
  EXPECT_EQ(ref.cycles4, 0u);
  EXPECT_DOUBLE_EQ(c.kappa, 0.0);
}

TEST(Clustering, FastCountsMatchEnumeration) {
  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t left = 1 + trial % 7, right = 1 + (trial / 7) % 6;
    auto edges = random_bipartite_edges(rng, left, right, 0.25 + 0.05 * (trial % 10));
    auto fast = count_paths_and_cycles(BipartiteGraph::from_edges(left, right, edges));
    auto ref = oracle::enumerate_paths_cycles(left, right, edges);
    EXPECT_EQ(fast.paths3, ref.paths3);
    EXPECT_EQ(fast.cycles4, ref.cycles4);
  }
}

TEST(Clustering, RangeAndRelabelingInvariance) {
  std::mt19937_64 rng(109);
  for (int trial = 0; trial < 40; ++trial) {
    auto inst = oracle::random_instance(rng, 14, 10, 0.3);
    auto c = bipartite_clustering(inst);
    EXPECT_GE(c.kappa, 0.0);
    EXPECT_LE(c.kappa, 1.0);

    std::vector<std::string> names;
    for (auto t : inst.tokens()) names.emplace_back(t);
    auto renamed = names;
    std::shuffle(renamed.begin(), renamed.end(), rng);
    for (auto& n : renamed) n = "r" + n;
    std::vector<TokenSequence> conns;
    for (std::size_t i = 0; i < inst.connection_count(); ++i) {
      TokenSequence seq;
      for (auto s : inst.connection(i)) seq.push_back(renamed[s]);
      conns.push_back(seq);
    }
    std::shuffle(conns.begin(), conns.end(), rng);
    auto c2 = bipartite_clustering(build_instance(renamed, conns));
    EXPECT_EQ(c.counts.paths3, c2.counts.paths3);
    EXPECT_EQ(c.counts.cycles4, c2.counts.cycles4);
  }
}

TEST(BipartiteTwoCore, RemovesAttachedTrees) {
  auto inst = build_instance({{"a", "b"}, {"a", "b"}, {"b", "c"}, {"c", "d"}});
  auto core = bipartite_two_core(incidence_graph(inst));
  EXPECT_EQ(core.edge_count(), 4u);
}

TEST(MetricsReport, Triangle) {
  auto r = metrics_report(build_instance({{"a", "b"}, {"b", "c"}, {"a", "c"}}));
  EXPECT_EQ(r.stations, 3u);
  EXPECT_DOUBLE_EQ(r.ratio, 1.0);
  EXPECT_DOUBLE_EQ(r.delta_S, 2.0);
  EXPECT_FALSE(r.fit.has_value());
  EXPECT_DOUBLE_EQ(r.kappa, 0.0);
  EXPECT_TRUE(r.kappa_defined);
  EXPECT_DOUBLE_EQ(r.two_core_fraction, 1.0);
  EXPECT_DOUBLE_EQ(r.core_fraction, 1.0);
}

TEST(MetricsReport, CsvRow) {
  auto r = metrics_report(build_instance({{"a", "b"}, {"b", "c"}, {"a", "c"}}));
  EXPECT_EQ(metrics_csv_row(r), "3,1,2,nan,nan,0,1,1");
  EXPECT_EQ(metrics_csv_header(), "n_stations,ratio,delta_s,beta_hat,ks,kappa,two_core_frac,core_frac");
}

TEST(MetricsReport, PositiveDegreesIgnoreIsolated) {
  auto inst = build_instance({"a", "b", "z"}, {{"a", "b"}, {"a"}});
  auto d = positive_station_degrees(inst);
  EXPECT_EQ(d.size(), 2u);
  EXPECT_EQ(sum_of(d), 3u);
}
