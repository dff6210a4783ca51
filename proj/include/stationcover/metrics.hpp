#pragma once

// Heterogeneity and locality measurements: degree CCDF, discrete power-law
// fit with KS distance, bipartite clustering coefficient, and the per-instance
// metrics row.

#include "stationcover/graphview.hpp"
#include "stationcover/model.hpp"
#include "stationcover/reduce.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

namespace stationcover {

struct CcdfPoint {
  std::uint64_t value;
  double fraction;  // share of samples >= value
};

inline std::vector<CcdfPoint> ccdf(std::span<const std::uint64_t> samples) {
  if (samples.empty()) throw Error("ccdf of an empty sample");
  std::vector<std::uint64_t> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<CcdfPoint> out;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i == 0 || sorted[i] != sorted[i - 1])
      out.push_back({sorted[i], static_cast<double>(sorted.size() - i) / n});
  }
  return out;
}

/// Hurwitz zeta function sum_{k>=0} (q + k)^(-s) for s > 1, q > 0, via
/// Euler-Maclaurin summation.
inline double hurwitz_zeta(double s, double q) {
  if (!(s > 1.0) || !(q > 0.0)) throw Error("hurwitz_zeta requires s > 1 and q > 0");
  // B_{2j} / (2j)!
  static constexpr double kCoeff[] = {
      1.0 / 12.0,           -1.0 / 720.0,          1.0 / 30240.0,          -1.0 / 1209600.0,
      1.0 / 47900160.0,     -691.0 / 1307674368000.0, 1.0 / 74724249600.0, -3617.0 / 10670622842880000.0,
  };
  const auto terms = static_cast<std::size_t>(20.0 + std::ceil(s));
  double sum = 0.0;
  for (std::size_t k = 0; k < terms; ++k) sum += std::pow(q + static_cast<double>(k), -s);
  const double a = q + static_cast<double>(terms);
  sum += std::pow(a, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(a, -s);
  // Tail terms: coeff_j * s(s+1)...(s+2j-2) * a^(-s-2j+1)
  double rising = s;
  double apow = std::pow(a, -s - 1.0);
  for (std::size_t j = 0; j < std::size(kCoeff); ++j) {
    sum += kCoeff[j] * rising * apow;
    rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
    apow /= a * a;
  }
  return sum;
}

struct PowerLawFit {
  double beta = 0.0;
  std::uint64_t xmin = 0;
  double ks = 1.0;
  std::size_t n_tail = 0;
};

struct PowerLawOptions {
  std::size_t min_tail = 10;
  double beta_lo = 1.01;
  double beta_hi = 40.0;
};

namespace detail {

struct TailFit {
  double beta;
  double ks;
};

// Discrete MLE on samples >= xmin (sorted ascending), then the KS distance
// between the empirical and the fitted CCDF over the tail.
inline TailFit fit_tail(std::span<const std::uint64_t> tail, const PowerLawOptions& opts) {
  const double n = static_cast<double>(tail.size());
  const double xmin = static_cast<double>(tail.front());
  double sum_log = 0.0;
  for (auto x : tail) sum_log += std::log(static_cast<double>(x));
  auto neg_loglik = [&](double beta) { return n * std::log(hurwitz_zeta(beta, xmin)) + beta * sum_log; };
  auto [beta, value] = boost::math::tools::brent_find_minima(neg_loglik, opts.beta_lo, opts.beta_hi, 40);
  (void)value;

  const double z0 = hurwitz_zeta(beta, xmin);
  auto model_ccdf = [&](double x) { return hurwitz_zeta(beta, x) / z0; };
  double ks = 0.0;
  for (std::size_t i = 0; i < tail.size();) {
    std::size_t j = i;
    while (j < tail.size() && tail[j] == tail[i]) ++j;
    const double v = static_cast<double>(tail[i]);
    ks = std::max(ks, std::abs(static_cast<double>(tail.size() - i) / n - model_ccdf(v)));
    // Between this value and the next observed one the empirical CCDF is flat.
    const double after = static_cast<double>(tail.size() - j) / n;
    const bool gap = j == tail.size() || static_cast<double>(tail[j]) > v + 1.0;
    if (gap) ks = std::max(ks, std::abs(after - model_ccdf(v + 1.0)));
    i = j;
  }
  return {beta, ks};
}

}  // namespace detail

/// Discrete power-law fit. Every distinct value whose tail has at least
/// `min_tail` samples and two distinct values is tried as xmin; the fit with
/// the smallest KS distance wins (ties: smaller xmin).
inline PowerLawFit fit_power_law(std::span<const std::uint64_t> samples, const PowerLawOptions& opts = {}) {
  if (samples.empty()) throw Error("power-law fit of an empty sample");
  std::vector<std::uint64_t> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == 0) throw Error("power-law fit requires positive samples");

  std::optional<PowerLawFit> best;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i > 0 && sorted[i] == sorted[i - 1]) continue;
    const std::size_t n_tail = sorted.size() - i;
    if (n_tail < opts.min_tail || sorted.back() == sorted[i]) break;
    auto tail = std::span<const std::uint64_t>(sorted).subspan(i);
    auto fit = detail::fit_tail(tail, opts);
    if (!best || fit.ks < best->ks) best = PowerLawFit{fit.beta, sorted[i], fit.ks, n_tail};
  }
  if (!best) throw Error("no tail: power-law fit needs at least two distinct values in a large enough tail");
  return *best;
}

/// Simple bipartite graph; left nodes are stations, right nodes connections
/// when built from an instance.
struct BipartiteGraph {
  std::size_t left = 0;
  std::size_t right = 0;
  std::vector<std::vector<std::uint32_t>> left_adj;   // sorted
  std::vector<std::vector<std::uint32_t>> right_adj;  // sorted

  static BipartiteGraph from_edges(std::size_t left, std::size_t right,
                                   const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    BipartiteGraph g;
    g.left = left;
    g.right = right;
    g.left_adj.assign(left, {});
    g.right_adj.assign(right, {});
    for (auto [l, r] : edges) {
      if (l >= left || r >= right) throw Error("bipartite edge out of range");
      g.left_adj[l].push_back(r);
      g.right_adj[r].push_back(l);
    }
    for (auto* side : {&g.left_adj, &g.right_adj})
      for (auto& a : *side) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
      }
    return g;
  }

  std::size_t edge_count() const {
    std::size_t e = 0;
    for (const auto& a : left_adj) e += a.size();
    return e;
  }
};

inline BipartiteGraph incidence_graph(const Instance& inst) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(inst.incidence_count());
  for (std::size_t c = 0; c < inst.connection_count(); ++c)
    for (StationId s : inst.connection(c)) edges.emplace_back(s, static_cast<std::uint32_t>(c));
  return BipartiteGraph::from_edges(inst.station_count(), inst.connection_count(), edges);
}

/// Iteratively drops nodes of degree at most one on both sides.
inline BipartiteGraph bipartite_two_core(const BipartiteGraph& g) {
  const std::size_t total = g.left + g.right;
  auto adj = [&](std::size_t v) -> const std::vector<std::uint32_t>& {
    return v < g.left ? g.left_adj[v] : g.right_adj[v - g.left];
  };
  auto global = [&](std::size_t v, std::uint32_t u) { return v < g.left ? g.left + u : static_cast<std::size_t>(u); };
  std::vector<std::size_t> deg(total);
  std::vector<char> removed(total, 0);
  std::vector<std::size_t> stack;
  for (std::size_t v = 0; v < total; ++v) {
    deg[v] = adj(v).size();
    if (deg[v] <= 1) {
      removed[v] = 1;
      stack.push_back(v);
    }
  }
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto u : adj(v)) {
      auto w = global(v, u);
      if (removed[w]) continue;
      if (--deg[w] <= 1) {
        removed[w] = 1;
        stack.push_back(w);
      }
    }
  }
  std::vector<std::uint32_t> lmap(g.left, UINT32_MAX), rmap(g.right, UINT32_MAX);
  std::uint32_t nl = 0, nr = 0;
  for (std::size_t v = 0; v < g.left; ++v)
    if (!removed[v]) lmap[v] = nl++;
  for (std::size_t v = 0; v < g.right; ++v)
    if (!removed[g.left + v]) rmap[v] = nr++;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::size_t l = 0; l < g.left; ++l) {
    if (lmap[l] == UINT32_MAX) continue;
    for (auto r : g.left_adj[l])
      if (rmap[r] != UINT32_MAX) edges.emplace_back(lmap[l], rmap[r]);
  }
  return BipartiteGraph::from_edges(nl, nr, edges);
}

struct PathCycleCounts {
  std::uint64_t paths3 = 0;   // paths with three edges
  std::uint64_t cycles4 = 0;  // cycles with four edges
};

/// 3-paths as sum over edges (l, r) of (deg l - 1)(deg r - 1); 4-cycles as
/// sum over same-side node pairs of C(common neighbours, 2), wedging through
/// whichever side is cheaper.
inline PathCycleCounts count_paths_and_cycles(const BipartiteGraph& g) {
  PathCycleCounts out;
  for (std::size_t l = 0; l < g.left; ++l) {
    const auto dl = g.left_adj[l].size();
    if (dl == 0) continue;
    for (auto r : g.left_adj[l]) out.paths3 += (dl - 1) * (g.right_adj[r].size() - 1);
  }

  std::uint64_t cost_left = 0, cost_right = 0;
  for (const auto& a : g.left_adj) cost_left += a.size() * a.size();
  for (const auto& a : g.right_adj) cost_right += a.size() * a.size();
  // Pair endpoints live on `ends`; wedges pass through `mids`.
  const auto& ends = cost_left <= cost_right ? g.right_adj : g.left_adj;
  const auto& mids = cost_left <= cost_right ? g.left_adj : g.right_adj;

  std::vector<std::uint64_t> common(ends.size(), 0);
  std::vector<std::uint32_t> touched;
  for (std::uint32_t y1 = 0; y1 < ends.size(); ++y1) {
    for (auto x : ends[y1]) {
      for (auto y2 : mids[x]) {
        if (y2 <= y1) continue;
        if (common[y2]++ == 0) touched.push_back(y2);
      }
    }
    for (auto y2 : touched) {
      out.cycles4 += common[y2] * (common[y2] - 1) / 2;
      common[y2] = 0;
    }
    touched.clear();
  }
  return out;
}

struct Clustering {
  double kappa = 0.0;
  bool defined = false;  // false when the 2-core has no 3-path
  PathCycleCounts counts;
};

/// Bipartite clustering coefficient 4 * #C4 / #P3 on the 2-core of the
/// station-connection incidence graph.
inline Clustering bipartite_clustering(const Instance& inst) {
  Clustering c;
  c.counts = count_paths_and_cycles(bipartite_two_core(incidence_graph(inst)));
  if (c.counts.paths3 == 0) return c;
  c.defined = true;
  c.kappa = 4.0 * static_cast<double>(c.counts.cycles4) / static_cast<double>(c.counts.paths3);
  return c;
}

/// One row in the column order: |S|, |S|/|C|, delta_S, beta, KS, kappa,
/// relative 2-core size, relative core complexity.
struct MetricsReport {
  std::size_t stations = 0;
  double ratio = 0.0;
  double delta_S = 0.0;
  std::optional<PowerLawFit> fit;  // empty when the degrees have no usable tail
  double kappa = 0.0;
  bool kappa_defined = false;
  double two_core_fraction = 0.0;
  double core_fraction = 0.0;
};

inline std::vector<std::uint64_t> positive_station_degrees(const Instance& inst) {
  std::vector<std::uint64_t> out;
  for (StationId s = 0; s < inst.station_count(); ++s)
    if (inst.degree(s) > 0) out.push_back(inst.degree(s));
  return out;
}

inline MetricsReport metrics_report(const Instance& inst, const ReductionReport& reduction) {
  MetricsReport r;
  auto st = degree_stats(inst);
  r.stations = inst.station_count();
  r.ratio = st.ratio;
  r.delta_S = st.delta_S;
  auto degrees = positive_station_degrees(inst);
  if (!degrees.empty()) {
    try {
      r.fit = fit_power_law(degrees);
    } catch (const Error&) {
      r.fit.reset();
    }
  }
  auto cl = bipartite_clustering(inst);
  r.kappa = cl.kappa;
  r.kappa_defined = cl.defined;
  r.two_core_fraction = reduction.relative_two_core_size.value_or(relative_two_core_size(inst));
  r.core_fraction = reduction.relative_core_complexity;
  return r;
}

inline MetricsReport metrics_report(const Instance& inst) { return metrics_report(inst, reduce_to_core(inst)); }

inline std::string metrics_csv_header() { return "n_stations,ratio,delta_s,beta_hat,ks,kappa,two_core_frac,core_frac"; }

inline std::string metrics_csv_row(const MetricsReport& r) {
  auto opt = [](std::optional<double> v) { return v ? fmt::format("{:.6g}", *v) : std::string("nan"); };
  return fmt::format("{},{:.6g},{:.6g},{},{},{:.6g},{:.6g},{:.6g}", r.stations, r.ratio, r.delta_S,
                     opt(r.fit ? std::optional<double>(r.fit->beta) : std::nullopt),
                     opt(r.fit ? std::optional<double>(r.fit->ks) : std::nullopt), r.kappa, r.two_core_fraction,
                     r.core_fraction);
}

}  // namespace stationcover
