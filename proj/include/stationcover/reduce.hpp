#pragma once

// Station and connection dominance applied to a fixpoint.
//
// s1 dominates s2 when every connection containing s2 also contains s1;
// c1 dominates c2 when c1 is a subset of c2. Dominated elements are removed
// until neither rule applies. The remaining instance is the core.

#include "stationcover/model.hpp"

#include <boost/dynamic_bitset.hpp>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace stationcover {

struct StationRemoval {
  StationId station;  // ids refer to the input instance
  StationId witness;
};

struct ConnectionRemoval {
  std::size_t connection;  // indices refer to the input instance
  std::size_t witness;
};

struct ReductionReport {
  Instance core;
  std::vector<StationId> core_station_origin;       // core station -> input station
  std::vector<std::size_t> core_connection_origin;  // core connection -> input connection
  std::vector<StationRemoval> removed_stations;
  std::vector<ConnectionRemoval> removed_connections;
  std::size_t input_station_count = 0;
  std::size_t complexity = 0;  // largest core component, in stations
  double relative_core_complexity = 0.0;
  std::optional<double> relative_two_core_size;  // filled in by graphview
};

struct ReduceOptions {
  /// When set, each pass visits elements in a seeded random order and mutual
  /// dominance removes whichever element is visited first. Used to check that
  /// the core size does not depend on the removal order.
  std::optional<std::uint64_t> shuffle_seed;
};

struct ComplexityStats {
  std::size_t complexity = 0;
  double relative = 0.0;
};

/// Complexity of a core: the largest component's station count, and the core
/// station count relative to `input_station_count`.
inline ComplexityStats complexity_stats(const Instance& core, std::size_t input_station_count) {
  ComplexityStats st;
  if (core.empty()) return st;
  st.complexity = connected_components(core).front().station_count();
  st.relative = input_station_count ? static_cast<double>(core.station_count()) / static_cast<double>(input_station_count) : 0.0;
  return st;
}

namespace detail {

class Reducer {
public:
  Reducer(const Instance& inst, const ReduceOptions& opts)
      : inst_(inst),
        n_(inst.station_count()),
        m_(inst.connection_count()),
        station_alive_(n_, 1),
        conn_alive_(m_, 1),
        members_(inst.connections().begin(), inst.connections().end()),
        conn_bits_(m_, boost::dynamic_bitset<>(n_)),
        station_conns_(n_),
        stamp_(m_, 0),
        random_(opts.shuffle_seed.has_value()),
        rng_(opts.shuffle_seed.value_or(0)) {
    for (std::size_t c = 0; c < m_; ++c)
      for (StationId s : members_[c]) conn_bits_[c].set(s);
    for (StationId s = 0; s < n_; ++s) {
      auto inc = inst.incidence(s);
      station_conns_[s].assign(inc.begin(), inc.end());
    }
    alive_stations_ = n_;
  }

  ReductionReport run() {
    bool station_first = !random_ || (rng_() & 1u);
    int idle_passes = 0;
    bool stations_turn = station_first;
    while (idle_passes < 2) {
      bool changed = stations_turn ? station_pass() : connection_pass();
      idle_passes = changed ? 0 : idle_passes + 1;
      stations_turn = !stations_turn;
    }
    return finish();
  }

private:
  std::vector<std::size_t> visit_order(std::size_t count) {
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (random_) std::shuffle(order.begin(), order.end(), rng_);
    return order;
  }

  bool station_pass() {
    bool changed = false;
    for (std::size_t idx : visit_order(n_)) {
      auto s2 = static_cast<StationId>(idx);
      if (!station_alive_[s2] || alive_stations_ < 2) continue;
      if (auto w = station_dominator(s2)) {
        remove_station(s2, *w);
        changed = true;
      }
    }
    return changed;
  }

  // Smallest-token station that may replace s2, if any.
  std::optional<StationId> station_dominator(StationId s2) const {
    const auto& conns = station_conns_[s2];
    if (conns.empty()) {
      // Vacuously dominated by every other station. A strict dominator has
      // positive degree; among isolated stations the smallest token survives.
      std::optional<StationId> isolated_peer;
      for (StationId s1 = 0; s1 < n_; ++s1) {
        if (s1 == s2 || !station_alive_[s1]) continue;
        if (!station_conns_[s1].empty()) return s1;
        if (!isolated_peer && (random_ || s1 < s2)) isolated_peer = s1;
      }
      return isolated_peer;
    }
    std::size_t pivot = conns.front();
    for (auto c : conns)
      if (members_[c].size() < members_[pivot].size()) pivot = c;

    std::optional<StationId> best;
    const auto deg2 = conns.size();
    for (StationId s1 : members_[pivot]) {
      if (s1 == s2 || station_conns_[s1].size() < deg2) continue;
      if (best && s1 > *best) continue;
      bool subset = true;
      for (auto c : conns) {
        if (!conn_bits_[c].test(s1)) {
          subset = false;
          break;
        }
      }
      if (!subset) continue;
      bool strict = station_conns_[s1].size() > deg2;
      if (strict || random_ || s1 < s2) best = s1;
    }
    return best;
  }

  void remove_station(StationId s2, StationId witness) {
    station_alive_[s2] = 0;
    --alive_stations_;
    for (auto c : station_conns_[s2]) {
      auto& mem = members_[c];
      mem.erase(std::find(mem.begin(), mem.end(), s2));
      conn_bits_[c].reset(s2);
    }
    station_conns_[s2].clear();
    removed_stations_.push_back({s2, witness});
  }

  bool connection_pass() {
    bool changed = false;
    for (std::size_t c2 : visit_order(m_)) {
      if (!conn_alive_[c2]) continue;
      if (auto w = connection_dominator(c2)) {
        remove_connection(c2, *w);
        changed = true;
      }
    }
    return changed;
  }

  // Smallest-index connection contained in c2, if any.
  std::optional<std::size_t> connection_dominator(std::size_t c2) {
    ++epoch_;
    std::optional<std::size_t> best;
    const auto size2 = members_[c2].size();
    const auto& bits2 = conn_bits_[c2];
    for (StationId s : members_[c2]) {
      for (auto c1 : station_conns_[s]) {
        if (c1 == c2 || stamp_[c1] == epoch_) continue;
        stamp_[c1] = epoch_;
        if (members_[c1].size() > size2) continue;
        if (best && c1 > *best) continue;
        bool subset = std::all_of(members_[c1].begin(), members_[c1].end(), [&](StationId x) { return bits2.test(x); });
        if (!subset) continue;
        bool strict = members_[c1].size() < size2;
        if (strict || random_ || c1 < c2) best = c1;
      }
    }
    return best;
  }

  void remove_connection(std::size_t c2, std::size_t witness) {
    conn_alive_[c2] = 0;
    for (StationId s : members_[c2]) {
      auto& lst = station_conns_[s];
      lst.erase(std::find(lst.begin(), lst.end(), static_cast<std::uint32_t>(c2)));
    }
    removed_connections_.push_back({c2, witness});
  }

  ReductionReport finish() {
    ReductionReport rep;
    rep.input_station_count = n_;
    std::vector<StationId> remap(n_, UINT32_MAX);
    std::vector<std::string> toks;
    for (StationId s = 0; s < n_; ++s) {
      if (!station_alive_[s]) continue;
      remap[s] = static_cast<StationId>(toks.size());
      toks.push_back(inst_.token(s));
      rep.core_station_origin.push_back(s);
    }
    std::vector<Connection> conns;
    for (std::size_t c = 0; c < m_; ++c) {
      if (!conn_alive_[c]) continue;
      Connection mapped;
      mapped.reserve(members_[c].size());
      for (StationId s : members_[c]) mapped.push_back(remap[s]);
      conns.push_back(std::move(mapped));
      rep.core_connection_origin.push_back(c);
    }
    rep.core = Instance::from_ids(std::move(toks), std::move(conns));
    rep.removed_stations = std::move(removed_stations_);
    rep.removed_connections = std::move(removed_connections_);
    auto st = complexity_stats(rep.core, n_);
    rep.complexity = st.complexity;
    rep.relative_core_complexity = st.relative;
    return rep;
  }

  const Instance& inst_;
  std::size_t n_;
  std::size_t m_;
  std::vector<char> station_alive_;
  std::vector<char> conn_alive_;
  std::vector<Connection> members_;                   // surviving stations, sequence order
  std::vector<boost::dynamic_bitset<>> conn_bits_;    // connection -> station set
  std::vector<std::vector<std::uint32_t>> station_conns_;  // station -> surviving connections
  std::vector<std::uint64_t> stamp_;
  std::uint64_t epoch_ = 0;
  std::size_t alive_stations_ = 0;
  bool random_;
  std::mt19937_64 rng_;
  std::vector<StationRemoval> removed_stations_;
  std::vector<ConnectionRemoval> removed_connections_;
};

}  // namespace detail

/// Reduces `inst` to its core. Deterministic unless a shuffle seed is given;
/// mutual dominance then keeps the smaller token (or connection index).
inline ReductionReport reduce_to_core(const Instance& inst, const ReduceOptions& opts = {}) {
  return detail::Reducer(inst, opts).run();
}

}  // namespace stationcover
