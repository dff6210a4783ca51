#pragma once

// Station cover / hitting set instances: stations, ordered connections,
// components, degree statistics and the HSD text format.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace stationcover {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using StationId = std::uint32_t;
using Connection = std::vector<StationId>;
using TokenSequence = std::vector<std::string>;

namespace detail {

inline void validate_token(std::string_view token) {
  if (token.empty()) throw Error("empty station token");
  for (char ch : token) {
    if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\v' || ch == '\f')
      throw Error("station token contains whitespace: '" + std::string(token) + "'");
  }
  if (token.front() == '#') throw Error("station token starts with '#': '" + std::string(token) + "'");
}

class DisjointSets {
public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

}  // namespace detail

/// A network of stations and connections. Station ids are positions in the
/// sorted token list, so id order is token order. Immutable once built.
class Instance {
public:
  Instance() = default;

  /// Trusted constructor from sorted unique tokens and id-based connections.
  /// Repeated stations inside a connection collapse to their first occurrence.
  static Instance from_ids(std::vector<std::string> sorted_tokens, std::vector<Connection> connections) {
    Instance inst;
    inst.tokens_ = std::move(sorted_tokens);
    for (std::size_t i = 1; i < inst.tokens_.size(); ++i) {
      if (!(inst.tokens_[i - 1] < inst.tokens_[i])) throw Error("station tokens must be sorted and unique");
    }
    const auto n = inst.tokens_.size();
    std::vector<char> seen(n, 0);
    inst.connections_.reserve(connections.size());
    for (auto& conn : connections) {
      if (conn.empty()) throw Error("empty connection");
      Connection dedup;
      dedup.reserve(conn.size());
      for (StationId s : conn) {
        if (s >= n) throw Error("connection references unknown station id");
        if (!seen[s]) {
          seen[s] = 1;
          dedup.push_back(s);
        }
      }
      for (StationId s : dedup) seen[s] = 0;
      inst.connections_.push_back(std::move(dedup));
    }
    inst.build_incidence();
    return inst;
  }

  std::size_t station_count() const { return tokens_.size(); }
  std::size_t connection_count() const { return connections_.size(); }
  bool empty() const { return tokens_.empty(); }

  const std::string& token(StationId s) const { return tokens_.at(s); }
  std::span<const std::string> tokens() const { return tokens_; }

  const Connection& connection(std::size_t c) const { return connections_.at(c); }
  std::span<const Connection> connections() const { return connections_; }

  /// Connection indices containing station `s`, ascending.
  std::span<const std::uint32_t> incidence(StationId s) const { return incidence_.at(s); }
  std::size_t degree(StationId s) const { return incidence_.at(s).size(); }

  std::optional<StationId> find(std::string_view token) const {
    auto it = std::lower_bound(tokens_.begin(), tokens_.end(), token);
    if (it == tokens_.end() || *it != token) return std::nullopt;
    return static_cast<StationId>(it - tokens_.begin());
  }

  StationId id_of(std::string_view token) const {
    auto id = find(token);
    if (!id) throw Error("unknown station '" + std::string(token) + "'");
    return *id;
  }

  /// Number of (station, connection) incidence pairs.
  std::size_t incidence_count() const {
    std::size_t total = 0;
    for (const auto& c : connections_) total += c.size();
    return total;
  }

  TokenSequence connection_tokens(std::size_t c) const {
    TokenSequence out;
    for (StationId s : connection(c)) out.push_back(tokens_[s]);
    return out;
  }

  /// Sub-instance on the given stations and connections (connections must only
  /// use the given stations). Station ids are re-indexed.
  Instance subinstance(std::span<const StationId> stations, std::span<const std::size_t> conns) const {
    std::vector<StationId> sorted(stations.begin(), stations.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<StationId> remap(tokens_.size(), UINT32_MAX);
    std::vector<std::string> toks;
    toks.reserve(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      remap[sorted[i]] = static_cast<StationId>(i);
      toks.push_back(tokens_[sorted[i]]);
    }
    std::vector<Connection> out;
    out.reserve(conns.size());
    for (std::size_t c : conns) {
      Connection mapped;
      for (StationId s : connections_.at(c)) {
        if (remap[s] == UINT32_MAX) throw Error("sub-instance connection leaves the station subset");
        mapped.push_back(remap[s]);
      }
      out.push_back(std::move(mapped));
    }
    return from_ids(std::move(toks), std::move(out));
  }

private:
  void build_incidence() {
    incidence_.assign(tokens_.size(), {});
    for (std::size_t c = 0; c < connections_.size(); ++c)
      for (StationId s : connections_[c]) incidence_[s].push_back(static_cast<std::uint32_t>(c));
  }

  std::vector<std::string> tokens_;
  std::vector<Connection> connections_;
  std::vector<std::vector<std::uint32_t>> incidence_;
};

/// Builds an instance whose station set is the union of the connections.
inline Instance build_instance(const std::vector<TokenSequence>& connections) {
  std::vector<std::string> toks;
  for (const auto& conn : connections) {
    if (conn.empty()) throw Error("empty connection");
    for (const auto& t : conn) {
      detail::validate_token(t);
      toks.push_back(t);
    }
  }
  std::sort(toks.begin(), toks.end());
  toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
  std::vector<Connection> ids;
  ids.reserve(connections.size());
  for (const auto& conn : connections) {
    Connection c;
    c.reserve(conn.size());
    for (const auto& t : conn)
      c.push_back(static_cast<StationId>(std::lower_bound(toks.begin(), toks.end(), t) - toks.begin()));
    ids.push_back(std::move(c));
  }
  return Instance::from_ids(std::move(toks), std::move(ids));
}

/// Builds an instance with an explicit station set; connections may only use
/// listed stations. Listed stations need not appear in any connection.
inline Instance build_instance(std::vector<std::string> stations, const std::vector<TokenSequence>& connections) {
  for (const auto& t : stations) detail::validate_token(t);
  std::sort(stations.begin(), stations.end());
  stations.erase(std::unique(stations.begin(), stations.end()), stations.end());
  std::vector<Connection> ids;
  ids.reserve(connections.size());
  for (const auto& conn : connections) {
    if (conn.empty()) throw Error("empty connection");
    Connection c;
    c.reserve(conn.size());
    for (const auto& t : conn) {
      auto it = std::lower_bound(stations.begin(), stations.end(), t);
      if (it == stations.end() || *it != t) throw Error("connection references unknown station '" + t + "'");
      c.push_back(static_cast<StationId>(it - stations.begin()));
    }
    ids.push_back(std::move(c));
  }
  return Instance::from_ids(std::move(stations), std::move(ids));
}

/// Maximal connected sub-instances, largest first (ties: smallest token).
/// Stations in no connection form singleton components.
inline std::vector<Instance> connected_components(const Instance& inst) {
  const auto n = inst.station_count();
  detail::DisjointSets sets(n);
  for (const auto& conn : inst.connections())
    for (std::size_t i = 1; i < conn.size(); ++i) sets.unite(conn[0], conn[i]);

  std::unordered_map<std::size_t, std::size_t> index_of_root;
  std::vector<std::vector<StationId>> members;
  for (StationId s = 0; s < n; ++s) {
    auto [it, inserted] = index_of_root.try_emplace(sets.find(s), members.size());
    if (inserted) members.emplace_back();
    members[it->second].push_back(s);  // ascending, so front() is the smallest token
  }
  std::vector<std::vector<std::size_t>> conns(members.size());
  for (std::size_t c = 0; c < inst.connection_count(); ++c)
    conns[index_of_root.at(sets.find(inst.connection(c).front()))].push_back(c);

  std::vector<std::size_t> order(members.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (members[a].size() != members[b].size()) return members[a].size() > members[b].size();
    return members[a].front() < members[b].front();
  });

  std::vector<Instance> out;
  out.reserve(order.size());
  for (std::size_t k : order) out.push_back(inst.subinstance(members[k], conns[k]));
  return out;
}

inline Instance largest_component(const Instance& inst) {
  if (inst.empty()) throw Error("largest component of an empty instance");
  auto parts = connected_components(inst);
  return std::move(parts.front());
}

struct DegreeStats {
  std::vector<std::size_t> station_degrees;     // indexed by StationId
  std::vector<std::size_t> connection_degrees;  // indexed by connection
  double delta_S = 0.0;
  double delta_C = 0.0;
  double ratio = 0.0;  // |S| / |C|
};

inline DegreeStats degree_stats(const Instance& inst) {
  if (inst.empty()) throw Error("degree statistics of an empty instance");
  DegreeStats st;
  st.station_degrees.resize(inst.station_count());
  for (StationId s = 0; s < inst.station_count(); ++s) st.station_degrees[s] = inst.degree(s);
  for (const auto& c : inst.connections()) st.connection_degrees.push_back(c.size());
  const double pairs = static_cast<double>(inst.incidence_count());
  const double ns = static_cast<double>(inst.station_count());
  const double nc = static_cast<double>(inst.connection_count());
  st.delta_S = pairs / ns;
  st.delta_C = nc > 0 ? pairs / nc : 0.0;
  st.ratio = nc > 0 ? ns / nc : std::numeric_limits<double>::infinity();
  return st;
}

// HSD format: one connection per line, whitespace-separated tokens in sequence
// order, '#' comment lines. Stations that belong to no connection are written
// on a "#@stations" line, which plain readers skip as a comment.

inline constexpr std::string_view kStationsDirective = "#@stations";

inline Instance read_hsd(std::string_view text) {
  std::vector<TokenSequence> conns;
  std::vector<std::string> extra;
  bool explicit_stations = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    auto first = line.find_first_not_of(" \t");
    if (first != std::string_view::npos && line[first] == '#') {
      auto body = line.substr(first);
      if (body.substr(0, kStationsDirective.size()) == kStationsDirective &&
          (body.size() == kStationsDirective.size() || body[kStationsDirective.size()] == ' ' ||
           body[kStationsDirective.size()] == '\t')) {
        explicit_stations = true;
        std::istringstream is{std::string(body.substr(kStationsDirective.size()))};
        for (std::string t; is >> t;) extra.push_back(t);
      }
      continue;
    }
    std::istringstream is{std::string(line)};
    TokenSequence conn;
    for (std::string t; is >> t;) conn.push_back(std::move(t));
    if (conn.empty()) throw Error("hsd line " + std::to_string(line_no) + ": empty connection");
    conns.push_back(std::move(conn));
  }
  if (!explicit_stations) return build_instance(conns);
  for (const auto& c : conns) extra.insert(extra.end(), c.begin(), c.end());
  return build_instance(std::move(extra), conns);
}

inline std::string write_hsd(const Instance& inst) {
  std::string out;
  std::vector<std::string_view> isolated;
  for (StationId s = 0; s < inst.station_count(); ++s)
    if (inst.degree(s) == 0) isolated.push_back(inst.token(s));
  if (!isolated.empty()) {
    out += kStationsDirective;
    for (auto t : isolated) {
      out += ' ';
      out += t;
    }
    out += '\n';
  }
  for (const auto& conn : inst.connections()) {
    for (std::size_t i = 0; i < conn.size(); ++i) {
      if (i) out += ' ';
      out += inst.token(conn[i]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace stationcover
