#pragma once

// Graph-side view of a network: the station graph G_N (consecutive stations
// of a connection are adjacent), its 2-core, instances built over a given
// graph, and the 3-SAT encoding with its structural witnesses.

#include "stationcover/model.hpp"
#include "stationcover/reduce.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace stationcover {

/// Undirected simple graph over station tokens. Vertex ids follow token order.
class Graph {
public:
  using Vertex = std::uint32_t;
  using Edge = std::pair<Vertex, Vertex>;  // first < second

  Graph() = default;

  static Graph from_edges(std::vector<std::string> vertices,
                          const std::vector<std::pair<std::string, std::string>>& edges) {
    for (const auto& [u, v] : edges) {
      vertices.push_back(u);
      vertices.push_back(v);
    }
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    Graph g;
    g.tokens_ = std::move(vertices);
    g.adj_.assign(g.tokens_.size(), {});
    for (const auto& [u, v] : edges) g.add_edge(*g.find(u), *g.find(v));
    g.finalize();
    return g;
  }

  /// Trusted constructor from sorted tokens and id edges; parallel edges merge.
  static Graph from_ids(std::vector<std::string> sorted_tokens, const std::vector<Edge>& edges) {
    Graph g;
    g.tokens_ = std::move(sorted_tokens);
    g.adj_.assign(g.tokens_.size(), {});
    for (auto [u, v] : edges) g.add_edge(u, v);
    g.finalize();
    return g;
  }

  std::size_t vertex_count() const { return tokens_.size(); }
  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& a : adj_) twice += a.size();
    return twice / 2;
  }
  const std::string& token(Vertex v) const { return tokens_.at(v); }
  std::span<const std::string> tokens() const { return tokens_; }
  std::span<const Vertex> neighbors(Vertex v) const { return adj_.at(v); }
  std::size_t degree(Vertex v) const { return adj_.at(v).size(); }

  std::optional<Vertex> find(std::string_view t) const {
    auto it = std::lower_bound(tokens_.begin(), tokens_.end(), t);
    if (it == tokens_.end() || *it != t) return std::nullopt;
    return static_cast<Vertex>(it - tokens_.begin());
  }

  bool has_edge(Vertex u, Vertex v) const {
    const auto& a = adj_.at(u);
    return std::binary_search(a.begin(), a.end(), v);
  }

  /// Sorted edge list.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (Vertex u = 0; u < adj_.size(); ++u)
      for (Vertex v : adj_[u])
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  /// Edges as token pairs (smaller token first), sorted.
  std::set<std::pair<std::string, std::string>> edge_tokens() const {
    std::set<std::pair<std::string, std::string>> out;
    for (auto [u, v] : edges()) out.emplace(tokens_[u], tokens_[v]);
    return out;
  }

  /// Induced subgraph on `keep` (any order).
  Graph induced(std::vector<Vertex> keep) const {
    std::sort(keep.begin(), keep.end());
    std::vector<Vertex> remap(tokens_.size(), UINT32_MAX);
    std::vector<std::string> toks;
    for (std::size_t i = 0; i < keep.size(); ++i) {
      remap[keep[i]] = static_cast<Vertex>(i);
      toks.push_back(tokens_[keep[i]]);
    }
    std::vector<Edge> es;
    for (auto [u, v] : edges())
      if (remap[u] != UINT32_MAX && remap[v] != UINT32_MAX) es.emplace_back(remap[u], remap[v]);
    return from_ids(std::move(toks), es);
  }

private:
  void add_edge(Vertex u, Vertex v) {
    if (u == v) throw Error("self-loop on '" + tokens_.at(u) + "'");
    adj_.at(u).push_back(v);
    adj_.at(v).push_back(u);
  }
  void finalize() {
    for (auto& a : adj_) {
      std::sort(a.begin(), a.end());
      a.erase(std::unique(a.begin(), a.end()), a.end());
    }
  }

  std::vector<std::string> tokens_;
  std::vector<std::vector<Vertex>> adj_;
};

/// G_N: stations as vertices, an edge for each consecutive pair in a connection.
inline Graph to_graph(const Instance& inst) {
  std::vector<Graph::Edge> es;
  for (const auto& conn : inst.connections())
    for (std::size_t i = 1; i < conn.size(); ++i)
      es.emplace_back(std::min(conn[i - 1], conn[i]), std::max(conn[i - 1], conn[i]));
  return Graph::from_ids(std::vector<std::string>(inst.tokens().begin(), inst.tokens().end()), es);
}

/// Vertices surviving iterative removal of vertices of degree at most one.
inline std::vector<Graph::Vertex> two_core_vertices(const Graph& g) {
  const auto n = g.vertex_count();
  std::vector<std::size_t> deg(n);
  std::vector<char> removed(n, 0);
  std::vector<Graph::Vertex> queue;
  for (Graph::Vertex v = 0; v < n; ++v) {
    deg[v] = g.degree(v);
    if (deg[v] <= 1) {
      removed[v] = 1;
      queue.push_back(v);
    }
  }
  while (!queue.empty()) {
    auto v = queue.back();
    queue.pop_back();
    for (auto u : g.neighbors(v)) {
      if (removed[u]) continue;
      if (--deg[u] <= 1) {
        removed[u] = 1;
        queue.push_back(u);
      }
    }
  }
  std::vector<Graph::Vertex> keep;
  for (Graph::Vertex v = 0; v < n; ++v)
    if (!removed[v]) keep.push_back(v);
  return keep;
}

inline Graph two_core(const Graph& g) { return g.induced(two_core_vertices(g)); }

/// Fraction of stations that lie in the 2-core of G_N.
inline double relative_two_core_size(const Instance& inst) {
  if (inst.empty()) return 0.0;
  return static_cast<double>(two_core_vertices(to_graph(inst)).size()) / static_cast<double>(inst.station_count());
}

inline void annotate_two_core(ReductionReport& report, const Instance& input) {
  report.relative_two_core_size = relative_two_core_size(input);
}

/// Checks that the core sits inside the 2-core of G_N: every station of a
/// core connection with two or more stations is a 2-core vertex, and every
/// core edge {x, y} is realized in the input by a segment of the originating
/// connection made only of 2-core edges. (Removing a dominated station from
/// the middle of a connection joins its neighbours; the segment is the path
/// that the new edge contracts.)
inline bool check_proposition1(const Instance& inst, const ReductionReport& report) {
  const Graph g = to_graph(inst);
  std::vector<char> in_core2(g.vertex_count(), 0);
  for (auto v : two_core_vertices(g)) in_core2[v] = 1;

  const Instance& core = report.core;
  for (std::size_t k = 0; k < core.connection_count(); ++k) {
    const auto& cc = core.connection(k);
    if (cc.size() < 2) continue;
    const auto& original = inst.connection(report.core_connection_origin[k]);
    std::vector<std::size_t> pos;  // position in the original sequence of each core station
    for (StationId s : cc) {
      StationId orig = report.core_station_origin[s];
      if (!in_core2[orig]) return false;
      pos.push_back(static_cast<std::size_t>(std::find(original.begin(), original.end(), orig) - original.begin()));
    }
    for (std::size_t i = 1; i < pos.size(); ++i) {
      if (pos[i] <= pos[i - 1] || pos[i] >= original.size()) return false;
      for (std::size_t p = pos[i - 1]; p < pos[i]; ++p) {
        if (!in_core2[original[p]] || !in_core2[original[p + 1]]) return false;
      }
    }
  }
  return true;
}

inline bool check_proposition1(const Instance& inst) { return check_proposition1(inst, reduce_to_core(inst)); }

namespace detail {

inline std::vector<std::vector<Graph::Vertex>> graph_components(const Graph& g) {
  const auto n = g.vertex_count();
  std::vector<char> seen(n, 0);
  std::vector<std::vector<Graph::Vertex>> comps;
  for (Graph::Vertex r = 0; r < n; ++r) {
    if (seen[r]) continue;
    comps.emplace_back();
    std::deque<Graph::Vertex> q{r};
    seen[r] = 1;
    while (!q.empty()) {
      auto v = q.front();
      q.pop_front();
      comps.back().push_back(v);
      for (auto u : g.neighbors(v))
        if (!seen[u]) {
          seen[u] = 1;
          q.push_back(u);
        }
    }
    std::sort(comps.back().begin(), comps.back().end());
  }
  return comps;
}

inline Instance instance_over(const Graph& g, const std::vector<std::vector<Graph::Vertex>>& paths) {
  std::vector<Connection> conns;
  conns.reserve(paths.size());
  for (const auto& p : paths) conns.emplace_back(p.begin(), p.end());
  return Instance::from_ids(std::vector<std::string>(g.tokens().begin(), g.tokens().end()), std::move(conns));
}

}  // namespace detail

/// Instance over `g` whose connections all pass through one designated
/// station per component (default: the component's smallest token). For each
/// edge {u, v} the connection is a BFS shortest path from the designated
/// station to the nearer endpoint followed by the other endpoint.
inline Instance build_n1(const Graph& g, std::optional<std::string> designated = std::nullopt) {
  std::optional<Graph::Vertex> chosen;
  if (designated) {
    chosen = g.find(*designated);
    if (!chosen) throw Error("designated station '" + *designated + "' is not a vertex");
  }
  const auto n = g.vertex_count();
  std::vector<std::vector<Graph::Vertex>> paths;
  for (const auto& comp : detail::graph_components(g)) {
    Graph::Vertex root = comp.front();
    if (chosen && std::binary_search(comp.begin(), comp.end(), *chosen)) root = *chosen;

    std::vector<std::size_t> dist(n, SIZE_MAX);
    std::vector<Graph::Vertex> parent(n, UINT32_MAX);
    std::deque<Graph::Vertex> q{root};
    dist[root] = 0;
    while (!q.empty()) {
      auto v = q.front();
      q.pop_front();
      for (auto u : g.neighbors(v)) {
        if (dist[u] != SIZE_MAX) continue;
        dist[u] = dist[v] + 1;
        parent[u] = v;
        q.push_back(u);
      }
    }
    for (auto u : comp) {
      for (auto v : g.neighbors(u)) {
        if (u > v) continue;
        auto near = dist[u] <= dist[v] ? u : v;
        auto far = near == u ? v : u;
        std::vector<Graph::Vertex> path;
        for (auto x = near; x != UINT32_MAX; x = parent[x]) path.push_back(x);
        std::reverse(path.begin(), path.end());
        path.push_back(far);
        paths.push_back(std::move(path));
      }
    }
  }
  return detail::instance_over(g, paths);
}

/// Instance over `g` whose core is the 2-core of `g` with one connection per
/// 2-core edge. Every component needs a cycle.
inline Instance build_n2(const Graph& g) {
  const auto n = g.vertex_count();
  std::vector<char> in_core(n, 0);
  for (auto v : two_core_vertices(g)) in_core[v] = 1;
  for (const auto& comp : detail::graph_components(g)) {
    if (std::none_of(comp.begin(), comp.end(), [&](auto v) { return in_core[v] != 0; }))
      throw Error("component of '" + g.token(comp.front()) + "' has an empty 2-core");
  }

  std::vector<std::vector<Graph::Vertex>> paths;
  for (auto [u, v] : g.edges())
    if (in_core[u] && in_core[v]) paths.push_back({u, v});

  // Trees hanging off the 2-core: BFS outward from the 2-core vertices.
  std::vector<Graph::Vertex> toward_core(n, UINT32_MAX);
  std::deque<Graph::Vertex> q;
  std::vector<char> seen(in_core);
  for (Graph::Vertex v = 0; v < n; ++v)
    if (in_core[v]) q.push_back(v);
  while (!q.empty()) {
    auto v = q.front();
    q.pop_front();
    for (auto u : g.neighbors(v)) {
      if (seen[u]) continue;
      seen[u] = 1;
      toward_core[u] = v;
      q.push_back(u);
    }
  }
  for (Graph::Vertex s = 0; s < n; ++s) {
    if (in_core[s]) continue;
    std::vector<Graph::Vertex> path{s};
    while (!in_core[path.back()]) path.push_back(toward_core[path.back()]);
    auto anchor = path.back();
    for (auto r : g.neighbors(anchor)) {
      if (in_core[r]) {
        path.push_back(r);
        break;
      }
    }
    paths.push_back(std::move(path));
  }
  return detail::instance_over(g, paths);
}

struct Literal {
  std::uint32_t variable = 0;  // 1-based
  bool negated = false;
};

struct Formula3Sat {
  std::uint32_t variables = 0;
  std::vector<std::array<Literal, 3>> clauses;
};

inline std::string variable_token(std::uint32_t i) { return "x" + std::to_string(i); }
inline std::string negated_token(std::uint32_t i) { return "~x" + std::to_string(i); }
inline std::string literal_token(Literal l) { return l.negated ? negated_token(l.variable) : variable_token(l.variable); }

/// Parses DIMACS CNF. Every clause must have exactly three literals.
inline Formula3Sat parse_dimacs(std::string_view text) {
  Formula3Sat f;
  bool header = false;
  std::size_t declared = 0;
  std::vector<Literal> pending;
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first) || first == "c" || first[0] == 'c' || first == "%") continue;
    if (first == "p") {
      std::string fmt;
      long nv = -1, nc = -1;
      if (!(ls >> fmt >> nv >> nc) || fmt != "cnf" || nv < 0 || nc < 0)
        throw Error("dimacs line " + std::to_string(line_no) + ": bad problem line");
      f.variables = static_cast<std::uint32_t>(nv);
      declared = static_cast<std::size_t>(nc);
      header = true;
      continue;
    }
    if (!header) throw Error("dimacs line " + std::to_string(line_no) + ": clause before problem line");
    std::istringstream all(line);
    for (long lit; all >> lit;) {
      if (lit == 0) {
        if (pending.size() != 3)
          throw Error("dimacs line " + std::to_string(line_no) + ": clause with " + std::to_string(pending.size()) +
                      " literals, expected 3");
        f.clauses.push_back({pending[0], pending[1], pending[2]});
        pending.clear();
        continue;
      }
      auto var = static_cast<std::uint32_t>(lit < 0 ? -lit : lit);
      if (var > f.variables) throw Error("dimacs line " + std::to_string(line_no) + ": variable out of range");
      pending.push_back({var, lit < 0});
    }
    if (!all.eof()) throw Error("dimacs line " + std::to_string(line_no) + ": malformed literal");
  }
  if (!pending.empty()) throw Error("dimacs: unterminated clause");
  if (header && f.clauses.size() != declared) throw Error("dimacs: clause count does not match problem line");
  if (!header) throw Error("dimacs: missing problem line");
  return f;
}

struct SatEncoding {
  Instance instance;
  Graph graph;
};

/// Station cover instance with optimum equal to the variable count exactly
/// when the formula is satisfiable. Stations: x_i, ~x_i, z0, z1. Connections:
/// (x_i, ~x_i) per variable and (a, z0, b, z1, c) per clause.
inline SatEncoding encode_3sat(const Formula3Sat& f) {
  std::vector<std::string> stations{"z0", "z1"};
  std::vector<TokenSequence> conns;
  for (std::uint32_t i = 1; i <= f.variables; ++i) {
    stations.push_back(variable_token(i));
    stations.push_back(negated_token(i));
    conns.push_back({variable_token(i), negated_token(i)});
  }
  for (const auto& cl : f.clauses) {
    for (const auto& l : cl)
      if (l.variable < 1 || l.variable > f.variables) throw Error("literal variable out of range");
    conns.push_back({literal_token(cl[0]), "z0", literal_token(cl[1]), "z1", literal_token(cl[2])});
  }
  SatEncoding enc{build_instance(std::move(stations), conns), {}};
  enc.graph = to_graph(enc.instance);
  return enc;
}

struct TreeDecomposition {
  std::vector<std::vector<std::string>> bags;
  std::vector<std::pair<std::size_t, std::size_t>> tree_edges;

  std::size_t width() const {
    std::size_t w = 0;
    for (const auto& b : bags) w = std::max(w, b.size());
    return w == 0 ? 0 : w - 1;
  }
};

/// Vertex coverage, edge coverage, and connected occurrence over a tree of bags.
inline bool is_valid_tree_decomposition(const Graph& g, const TreeDecomposition& td) {
  const auto k = td.bags.size();
  if (k == 0) return g.vertex_count() == 0;
  if (td.tree_edges.size() != k - 1) return false;
  detail::DisjointSets tree(k);
  for (auto [a, b] : td.tree_edges) {
    if (a >= k || b >= k || !tree.unite(a, b)) return false;
  }

  std::vector<std::vector<std::size_t>> holding(g.vertex_count());
  std::vector<std::vector<Graph::Vertex>> bag_ids(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (const auto& t : td.bags[i]) {
      auto v = g.find(t);
      if (!v) return false;
      bag_ids[i].push_back(*v);
      holding[*v].push_back(i);
    }
    std::sort(bag_ids[i].begin(), bag_ids[i].end());
  }
  for (const auto& h : holding)
    if (h.empty()) return false;
  for (auto [u, v] : g.edges()) {
    bool covered = std::any_of(holding[u].begin(), holding[u].end(),
                               [&](std::size_t i) { return std::binary_search(bag_ids[i].begin(), bag_ids[i].end(), v); });
    if (!covered) return false;
  }
  // Bags holding a vertex must induce a connected subtree: with h bags in a
  // forest, that means exactly h - 1 tree edges among them.
  for (Graph::Vertex v = 0; v < g.vertex_count(); ++v) {
    std::vector<char> has(k, 0);
    for (auto i : holding[v]) has[i] = 1;
    std::size_t inner = 0;
    for (auto [a, b] : td.tree_edges) inner += (has[a] && has[b]) ? 1 : 0;
    if (inner + 1 != holding[v].size()) return false;
  }
  return true;
}

/// True when deleting `removed` leaves a forest.
inline bool is_forest_without(const Graph& g, const std::vector<std::string>& removed) {
  std::vector<char> gone(g.vertex_count(), 0);
  for (const auto& t : removed)
    if (auto v = g.find(t)) gone[*v] = 1;
  detail::DisjointSets sets(g.vertex_count());
  for (auto [u, v] : g.edges()) {
    if (gone[u] || gone[v]) continue;
    if (!sets.unite(u, v)) return false;
  }
  return true;
}

/// The path decomposition with one bag {x_i, ~x_i, z0, z1} per variable.
inline TreeDecomposition sat_path_decomposition(std::uint32_t variables) {
  TreeDecomposition td;
  for (std::uint32_t i = 1; i <= variables; ++i) {
    td.bags.push_back({variable_token(i), negated_token(i), "z0", "z1"});
    if (i > 1) td.tree_edges.emplace_back(i - 2, i - 1);
  }
  if (variables == 0) td.bags.push_back({"z0", "z1"});
  return td;
}

/// Checks on a graph produced by encode_3sat: removing z0 and z1 leaves a
/// forest, and the variable bags form a valid decomposition of width at most 3.
inline bool verify_structure_witnesses(const Graph& g) {
  if (!g.find("z0") || !g.find("z1") || g.vertex_count() % 2 != 0) return false;
  const auto variables = static_cast<std::uint32_t>((g.vertex_count() - 2) / 2);
  for (std::uint32_t i = 1; i <= variables; ++i)
    if (!g.find(variable_token(i)) || !g.find(negated_token(i))) return false;
  if (!is_forest_without(g, {"z0", "z1"})) return false;
  auto td = sat_path_decomposition(variables);
  return td.width() <= 3 && is_valid_tree_decomposition(g, td);
}

}  // namespace stationcover
