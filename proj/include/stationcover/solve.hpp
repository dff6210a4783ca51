#pragma once

// Exact minimum station covers: an enumeration oracle, a component-wise
// branch and bound, and the reduce-then-solve pipeline.

#include "stationcover/model.hpp"
#include "stationcover/reduce.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stationcover {

/// Sorted station tokens.
using Cover = std::vector<std::string>;

struct Budget {
  std::optional<std::uint64_t> max_nodes;
  std::optional<std::chrono::milliseconds> time_limit;
};

/// Thrown when a search budget runs out. Carries a valid (not necessarily
/// minimum) cover of the whole input.
class BudgetExhausted : public Error {
public:
  explicit BudgetExhausted(Cover best) : Error("budget exhausted"), best_(std::move(best)) {}
  const Cover& best_cover() const { return best_; }

private:
  Cover best_;
};

inline bool verify_cover(const Instance& inst, std::span<const std::string> cover) {
  std::vector<char> chosen(inst.station_count(), 0);
  for (const auto& t : cover) chosen[inst.id_of(t)] = 1;
  for (const auto& conn : inst.connections()) {
    if (std::none_of(conn.begin(), conn.end(), [&](StationId s) { return chosen[s] != 0; })) return false;
  }
  return true;
}

namespace detail {

inline Cover to_cover(const Instance& inst, const std::vector<StationId>& ids) {
  Cover out;
  out.reserve(ids.size());
  for (auto s : ids) out.push_back(inst.token(s));
  std::sort(out.begin(), out.end());
  return out;
}

// Connection sets as 64-bit word masks, one per station.
class NaiveSearch {
public:
  explicit NaiveSearch(const Instance& inst) : n_(inst.station_count()), words_((inst.connection_count() + 63) / 64) {
    masks_.assign(n_, std::vector<std::uint64_t>(words_, 0));
    for (StationId s = 0; s < n_; ++s)
      for (auto c : inst.incidence(s)) masks_[s][c / 64] |= std::uint64_t{1} << (c % 64);
    full_.assign(words_, ~std::uint64_t{0});
    if (auto rem = inst.connection_count() % 64; rem != 0 && words_ > 0) full_.back() = (std::uint64_t{1} << rem) - 1;
  }

  std::vector<StationId> run() {
    for (std::size_t k = 0; k <= n_; ++k) {
      chosen_.clear();
      std::vector<std::uint64_t> acc(words_, 0);
      if (choose(0, k, acc)) return chosen_;
    }
    throw Error("no cover exists");  // unreachable for valid instances
  }

private:
  // Lexicographic enumeration of k-subsets starting at `from`.
  bool choose(StationId from, std::size_t k, const std::vector<std::uint64_t>& acc) {
    if (k == 0) return acc == full_;
    for (StationId s = from; s + k <= n_; ++s) {
      std::vector<std::uint64_t> next(acc);
      for (std::size_t w = 0; w < words_; ++w) next[w] |= masks_[s][w];
      chosen_.push_back(s);
      if (choose(s + 1, k - 1, next)) return true;
      chosen_.pop_back();
    }
    return false;
  }

  std::size_t n_;
  std::size_t words_;
  std::vector<std::vector<std::uint64_t>> masks_;
  std::vector<std::uint64_t> full_;
  std::vector<StationId> chosen_;
};

class BudgetClock {
public:
  explicit BudgetClock(const Budget& b) : budget_(b), start_(std::chrono::steady_clock::now()) {}

  bool tick() {
    ++nodes_;
    if (budget_.max_nodes && nodes_ > *budget_.max_nodes) return false;
    if (budget_.time_limit && (nodes_ & 1023u) == 0 &&
        std::chrono::steady_clock::now() - start_ > *budget_.time_limit)
      return false;
    return true;
  }
  std::uint64_t nodes() const { return nodes_; }

private:
  Budget budget_;
  std::chrono::steady_clock::time_point start_;
  std::uint64_t nodes_ = 0;
};

struct OutOfBudget {};

inline std::vector<StationId> greedy_cover(const Instance& inst) {
  std::vector<char> covered(inst.connection_count(), 0);
  std::size_t left = inst.connection_count();
  std::vector<StationId> out;
  while (left > 0) {
    StationId best = 0;
    std::size_t best_gain = 0;
    for (StationId s = 0; s < inst.station_count(); ++s) {
      std::size_t gain = 0;
      for (auto c : inst.incidence(s)) gain += covered[c] ? 0 : 1;
      if (gain > best_gain) {
        best_gain = gain;
        best = s;
      }
    }
    out.push_back(best);
    for (auto c : inst.incidence(best)) {
      if (!covered[c]) {
        covered[c] = 1;
        --left;
      }
    }
  }
  return out;
}

// Branch and bound on one connected instance. Branches on an uncovered
// connection with the fewest admissible stations; the i-th branch takes its
// i-th station and excludes the earlier ones.
class BranchAndBound {
public:
  BranchAndBound(const Instance& inst, BudgetClock& clock)
      : inst_(inst), clock_(clock), covered_(inst.connection_count(), 0), excluded_(inst.station_count(), 0),
        mark_(inst.station_count(), 0) {}

  std::vector<StationId> run(std::vector<StationId> initial) {
    best_ = std::move(initial);
    uncovered_ = inst_.connection_count();
    search();
    return best_;
  }

  const std::vector<StationId>& best() const { return best_; }

private:
  std::size_t admissible(std::size_t c) const {
    std::size_t k = 0;
    for (StationId s : inst_.connection(c)) k += excluded_[s] ? 0 : 1;
    return k;
  }

  // Size of a greedy packing of pairwise disjoint uncovered connections.
  std::size_t lower_bound() {
    std::vector<std::pair<std::size_t, std::size_t>> order;
    for (std::size_t c = 0; c < inst_.connection_count(); ++c)
      if (!covered_[c]) order.emplace_back(admissible(c), c);
    std::sort(order.begin(), order.end());
    std::size_t packed = 0;
    std::vector<StationId> touched;
    for (auto [size, c] : order) {
      const auto& conn = inst_.connection(c);
      bool clash = std::any_of(conn.begin(), conn.end(), [&](StationId s) { return !excluded_[s] && mark_[s]; });
      if (clash) continue;
      ++packed;
      for (StationId s : conn) {
        if (!excluded_[s]) {
          mark_[s] = 1;
          touched.push_back(s);
        }
      }
    }
    for (StationId s : touched) mark_[s] = 0;
    return packed;
  }

  void search() {
    if (!clock_.tick()) throw OutOfBudget{};
    if (uncovered_ == 0) {
      if (chosen_.size() < best_.size()) best_ = chosen_;
      return;
    }
    std::optional<std::size_t> pick;
    std::size_t pick_size = 0;
    for (std::size_t c = 0; c < inst_.connection_count(); ++c) {
      if (covered_[c]) continue;
      auto k = admissible(c);
      if (k == 0) return;
      if (!pick || k < pick_size) {
        pick = c;
        pick_size = k;
      }
    }
    if (chosen_.size() + lower_bound() >= best_.size()) return;

    std::vector<StationId> branch;
    for (StationId s : inst_.connection(*pick))
      if (!excluded_[s]) branch.push_back(s);
    std::sort(branch.begin(), branch.end());

    std::vector<StationId> newly_excluded;
    for (StationId s : branch) {
      std::vector<std::uint32_t> newly_covered;
      for (auto c : inst_.incidence(s)) {
        if (!covered_[c]) {
          covered_[c] = 1;
          newly_covered.push_back(c);
        }
      }
      uncovered_ -= newly_covered.size();
      chosen_.push_back(s);
      search();
      chosen_.pop_back();
      uncovered_ += newly_covered.size();
      for (auto c : newly_covered) covered_[c] = 0;

      excluded_[s] = 1;
      newly_excluded.push_back(s);
    }
    for (StationId s : newly_excluded) excluded_[s] = 0;
  }

  const Instance& inst_;
  BudgetClock& clock_;
  std::vector<char> covered_;
  std::vector<char> excluded_;
  std::vector<char> mark_;
  std::size_t uncovered_ = 0;
  std::vector<StationId> chosen_;
  std::vector<StationId> best_;
};

inline Cover solve_components(const Instance& inst, BudgetClock& clock) {
  auto parts = connected_components(inst);
  std::vector<Cover> solved(parts.size());
  std::vector<Cover> fallback(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) fallback[i] = to_cover(parts[i], greedy_cover(parts[i]));

  auto merged = [&](std::size_t upto, const Cover* current) {
    Cover all;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const Cover& src = i < upto ? solved[i] : (i == upto && current ? *current : fallback[i]);
      all.insert(all.end(), src.begin(), src.end());
    }
    std::sort(all.begin(), all.end());
    return all;
  };

  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].connection_count() == 0) continue;
    BranchAndBound bb(parts[i], clock);
    try {
      solved[i] = to_cover(parts[i], bb.run(greedy_cover(parts[i])));
    } catch (const OutOfBudget&) {
      Cover partial = to_cover(parts[i], bb.best());
      throw BudgetExhausted(merged(i, &partial));
    }
  }
  return merged(parts.size(), nullptr);
}

}  // namespace detail

/// Minimum cover by enumerating subsets in increasing size; the first cover
/// found is the lexicographically smallest. Limited to 25 stations.
inline Cover solve_naive(const Instance& inst) {
  if (inst.station_count() > 25) throw Error("solve_naive supports at most 25 stations");
  return detail::to_cover(inst, detail::NaiveSearch(inst).run());
}

/// Minimum cover by branch and bound, one connected component at a time.
inline Cover solve_exact(const Instance& inst, const Budget& budget = {}) {
  detail::BudgetClock clock(budget);
  return detail::solve_components(inst, clock);
}

struct PipelineResult {
  Cover cover;
  ReductionReport report;
};

/// Reduces to the core, solves the core exactly, and checks the result
/// against the original instance.
inline PipelineResult solve_pipeline(const Instance& inst, const Budget& budget = {}) {
  PipelineResult res;
  res.report = reduce_to_core(inst);
  res.cover = solve_exact(res.report.core, budget);
  if (!verify_cover(inst, res.cover)) throw std::logic_error("core cover does not cover the input instance");
  return res;
}

}  // namespace stationcover
