#pragma once

// Random hitting set instances on the unit circle. Stations carry power-law
// weights, connections unit weights; station s joins connection c with
// probability min{1, (a * w(s) * w(c) / dist(s, c))^(1/T)}, where the scale a
// is calibrated so the expected mean station degree hits a target.

#include "stationcover/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace stationcover {

inline constexpr double kUniformWeights = std::numeric_limits<double>::infinity();

struct GeneratorParams {
  std::size_t n_stations = 2000;
  double ratio = 10.0;  // |S| / |C|
  double target_delta_S = 2.0;
  double beta = kUniformWeights;
  double temperature = 0.5;
  std::uint64_t seed = 0;
};

struct SampledWorld {
  std::vector<double> station_position;
  std::vector<double> station_weight;
  std::vector<double> connection_position;
  std::vector<double> connection_weight;
  double a = 0.0;
};

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// splitmix64 finalizer, used to derive independent seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, double temperature, double beta, std::uint64_t sample) {
  std::uint64_t h = mix_seed(master);
  h = mix_seed(h ^ std::bit_cast<std::uint64_t>(temperature));
  h = mix_seed(h ^ std::bit_cast<std::uint64_t>(beta));
  return mix_seed(h ^ sample);
}

inline double circle_distance(double x, double y) {
  if (!(x >= 0.0 && x < 1.0) || !(y >= 0.0 && y < 1.0)) throw Error("circle positions must lie in [0, 1)");
  const double d = std::abs(x - y);
  return std::min(d, 1.0 - d);
}

enum class WeightRegime { uniform, finite_mean, infinite_mean };

/// beta == 2 is accepted (infinite-mean Pareto) so sweeps can include it.
inline WeightRegime weight_regime(double beta) {
  if (std::isinf(beta) && beta > 0) return WeightRegime::uniform;
  if (std::isnan(beta) || beta < 2.0) throw Error("power-law exponent must be at least 2 (or inf), got " + std::to_string(beta));
  return beta == 2.0 ? WeightRegime::infinite_mean : WeightRegime::finite_mean;
}

/// Inverse-CDF Pareto weight with lower bound 1: w = (1 - u)^(-1/(beta - 1)).
inline double pareto_weight(double u, double beta) {
  if (std::isinf(beta)) return 1.0;
  return std::pow(1.0 - u, -1.0 / (beta - 1.0));
}

inline std::vector<double> sample_weights(std::size_t n, double beta, Rng& rng) {
  const auto regime = weight_regime(beta);
  std::vector<double> w(n, 1.0);
  if (regime == WeightRegime::uniform) return w;
  for (auto& x : w) x = pareto_weight(uniform01(rng), beta);
  return w;
}

/// min{1, (a * ws * wc / dist)^(1/T)}; T = 0 is the step model and dist = 0
/// always gives 1.
inline double membership_probability(double a, double ws, double wc, double dist, double temperature) {
  const double scaled = a * ws * wc;
  if (dist <= 0.0 || scaled >= dist) return 1.0;
  if (temperature <= 0.0) return 0.0;
  return std::pow(scaled / dist, 1.0 / temperature);
}

inline double membership_probability(const SampledWorld& w, std::size_t s, std::size_t c, double temperature) {
  return membership_probability(w.a, w.station_weight.at(s), w.connection_weight.at(c),
                                circle_distance(w.station_position.at(s), w.connection_position.at(c)), temperature);
}

namespace detail {

// log(ws * wc / dist) for every pair, sorted descending. Pairs at distance 0
// get +inf.
inline std::vector<double> pair_log_ratios(const SampledWorld& w) {
  std::vector<double> out;
  out.reserve(w.station_position.size() * w.connection_position.size());
  for (std::size_t c = 0; c < w.connection_position.size(); ++c)
    for (std::size_t s = 0; s < w.station_position.size(); ++s) {
      const double d = circle_distance(w.station_position[s], w.connection_position[c]);
      out.push_back(d <= 0.0 ? std::numeric_limits<double>::infinity()
                             : std::log(w.station_weight[s] * w.connection_weight[c] / d));
    }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

// Expected mean station degree for scale exp(log_a).
inline double expected_mean_degree(const std::vector<double>& log_ratios, double log_a, double temperature,
                                   std::size_t stations) {
  auto first_partial = std::partition_point(log_ratios.begin(), log_ratios.end(), [&](double lr) { return lr >= -log_a; });
  double sum = static_cast<double>(first_partial - log_ratios.begin());
  if (temperature > 0.0) {
    for (auto it = first_partial; it != log_ratios.end(); ++it) {
      const double e = (log_a + *it) / temperature;
      if (e < -40.0) break;
      sum += std::exp(e);
    }
  }
  return sum / static_cast<double>(stations);
}

}  // namespace detail

inline double expected_mean_degree(const SampledWorld& w, double a, double temperature) {
  return detail::expected_mean_degree(detail::pair_log_ratios(w), std::log(a), temperature, w.station_position.size());
}

struct CalibrationOptions {
  double lo = 1e-9;
  double hi = 1e3;
  double tolerance = 1e-3;
  int max_iterations = 60;
};

/// Bisection (in log space) for the scale a whose exact expected mean station
/// degree matches `target`.
inline double calibrate_a(const SampledWorld& w, double target, double temperature, const CalibrationOptions& opts = {}) {
  if (!(target > 0.0)) throw Error("target mean station degree must be positive");
  if (w.station_position.empty()) throw Error("calibration needs at least one station");
  const auto lrs = detail::pair_log_ratios(w);
  const auto n = w.station_position.size();
  double lo = std::log(opts.lo), hi = std::log(opts.hi);
  const double at_hi = detail::expected_mean_degree(lrs, hi, temperature, n);
  if (at_hi < target - opts.tolerance)
    throw Error("target mean degree " + std::to_string(target) + " unreachable (at most " + std::to_string(at_hi) + ")");
  const double at_lo = detail::expected_mean_degree(lrs, lo, temperature, n);
  if (at_lo > target + opts.tolerance)
    throw Error("target mean degree " + std::to_string(target) + " unreachable (at least " + std::to_string(at_lo) + ")");
  if (std::abs(at_hi - target) <= opts.tolerance) return std::exp(hi);
  for (int it = 0; it < opts.max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double e = detail::expected_mean_degree(lrs, mid, temperature, n);
    if (std::abs(e - target) <= opts.tolerance) return std::exp(mid);
    (e < target ? lo : hi) = mid;
  }
  return std::exp(hi);
}

inline std::string station_token(std::size_t index, std::size_t count) {
  std::size_t width = 1;
  for (std::size_t x = count > 0 ? count - 1 : 0; x >= 10; x /= 10) ++width;
  std::string digits = std::to_string(index);
  return "s" + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

struct GeneratedInstance {
  Instance full;     // all stations, empty connections dropped
  Instance largest;  // largest connected component of `full`
  SampledWorld world;
};

inline std::size_t connection_count_for(const GeneratorParams& p) {
  if (p.n_stations < 1) throw Error("need at least one station");
  if (!(p.ratio > 0.0)) throw Error("station-connection ratio must be positive");
  const auto m = static_cast<std::size_t>(std::llround(static_cast<double>(p.n_stations) / p.ratio));
  if (m == 0) throw Error("parameters give zero connections");
  return m;
}

inline SampledWorld sample_world(const GeneratorParams& p, Rng& rng) {
  const auto m = connection_count_for(p);
  if (!(p.temperature >= 0.0)) throw Error("temperature must be non-negative");
  SampledWorld w;
  w.station_position.resize(p.n_stations);
  for (auto& x : w.station_position) x = uniform01(rng);
  w.station_weight = sample_weights(p.n_stations, p.beta, rng);
  w.connection_position.resize(m);
  for (auto& x : w.connection_position) x = uniform01(rng);
  w.connection_weight.assign(m, 1.0);
  return w;
}

/// Draws every (station, connection) incidence independently for a calibrated
/// world. Connections list their stations in ascending order; empty ones are
/// dropped.
inline Instance draw_instance(const SampledWorld& w, double temperature, Rng& rng) {
  const auto n = w.station_position.size();
  const auto m = w.connection_position.size();
  const double log_a = std::log(w.a);
  std::vector<Connection> conns;
  for (std::size_t c = 0; c < m; ++c) {
    Connection conn;
    for (std::size_t s = 0; s < n; ++s) {
      const double d = circle_distance(w.station_position[s], w.connection_position[c]);
      double prob = 1.0;
      if (d > 0.0) {
        const double e = log_a + std::log(w.station_weight[s] * w.connection_weight[c] / d);
        prob = e >= 0.0 ? 1.0 : (temperature > 0.0 ? std::exp(e / temperature) : 0.0);
      }
      if (uniform01(rng) < prob) conn.push_back(static_cast<StationId>(s));
    }
    if (!conn.empty()) conns.push_back(std::move(conn));
  }
  std::vector<std::string> tokens;
  tokens.reserve(n);
  for (std::size_t s = 0; s < n; ++s) tokens.push_back(station_token(s, n));
  return Instance::from_ids(std::move(tokens), std::move(conns));
}

inline GeneratedInstance generate(const GeneratorParams& p) {
  Rng rng(p.seed);
  GeneratedInstance g;
  g.world = sample_world(p, rng);
  g.world.a = calibrate_a(g.world, p.target_delta_S, p.temperature);
  g.full = draw_instance(g.world, p.temperature, rng);
  g.largest = largest_component(g.full);
  return g;
}

}  // namespace stationcover
