#pragma once

// Parameter sweeps over the generator: generate, take the largest component,
// reduce, measure; aggregate per (T, beta) cell; write CSV and SVG charts.

#include "stationcover/gen.hpp"
#include "stationcover/graphview.hpp"
#include "stationcover/metrics.hpp"
#include "stationcover/reduce.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

namespace stationcover {

struct SweepConfig {
  std::string name = "main";
  GeneratorParams base;  // beta, temperature and seed are overridden per sample
  std::vector<double> temperatures;
  std::vector<double> betas;
  std::size_t samples = 10;
  std::uint64_t master_seed = 1;
  std::string output = "sweep.csv";
  std::optional<std::string> svg_prefix;
  std::size_t threads = 0;  // 0: hardware concurrency

  void validate() const {
    if (temperatures.empty() || betas.empty()) throw Error("sweep grids must be non-empty");
    if (samples < 1) throw Error("sweep needs at least one sample per cell");
    for (double t : temperatures)
      if (!(t >= 0.0)) throw Error("temperatures must be non-negative");
    for (double b : betas) weight_regime(b);
    connection_count_for(base);
  }
};

namespace detail {

inline std::vector<double> grid(double from, double to, double step) {
  std::vector<double> out;
  const auto count = static_cast<long>(std::llround((to - from) / step));
  for (long i = 0; i <= count; ++i) out.push_back(std::round((from + step * static_cast<double>(i)) * 1e6) / 1e6);
  return out;
}

}  // namespace detail

/// Presets: main (|S| 2000, ratio 10, delta_S 2), ratio4, deg5 on the full
/// grid (T step 0.05, beta 2..5 step 0.25 plus inf, 10 samples), and
/// thinned variants (T step 0.1, beta {2, 2.5, 3, 3.5, 5, inf}, 3 samples).
/// "thinned" alone means thinned main.
inline SweepConfig sweep_preset(std::string_view name) {
  std::string variant(name);
  bool thinned = false;
  if (variant == "thinned") {
    variant = "main";
    thinned = true;
  } else if (variant.rfind("thinned-", 0) == 0) {
    variant = variant.substr(8);
    thinned = true;
  }
  SweepConfig cfg;
  cfg.name = std::string(name);
  cfg.base.n_stations = 2000;
  cfg.base.ratio = 10.0;
  cfg.base.target_delta_S = 2.0;
  if (variant == "ratio4") {
    cfg.base.ratio = 4.0;
  } else if (variant == "deg5") {
    cfg.base.target_delta_S = 5.0;
  } else if (variant != "main") {
    throw Error("unknown sweep preset '" + std::string(name) + "'");
  }
  if (thinned) {
    cfg.temperatures = detail::grid(0.0, 1.0, 0.1);
    cfg.betas = {2.0, 2.5, 3.0, 3.5, 5.0, kUniformWeights};
    cfg.samples = 3;
  } else {
    cfg.temperatures = detail::grid(0.0, 1.0, 0.05);
    cfg.betas = detail::grid(2.0, 5.0, 0.25);
    cfg.betas.push_back(kUniformWeights);
    cfg.samples = 10;
  }
  cfg.output = cfg.name + ".csv";
  return cfg;
}

inline double parse_beta(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "infinity" || text == "INF") return kUniformWeights;
  std::size_t used = 0;
  double v = std::stod(text, &used);
  if (used != text.size()) throw Error("bad number '" + text + "'");
  return v;
}

inline std::string format_beta(double beta) { return std::isinf(beta) ? "inf" : fmt::format("{:g}", beta); }

/// Flat "key = value" config; '#' starts a comment. A `preset` key, if
/// present, must come first and seeds the remaining defaults.
inline SweepConfig parse_sweep_config(std::string_view text) {
  SweepConfig cfg = sweep_preset("main");
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  bool seen_other = false;
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string{};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  auto numbers = [&](const std::string& v, bool allow_inf) {
    std::vector<double> out;
    std::istringstream ls(v);
    for (std::string item; std::getline(ls, item, ',');) {
      item = trim(item);
      if (item.empty()) continue;
      out.push_back(allow_inf ? parse_beta(item) : std::stod(item));
    }
    return out;
  };
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("config line " + std::to_string(line_no) + ": expected key = value");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    try {
      if (key == "preset") {
        if (seen_other) throw Error("'preset' must precede other keys");
        cfg = sweep_preset(value);
        continue;
      }
      seen_other = true;
      if (key == "name") cfg.name = value;
      else if (key == "stations") cfg.base.n_stations = std::stoul(value);
      else if (key == "ratio") cfg.base.ratio = std::stod(value);
      else if (key == "delta_s") cfg.base.target_delta_S = std::stod(value);
      else if (key == "temperatures") cfg.temperatures = numbers(value, false);
      else if (key == "betas") cfg.betas = numbers(value, true);
      else if (key == "samples") cfg.samples = std::stoul(value);
      else if (key == "seed") cfg.master_seed = std::stoull(value);
      else if (key == "output") cfg.output = value;
      else if (key == "svg_prefix") cfg.svg_prefix = value;
      else if (key == "threads") cfg.threads = std::stoul(value);
      else throw Error("unknown key '" + key + "'");
    } catch (const Error& e) {
      throw Error("config line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::exception&) {
      throw Error("config line " + std::to_string(line_no) + ": bad value '" + value + "'");
    }
  }
  return cfg;
}

struct SweepRow {
  double temperature = 0.0;
  double beta = 0.0;
  std::size_t sample = 0;
  std::uint64_t seed = 0;
  double delta_s_full = 0.0;  // before component extraction
  double a = 0.0;
  MetricsReport metrics;      // of the largest component
};

struct SweepCell {
  double temperature = 0.0;
  double beta = 0.0;
  std::size_t completed = 0;
  double mean_kappa = 0.0;
  double mean_core_fraction = 0.0;
  double mean_delta_s_full = 0.0;
  std::vector<std::string> failures;
};

struct SweepResults {
  std::vector<SweepRow> rows;  // grid order: temperature, beta, sample
  std::vector<SweepCell> cells;

  const SweepCell& cell(double temperature, double beta) const {
    for (const auto& c : cells)
      if (c.temperature == temperature && c.beta == beta) return c;
    throw Error("no sweep cell for T=" + fmt::format("{:g}", temperature) + " beta=" + format_beta(beta));
  }
};

/// One generated sample, measured the way the sweep measures it.
inline SweepRow measure_sample(const GeneratorParams& params, std::size_t sample) {
  auto g = generate(params);
  SweepRow row;
  row.temperature = params.temperature;
  row.beta = params.beta;
  row.sample = sample;
  row.seed = params.seed;
  row.a = g.world.a;
  row.delta_s_full = degree_stats(g.full).delta_S;
  auto reduction = reduce_to_core(g.largest);
  annotate_two_core(reduction, g.largest);
  row.metrics = metrics_report(g.largest, reduction);
  return row;
}

namespace detail {

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) fn(i);
  };
  if (threads <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace detail

inline SweepResults run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  struct Task {
    double temperature, beta;
    std::size_t sample;
  };
  std::vector<Task> tasks;
  for (double t : cfg.temperatures)
    for (double b : cfg.betas)
      for (std::size_t k = 0; k < cfg.samples; ++k) tasks.push_back({t, b, k});

  std::vector<std::optional<SweepRow>> slots(tasks.size());
  std::vector<std::string> errors(tasks.size());
  detail::parallel_for(tasks.size(), cfg.threads, [&](std::size_t i) {
    GeneratorParams p = cfg.base;
    p.temperature = tasks[i].temperature;
    p.beta = tasks[i].beta;
    p.seed = derive_seed(cfg.master_seed, p.temperature, p.beta, tasks[i].sample);
    try {
      slots[i] = measure_sample(p, tasks[i].sample);
    } catch (const std::exception& e) {
      errors[i] = fmt::format("sample {}: {}", tasks[i].sample, e.what());
    }
  });

  SweepResults res;
  for (std::size_t i = 0; i < tasks.size(); i += cfg.samples) {
    SweepCell cell;
    cell.temperature = tasks[i].temperature;
    cell.beta = tasks[i].beta;
    for (std::size_t k = i; k < i + cfg.samples; ++k) {
      if (!slots[k]) {
        cell.failures.push_back(errors[k]);
        continue;
      }
      const auto& row = *slots[k];
      ++cell.completed;
      cell.mean_kappa += row.metrics.kappa;
      cell.mean_core_fraction += row.metrics.core_fraction;
      cell.mean_delta_s_full += row.delta_s_full;
      res.rows.push_back(row);
    }
    if (cell.completed) {
      const double n = static_cast<double>(cell.completed);
      cell.mean_kappa /= n;
      cell.mean_core_fraction /= n;
      cell.mean_delta_s_full /= n;
    }
    res.cells.push_back(std::move(cell));
  }
  return res;
}

inline constexpr std::string_view kSweepCsvHeader =
    "T,beta,sample,seed,n_stations_lcc,ratio_lcc,delta_s_lcc,kappa,beta_hat,ks,two_core_frac,core_frac";

inline std::string sweep_csv(const SweepResults& res) {
  std::string out(kSweepCsvHeader);
  out += '\n';
  for (const auto& r : res.rows) {
    const auto& m = r.metrics;
    out += fmt::format("{:g},{},{},{},{},{:.6g},{:.6g},{:.6g},{},{},{:.6g},{:.6g}\n", r.temperature, format_beta(r.beta),
                       r.sample, r.seed, m.stations, m.ratio, m.delta_S, m.kappa,
                       m.fit ? fmt::format("{:.6g}", m.fit->beta) : std::string("nan"),
                       m.fit ? fmt::format("{:.6g}", m.fit->ks) : std::string("nan"), m.two_core_fraction,
                       m.core_fraction);
  }
  return out;
}

namespace detail {

inline std::string svg_color(double v) {
  v = std::clamp(v, 0.0, 1.0);
  // white -> dark red
  const int r = static_cast<int>(255 - 115 * v);
  const int g = static_cast<int>(255 - 255 * v);
  const int b = static_cast<int>(255 - 255 * v);
  return fmt::format("#{:02x}{:02x}{:02x}", r, g, b);
}

inline std::vector<double> distinct_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace detail

/// Mean kappa against T, one line per beta.
inline std::string kappa_chart_svg(const SweepResults& res) {
  constexpr double W = 640, H = 420, L = 60, R = 130, T = 20, B = 50;
  std::vector<double> temps, betas;
  for (const auto& c : res.cells) {
    temps.push_back(c.temperature);
    betas.push_back(c.beta);
  }
  temps = detail::distinct_sorted(temps);
  betas = detail::distinct_sorted(betas);
  const double tmin = temps.empty() ? 0 : temps.front(), tmax = temps.empty() ? 1 : std::max(temps.back(), tmin + 1e-9);
  auto x = [&](double t) { return L + (t - tmin) / (tmax - tmin) * (W - L - R); };
  auto y = [&](double k) { return H - B - std::clamp(k, 0.0, 1.0) * (H - T - B); };

  std::string s = fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="12">)", W, H);
  s += '\n';
  s += fmt::format(R"(<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>)", L, H - B, W - R, H - B) + "\n";
  s += fmt::format(R"(<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>)", L, T, L, H - B) + "\n";
  s += fmt::format(R"(<text x="{}" y="{}" text-anchor="middle">temperature T</text>)", (L + W - R) / 2, H - 12) + "\n";
  s += fmt::format(R"~(<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">kappa</text>)~", (T + H - B) / 2, (T + H - B) / 2) + "\n";
  for (double k : {0.0, 0.25, 0.5, 0.75, 1.0})
    s += fmt::format(R"(<text x="{}" y="{}" text-anchor="end">{:g}</text>)", L - 6, y(k) + 4, k) + "\n";
  for (double t : temps)
    s += fmt::format(R"(<text x="{:.1f}" y="{}" text-anchor="middle">{:g}</text>)", x(t), H - B + 16, t) + "\n";
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const double hue = betas.size() > 1 ? 240.0 * static_cast<double>(i) / static_cast<double>(betas.size() - 1) : 0.0;
    std::string pts;
    for (double t : temps) {
      for (const auto& c : res.cells)
        if (c.temperature == t && c.beta == betas[i] && c.completed)
          pts += fmt::format("{:.1f},{:.1f} ", x(t), y(c.mean_kappa));
    }
    s += fmt::format(R"~(<polyline fill="none" stroke="hsl({:.0f},80%,40%)" stroke-width="2" points="{}"/>)~", hue, pts) + "\n";
    s += fmt::format(R"~(<text x="{}" y="{}" fill="hsl({:.0f},80%,40%)">beta={}</text>)~", W - R + 10, T + 16 * (i + 1), hue,
                     format_beta(betas[i])) + "\n";
  }
  s += "</svg>\n";
  return s;
}

/// Mean relative core complexity over the (T, beta) grid.
inline std::string core_heatmap_svg(const SweepResults& res) {
  std::vector<double> temps, betas;
  for (const auto& c : res.cells) {
    temps.push_back(c.temperature);
    betas.push_back(c.beta);
  }
  temps = detail::distinct_sorted(temps);
  betas = detail::distinct_sorted(betas);
  constexpr double L = 70, T = 20, cell = 28;
  const double W = L + cell * static_cast<double>(temps.size()) + 20;
  const double H = T + cell * static_cast<double>(betas.size()) + 50;
  std::string s = fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="10">)", W, H);
  s += '\n';
  for (std::size_t bi = 0; bi < betas.size(); ++bi) {
    const double yy = T + cell * static_cast<double>(betas.size() - 1 - bi);
    s += fmt::format(R"(<text x="{}" y="{}" text-anchor="end">beta={}</text>)", L - 4, yy + cell / 2 + 3, format_beta(betas[bi])) + "\n";
    for (std::size_t ti = 0; ti < temps.size(); ++ti) {
      const double xx = L + cell * static_cast<double>(ti);
      std::string fill = "#cccccc";
      std::string label;
      for (const auto& c : res.cells)
        if (c.temperature == temps[ti] && c.beta == betas[bi] && c.completed) {
          fill = detail::svg_color(c.mean_core_fraction);
          label = fmt::format("{:.0f}", 100.0 * c.mean_core_fraction);
        }
      s += fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="{}" stroke="white"/>)", xx, yy, cell, cell, fill) + "\n";
      s += fmt::format(R"(<text x="{}" y="{}" text-anchor="middle">{}</text>)", xx + cell / 2, yy + cell / 2 + 3, label) + "\n";
    }
  }
  const double base = T + cell * static_cast<double>(betas.size());
  for (std::size_t ti = 0; ti < temps.size(); ++ti)
    s += fmt::format(R"(<text x="{}" y="{}" text-anchor="middle">{:g}</text>)", L + cell * (static_cast<double>(ti) + 0.5), base + 14, temps[ti]) + "\n";
  s += fmt::format(R"~(<text x="{}" y="{}" text-anchor="middle">temperature T (cell: core %)</text>)~", L + cell * static_cast<double>(temps.size()) / 2, base + 34) + "\n";
  s += "</svg>\n";
  return s;
}

inline void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

/// Writes the CSV, plus `<prefix>kappa.svg` and `<prefix>core.svg` when an
/// SVG prefix is given. Returns the written paths.
inline std::vector<std::filesystem::path> write_results(const SweepResults& res, const std::filesystem::path& csv_path,
                                                        const std::optional<std::string>& svg_prefix = std::nullopt) {
  std::vector<std::filesystem::path> written;
  write_text_file(csv_path, sweep_csv(res));
  written.push_back(csv_path);
  if (svg_prefix) {
    std::filesystem::path k = *svg_prefix + "kappa.svg", c = *svg_prefix + "core.svg";
    write_text_file(k, kappa_chart_svg(res));
    write_text_file(c, core_heatmap_svg(res));
    written.push_back(k);
    written.push_back(c);
  }
  return written;
}

/// Spearman rank correlation with average ranks for ties.
inline double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw Error("spearman needs two equal-length series of length >= 2");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j < idx.size() && v[idx[j]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j - 1) + 1.0;
      for (std::size_t k = i; k < j; ++k) r[idx[k]] = avg;
      i = j;
    }
    return r;
  };
  auto rx = ranks(xs), ry = ranks(ys);
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace stationcover
