#pragma once

// Command-line front end. cli_main() takes the arguments after the program
// name and returns the process exit code.

#include "stationcover/gen.hpp"
#include "stationcover/graphview.hpp"
#include "stationcover/gtfs.hpp"
#include "stationcover/harness.hpp"
#include "stationcover/metrics.hpp"
#include "stationcover/model.hpp"
#include "stationcover/reduce.hpp"
#include "stationcover/solve.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace stationcover {

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Edge list: "u v" per line, a lone token declares an isolated vertex,
/// '#' comment lines.
inline Graph read_edge_list(std::string_view text) {
  std::vector<std::string> vertices;
  std::vector<std::pair<std::string, std::string>> edges;
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    if (toks.empty() || toks[0][0] == '#') continue;
    for (const auto& t : toks) detail::validate_token(t);
    if (toks.size() == 1) vertices.push_back(toks[0]);
    else if (toks.size() == 2) edges.emplace_back(toks[0], toks[1]);
    else throw Error("edge list line " + std::to_string(line_no) + ": expected one or two tokens");
  }
  return Graph::from_edges(std::move(vertices), edges);
}

/// "10s", "250ms", "2m", or a bare number of seconds.
inline std::chrono::milliseconds parse_duration(const std::string& text) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw Error("bad duration '" + text + "'");
  }
  const auto unit = text.substr(used);
  double ms = 0;
  if (unit.empty() || unit == "s") ms = v * 1000.0;
  else if (unit == "ms") ms = v;
  else if (unit == "m" || unit == "min") ms = v * 60000.0;
  else throw Error("bad duration unit in '" + text + "'");
  if (!(ms >= 0)) throw Error("negative duration '" + text + "'");
  return std::chrono::milliseconds(static_cast<long long>(ms));
}

inline std::string reduction_summary(const ReductionReport& r) {
  std::string s;
  s += fmt::format("stations {}\n", r.input_station_count);
  s += fmt::format("core_stations {}\n", r.core.station_count());
  s += fmt::format("core_connections {}\n", r.core.connection_count());
  s += fmt::format("removed_stations {}\n", r.removed_stations.size());
  s += fmt::format("removed_connections {}\n", r.removed_connections.size());
  s += fmt::format("complexity {}\n", r.complexity);
  s += fmt::format("relative_core_complexity {:.6g}\n", r.relative_core_complexity);
  if (r.relative_two_core_size) s += fmt::format("relative_two_core_size {:.6g}\n", *r.relative_two_core_size);
  return s;
}

/// Removal trace, one line per removal in the order applied:
/// "station <removed> <witness>" / "connection <index> <witness index>".
inline std::string reduction_trace(const ReductionReport& r, const Instance& input) {
  std::string s;
  for (const auto& x : r.removed_stations)
    s += fmt::format("station {} {}\n", input.token(x.station), input.token(x.witness));
  for (const auto& x : r.removed_connections) s += fmt::format("connection {} {}\n", x.connection, x.witness);
  return s;
}

namespace detail {

inline void emit(const std::optional<std::string>& path, std::string_view content, std::ostream& out) {
  if (path && *path != "-") write_text_file(*path, content);
  else out << content;
}

}  // namespace detail

inline int cli_main(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Station cover reduction, solving, metrics and random instances"};
  app.require_subcommand(1);

  std::string input;
  std::optional<std::string> output;
  bool largest = false;

  auto* gen_cmd = app.add_subcommand("generate", "Sample a random instance");
  GeneratorParams gp;
  std::string beta_text = "inf";
  gen_cmd->add_option("--stations", gp.n_stations)->required();
  gen_cmd->add_option("--ratio", gp.ratio)->required();
  gen_cmd->add_option("--delta-s", gp.target_delta_S)->required();
  gen_cmd->add_option("--beta", beta_text, "power-law exponent or 'inf'")->required();
  gen_cmd->add_option("--temperature", gp.temperature)->required();
  gen_cmd->add_option("--seed", gp.seed)->required();
  gen_cmd->add_option("-o,--output", output);
  gen_cmd->add_flag("--largest-component", largest);

  auto* reduce_cmd = app.add_subcommand("reduce", "Reduce an HSD instance to its core");
  std::string core_path = "core.hsd";
  std::optional<std::string> trace_path;
  reduce_cmd->add_option("input", input)->required();
  reduce_cmd->add_option("-o,--output", core_path, "core output (default core.hsd)");
  reduce_cmd->add_option("--trace", trace_path, "write the removal trace here");

  auto* solve_cmd = app.add_subcommand("solve", "Minimum station cover via reduction and branch and bound");
  std::optional<std::string> budget_text;
  std::optional<std::uint64_t> max_nodes;
  solve_cmd->add_option("input", input)->required();
  solve_cmd->add_option("--budget", budget_text, "time limit, e.g. 10s or 500ms");
  solve_cmd->add_option("--max-nodes", max_nodes, "search node limit");

  auto* metrics_cmd = app.add_subcommand("metrics", "One CSV row of instance metrics");
  std::optional<std::string> ccdf_path;
  metrics_cmd->add_option("input", input)->required();
  metrics_cmd->add_flag("--largest-component", largest);
  metrics_cmd->add_option("--ccdf", ccdf_path, "write the station-degree CCDF as CSV");

  auto* gtfs_cmd = app.add_subcommand("ingest-gtfs", "Convert a GTFS feed directory to HSD");
  gtfs_cmd->add_option("dir", input)->required();
  gtfs_cmd->add_option("-o,--output", output);
  gtfs_cmd->add_flag("--largest-component", largest);

  auto* sweep_cmd = app.add_subcommand("sweep", "Run a generator parameter sweep");
  std::optional<std::string> config_path, preset_name, sweep_out, svg_prefix;
  std::optional<std::size_t> threads, samples;
  sweep_cmd->add_option("--config", config_path, "key = value config file");
  sweep_cmd->add_option("--preset", preset_name, "main, ratio4, deg5, thinned, thinned-ratio4, thinned-deg5");
  sweep_cmd->add_option("-o,--output", sweep_out, "CSV path");
  sweep_cmd->add_option("--svg-prefix", svg_prefix);
  sweep_cmd->add_option("--threads", threads);
  sweep_cmd->add_option("--samples", samples);

  auto* n1_cmd = app.add_subcommand("construct-n1", "Instance over a graph whose core has complexity 1");
  std::optional<std::string> designated;
  n1_cmd->add_option("graph", input, "edge list")->required();
  n1_cmd->add_option("--designated", designated);
  n1_cmd->add_option("-o,--output", output);

  auto* n2_cmd = app.add_subcommand("construct-n2", "Instance over a graph whose core is its 2-core");
  n2_cmd->add_option("graph", input, "edge list")->required();
  n2_cmd->add_option("-o,--output", output);

  auto* sat_cmd = app.add_subcommand("encode-sat", "Encode a DIMACS 3-CNF formula as an instance");
  sat_cmd->add_option("cnf", input)->required();
  sat_cmd->add_option("-o,--output", output);

  std::vector<std::string> argv_store{"stationcover"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*gen_cmd) {
      gp.beta = parse_beta(beta_text);
      if (weight_regime(gp.beta) == WeightRegime::infinite_mean)
        err << "warning: beta = 2 gives infinite-mean station weights\n";
      auto g = generate(gp);
      const Instance& inst = largest ? g.largest : g.full;
      err << fmt::format("a {:.6g}\nstations {}\nconnections {}\ndelta_s {:.6g}\n", g.world.a, inst.station_count(),
                         inst.connection_count(), degree_stats(inst).delta_S);
      detail::emit(output, write_hsd(inst), out);
    } else if (*reduce_cmd) {
      auto inst = read_hsd(read_text_file(input));
      auto rep = reduce_to_core(inst);
      annotate_two_core(rep, inst);
      out << reduction_summary(rep);
      write_text_file(core_path, write_hsd(rep.core));
      if (trace_path) write_text_file(*trace_path, reduction_trace(rep, inst));
    } else if (*solve_cmd) {
      auto inst = read_hsd(read_text_file(input));
      Budget budget;
      budget.max_nodes = max_nodes;
      if (budget_text) budget.time_limit = parse_duration(*budget_text);
      try {
        auto res = solve_pipeline(inst, budget);
        out << fmt::format("optimum {}\n", res.cover.size());
        out << "cover";
        for (const auto& s : res.cover) out << ' ' << s;
        out << '\n' << reduction_summary(res.report);
      } catch (const BudgetExhausted& e) {
        out << fmt::format("upper_bound {}\n", e.best_cover().size());
        out << "cover";
        for (const auto& s : e.best_cover()) out << ' ' << s;
        out << '\n';
        err << "error: search budget exhausted before proving optimality\n";
        return 3;
      }
    } else if (*metrics_cmd) {
      auto inst = read_hsd(read_text_file(input));
      if (largest) inst = largest_component(inst);
      out << metrics_csv_header() << '\n' << metrics_csv_row(metrics_report(inst)) << '\n';
      if (ccdf_path) {
        auto degrees = positive_station_degrees(inst);
        std::string csv = "value,fraction\n";
        for (auto p : ccdf(degrees)) csv += fmt::format("{},{:.6g}\n", p.value, p.fraction);
        write_text_file(*ccdf_path, csv);
      }
    } else if (*gtfs_cmd) {
      auto res = gtfs::load_gtfs(input);
      for (const auto& w : res.warnings) err << "warning: " << w << '\n';
      const Instance inst = largest ? largest_component(res.instance) : res.instance;
      detail::emit(output, write_hsd(inst), out);
    } else if (*sweep_cmd) {
      if (config_path && preset_name) throw Error("use either --config or --preset");
      SweepConfig cfg = config_path ? parse_sweep_config(read_text_file(*config_path))
                                    : sweep_preset(preset_name.value_or("thinned"));
      if (sweep_out) cfg.output = *sweep_out;
      if (svg_prefix) cfg.svg_prefix = svg_prefix;
      if (threads) cfg.threads = *threads;
      if (samples) cfg.samples = *samples;
      auto res = run_sweep(cfg);
      for (const auto& c : res.cells)
        for (const auto& f : c.failures)
          err << fmt::format("warning: T={:g} beta={} {}\n", c.temperature, format_beta(c.beta), f);
      for (const auto& p : write_results(res, cfg.output, cfg.svg_prefix)) out << "wrote " << p.string() << '\n';
    } else if (*n1_cmd) {
      detail::emit(output, write_hsd(build_n1(read_edge_list(read_text_file(input)), designated)), out);
    } else if (*n2_cmd) {
      detail::emit(output, write_hsd(build_n2(read_edge_list(read_text_file(input)))), out);
    } else if (*sat_cmd) {
      detail::emit(output, write_hsd(encode_3sat(parse_dimacs(read_text_file(input))).instance), out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace stationcover
