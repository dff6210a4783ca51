#pragma once

// GTFS feed ingestion: one connection per route, taken from the route's trip
// with the smallest trip_id, stops ordered by stop_sequence.

#include "stationcover/model.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace stationcover::gtfs {

/// Minimal RFC 4180 reader: comma separated, double-quoted fields with ""
/// escapes, quoted line breaks allowed.
class CsvReader {
public:
  CsvReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  /// Next record, or false at end of input. `line()` is the record's first line.
  bool next(std::vector<std::string>& fields) {
    fields.clear();
    std::string raw;
    if (!std::getline(in_, raw)) return false;
    line_ = ++lines_read_;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    for (;;) {
      if (!raw.empty() && raw.back() == '\r' && !quoted) raw.pop_back();
      for (std::size_t i = 0; i < raw.size(); ++i) {
        char ch = raw[i];
        if (quoted) {
          if (ch == '"') {
            if (i + 1 < raw.size() && raw[i + 1] == '"') {
              field += '"';
              ++i;
            } else {
              quoted = false;
            }
          } else {
            field += ch;
          }
        } else if (ch == '"' && !field_started) {
          quoted = true;
          field_started = true;
        } else if (ch == ',') {
          fields.push_back(std::move(field));
          field.clear();
          field_started = false;
        } else {
          field += ch;
          field_started = true;
        }
      }
      if (!quoted) break;
      if (!std::getline(in_, raw)) throw Error(name_ + ":" + std::to_string(line_) + ": unterminated quoted field");
      ++lines_read_;
      field += '\n';
    }
    fields.push_back(std::move(field));
    return true;
  }

  std::size_t line() const { return line_; }
  const std::string& name() const { return name_; }

private:
  std::istream& in_;
  std::string name_;
  std::size_t lines_read_ = 0;
  std::size_t line_ = 0;
};

/// A GTFS table with named column lookup.
class Table {
public:
  Table(const std::filesystem::path& path, std::vector<std::string> required) : file_(path), name_(path.filename().string()) {
    if (!file_) throw Error("missing GTFS file: " + path.string());
    reader_.emplace(file_, name_);
    std::vector<std::string> header;
    if (!reader_->next(header)) throw Error(name_ + ": empty file");
    if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);
    for (std::size_t i = 0; i < header.size(); ++i) columns_[trim(header[i])] = i;
    for (const auto& col : required)
      if (!columns_.count(col)) throw Error(name_ + ": missing required column '" + col + "'");
  }

  bool next() { return reader_->next(row_); }

  /// Field value, or an error naming file and line when absent or empty.
  std::string require(const std::string& column) const {
    auto v = get(column);
    if (v.empty()) throw Error(name_ + ":" + std::to_string(reader_->line()) + ": missing value for '" + column + "'");
    return v;
  }

  std::string get(const std::string& column) const {
    auto it = columns_.find(column);
    if (it == columns_.end() || it->second >= row_.size()) return {};
    return trim(row_[it->second]);
  }

  std::string where() const { return name_ + ":" + std::to_string(reader_->line()); }

private:
  static std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
  }

  std::ifstream file_;
  std::string name_;
  std::optional<CsvReader> reader_;
  std::unordered_map<std::string, std::size_t> columns_;
  std::vector<std::string> row_;
};

struct LoadResult {
  Instance instance;
  std::vector<std::string> route_ids;  // route of each connection
  std::vector<std::string> warnings;
};

inline LoadResult load_gtfs(const std::filesystem::path& dir) {
  LoadResult res;

  std::unordered_set<std::string> stops;
  {
    Table t(dir / "stops.txt", {"stop_id"});
    while (t.next()) stops.insert(t.require("stop_id"));
  }

  std::vector<std::string> route_order;
  std::unordered_set<std::string> routes;
  {
    Table t(dir / "routes.txt", {"route_id"});
    while (t.next()) {
      auto id = t.require("route_id");
      if (routes.insert(id).second) route_order.push_back(id);
    }
  }

  std::map<std::string, std::string> chosen_trip;  // route -> smallest trip_id
  {
    Table t(dir / "trips.txt", {"route_id", "trip_id"});
    while (t.next()) {
      auto route = t.require("route_id");
      auto trip = t.require("trip_id");
      if (!routes.count(route)) throw Error(t.where() + ": trip '" + trip + "' references unknown route '" + route + "'");
      auto [it, inserted] = chosen_trip.try_emplace(route, trip);
      if (!inserted && trip < it->second) it->second = trip;
    }
  }
  std::unordered_map<std::string, std::string> route_of_trip;
  for (const auto& [route, trip] : chosen_trip) route_of_trip[trip] = route;

  std::unordered_map<std::string, std::vector<std::pair<long long, std::string>>> stop_lists;
  {
    Table t(dir / "stop_times.txt", {"trip_id", "stop_id", "stop_sequence"});
    while (t.next()) {
      auto trip = t.require("trip_id");
      if (!route_of_trip.count(trip)) continue;
      auto stop = t.require("stop_id");
      if (!stops.count(stop)) throw Error(t.where() + ": trip '" + trip + "' references unknown stop '" + stop + "'");
      auto seq_text = t.require("stop_sequence");
      long long seq = 0;
      try {
        std::size_t used = 0;
        seq = std::stoll(seq_text, &used);
        if (used != seq_text.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw Error(t.where() + ": bad stop_sequence '" + seq_text + "'");
      }
      stop_lists[trip].emplace_back(seq, stop);
    }
  }

  std::vector<TokenSequence> conns;
  for (const auto& route : route_order) {
    auto it = chosen_trip.find(route);
    if (it == chosen_trip.end()) {
      res.warnings.push_back("route '" + route + "' has no trips; skipped");
      continue;
    }
    auto& list = stop_lists[it->second];
    if (list.empty()) {
      res.warnings.push_back("route '" + route + "': trip '" + it->second + "' has no stop times; skipped");
      continue;
    }
    std::stable_sort(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    TokenSequence seq;
    for (const auto& [_, stop] : list)
      if (seq.empty() || seq.back() != stop) seq.push_back(stop);
    conns.push_back(std::move(seq));
    res.route_ids.push_back(route);
  }
  res.instance = build_instance(conns);
  return res;
}

}  // namespace stationcover::gtfs
