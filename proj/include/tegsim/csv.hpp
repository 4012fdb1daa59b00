#pragma once

#include <cmath>
#include <cstdio>
#include <ctime>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "tegsim/error.hpp"

namespace tegsim {

// A result table. Cells are preformatted strings so that output is fully
// determined by the table contents.
struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> notes;  // extra comment lines
  int plot_x = -1;  // columns for the two-column plot variant, -1 when not plottable
  int plot_y = -1;

  void add(std::vector<std::string> row) {
    detail::require(row.size() == columns.size(), "table " + name + ": row width does not match header");
    rows.push_back(std::move(row));
  }
};

inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string fmt(int v) { return std::to_string(v); }

// Quotes a cell when it holds a separator, quote or newline.
inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct CsvHeader {
  std::string command;
  std::string config_hash;
  std::string config_json;  // compact resolved config
  bool timestamp = true;
};

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void write_csv(std::ostream& os, const Table& t, const CsvHeader& h) {
  os << "# tegsim " << h.command << "\n";
  os << "# config_hash: " << h.config_hash << "\n";
  if (h.timestamp) os << "# generated: " << utc_timestamp() << "\n";
  for (const auto& n : t.notes) os << "# " << n << "\n";
  os << "# config: " << h.config_json << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_escape(t.columns[i]);
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(row[i]);
    os << "\n";
  }
}

/// Bare whitespace-separated x y pairs; rows whose y is not finite are skipped.
inline void write_plot(std::ostream& os, const Table& t) {
  detail::require(t.plot_x >= 0 && t.plot_y >= 0, "table " + t.name + " has no plot columns");
  for (const auto& row : t.rows) {
    const std::string& y = row[static_cast<std::size_t>(t.plot_y)];
    if (y == "nan" || y == "inf" || y == "-inf") continue;
    os << row[static_cast<std::size_t>(t.plot_x)] << " " << y << "\n";
  }
}

}  // namespace tegsim
