#pragma once

// Tabular datasets and their CSV / JSON serializations.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "quench_duo/errors.hpp"

namespace quench_duo::appio {

/// How a dataset is meant to be drawn.
enum class PlotKind {
  line,      // first column on x, remaining columns as curves
  series,    // y against x, one curve per distinct value of the series columns
  stem,      // vertical lines (line spectra)
  heatmap,   // (x, y, value...) triples on a rectangular grid
};

struct Dataset {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> metadata;
  PlotKind kind = PlotKind::line;
  // Plot hints: column names used by the emitted script.
  std::string x_column, y_column;
  std::vector<std::string> series_columns;  // series: grouping keys; heatmap: value columns

  void add_meta(std::string key, std::string value) { metadata.emplace_back(std::move(key), std::move(value)); }

  void check_rectangular() const {
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (rows[r].size() != columns.size())
        throw InvariantError("dataset " + name + ": row " + std::to_string(r) + " has " +
                             std::to_string(rows[r].size()) + " entries, expected " + std::to_string(columns.size()));
  }
};

/// Shortest text that round-trips: 17 significant digits, '.' decimal point.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Filename stamp for a time value: 0.7854 -> "t0p7854", -1.5 -> "tm1p5000".
inline std::string time_stamp(double t) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4f", t);
  std::string s = "t";
  for (const char* c = buf; *c; ++c) {
    if (*c == '.')
      s += 'p';
    else if (*c == '-')
      s += 'm';
    else
      s += *c;
  }
  return s;
}

/// `#`-prefixed metadata lines, one header row, then data rows; `\n` endings.
inline std::string to_csv(const Dataset& ds) {
  ds.check_rectangular();
  std::string out;
  for (const auto& [k, v] : ds.metadata) out += "# " + k + ": " + v + "\n";
  for (std::size_t c = 0; c < ds.columns.size(); ++c) out += (c ? "," : "") + ds.columns[c];
  out += "\n";
  for (const auto& row : ds.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_number(row[c]);
    }
    out += '\n';
  }
  return out;
}

inline nlohmann::ordered_json to_json(const Dataset& ds) {
  ds.check_rectangular();
  nlohmann::ordered_json j;
  j["name"] = ds.name;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : ds.metadata) meta[k] = v;
  j["metadata"] = meta;
  j["columns"] = ds.columns;
  j["rows"] = ds.rows;
  return j;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw Error("write failed for " + path.string());
}

}  // namespace quench_duo::appio
