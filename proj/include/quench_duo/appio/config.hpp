#pragma once

// Run configuration: `key = value` text with `[section]` headers, CLI overrides.

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "quench_duo/errors.hpp"

namespace quench_duo::appio {

enum class Mode { spectrum, state, quench, evolve, converge };

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::spectrum: return "spectrum";
    case Mode::state: return "state";
    case Mode::quench: return "quench";
    case Mode::evolve: return "evolve";
    case Mode::converge: return "converge";
  }
  return "?";
}

inline Mode parse_mode(const std::string& s) {
  for (Mode m : {Mode::spectrum, Mode::state, Mode::quench, Mode::evolve, Mode::converge})
    if (s == mode_name(m)) return m;
  throw ConfigError("mode", "unknown mode '" + s + "' (spectrum|state|quench|evolve|converge)");
}

struct RunConfig {
  Mode mode = Mode::quench;
  // [model]
  double g_i = 0.0;
  double g_f = 0.0;
  int nu_i = 0;
  int basis_size = 1000;
  // [quench]
  int n_f = 100;
  std::vector<int> n_f_list{5, 10, 15, 20, 30, 50, 100, 200, 500, 1000};
  // [grid]
  double half_width = 6.0;
  int n_points = 400;
  // [time]
  double t_start = 0.0;
  double t_stop = 4.0 * std::numbers::pi;
  int t_count = 801;
  // [output]
  std::string output_dir = ".";
  std::vector<std::string> formats{"csv"};
  // [spectrum]
  double g_min = -5.0;
  double g_max = 5.0;
  int g_steps = 201;
  int levels = 6;

  bool operator==(const RunConfig&) const = default;

  std::vector<double> times() const {
    std::vector<double> t(static_cast<std::size_t>(t_count));
    for (int k = 0; k < t_count; ++k)
      t[static_cast<std::size_t>(k)] = t_count == 1 ? t_start : t_start + (t_stop - t_start) * k / (t_count - 1.0);
    return t;
  }

  bool wants(const std::string& format) const {
    return std::find(formats.begin(), formats.end(), format) != formats.end();
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double to_double(const std::string& key, const std::string& v) {
  if (v.empty()) throw ConfigError(key, "expected a number, got an empty value");
  char* end = nullptr;
  errno = 0;
  double d = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(d))
    throw ConfigError(key, "expected a finite number, got '" + v + "'");
  return d;
}

inline int to_int(const std::string& key, const std::string& v) {
  if (v.empty()) throw ConfigError(key, "expected an integer, got an empty value");
  char* end = nullptr;
  errno = 0;
  long n = std::strtol(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || errno == ERANGE || n < -2147483647L || n > 2147483647L)
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  return static_cast<int>(n);
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Section each key belongs to; keys are unique across sections.
inline const std::map<std::string, std::string>& config_keys() {
  static const std::map<std::string, std::string> keys = {
      {"mode", "run"},         {"g_i", "model"},        {"g_f", "model"},      {"nu_i", "model"},
      {"basis_size", "model"}, {"n_f", "quench"},       {"n_f_list", "quench"}, {"half_width", "grid"},
      {"n_points", "grid"},    {"t_start", "time"},     {"t_stop", "time"},    {"t_count", "time"},
      {"output_dir", "output"}, {"formats", "output"},  {"g_min", "spectrum"}, {"g_max", "spectrum"},
      {"g_steps", "spectrum"}, {"levels", "spectrum"}};
  return keys;
}

inline void validate(const RunConfig& c);

/// Accumulates settings from a file and from flags (later calls win), then
/// validates them into a RunConfig.
class ConfigBuilder {
 public:
  /// Reads `key = value` lines. `#` and `;` start comments.
  ConfigBuilder& load_text(const std::string& text) {
    std::stringstream in(text);
    std::string line, section;
    std::set<std::string> seen_here;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      auto cut = line.find_first_of("#;");
      if (cut != std::string::npos) line.erase(cut);
      line = detail::trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ConfigError("", "line " + std::to_string(line_no) + ": malformed section header");
        section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
        bool known = false;
        for (const auto& kv : config_keys()) known = known || kv.second == section;
        if (!known) throw ConfigError(section, "unknown section");
        continue;
      }
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
      std::string key = detail::trim(std::string_view(line).substr(0, eq));
      std::string value = detail::trim(std::string_view(line).substr(eq + 1));
      auto it = config_keys().find(key);
      if (it == config_keys().end()) throw ConfigError(key, "unknown key");
      if (!section.empty() && it->second != section)
        throw ConfigError(key, "belongs in section [" + it->second + "], found in [" + section + "]");
      if (!seen_here.insert(key).second) throw ConfigError(key, "given more than once");
      set(key, value);
    }
    return *this;
  }

  /// Sets one key; used for file entries and command-line overrides alike.
  ConfigBuilder& set(const std::string& key, const std::string& value) {
    if (!config_keys().count(key)) throw ConfigError(key, "unknown key");
    values_[key] = value;
    return *this;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  RunConfig build() const {
    RunConfig c;
    if (!has("mode")) throw ConfigError("mode", "missing required key");
    c.mode = parse_mode(values_.at("mode"));
    auto num = [&](const char* key, double& out) {
      if (has(key)) out = detail::to_double(key, values_.at(key));
    };
    auto integer = [&](const char* key, int& out) {
      if (has(key)) out = detail::to_int(key, values_.at(key));
    };
    num("g_i", c.g_i);
    num("g_f", c.g_f);
    integer("nu_i", c.nu_i);
    integer("basis_size", c.basis_size);
    integer("n_f", c.n_f);
    if (has("n_f_list")) {
      c.n_f_list.clear();
      for (const auto& item : detail::split_list(values_.at("n_f_list")))
        c.n_f_list.push_back(detail::to_int("n_f_list", item));
    }
    num("half_width", c.half_width);
    integer("n_points", c.n_points);
    if (c.mode == Mode::evolve) {
      // One snapshot set per time: keep the default window small.
      c.t_stop = std::numbers::pi;
      c.t_count = 5;
    }
    num("t_start", c.t_start);
    num("t_stop", c.t_stop);
    integer("t_count", c.t_count);
    if (has("output_dir")) c.output_dir = values_.at("output_dir");
    if (has("formats")) c.formats = detail::split_list(values_.at("formats"));
    num("g_min", c.g_min);
    num("g_max", c.g_max);
    integer("g_steps", c.g_steps);
    integer("levels", c.levels);

    auto require = [&](const char* key) {
      if (!has(key)) throw ConfigError(key, std::string("missing required key for mode ") + mode_name(c.mode));
    };
    if (c.mode == Mode::state) require("g_i");
    if (c.mode == Mode::quench || c.mode == Mode::evolve || c.mode == Mode::converge) {
      require("g_i");
      require("g_f");
    }
    validate(c);
    return c;
  }

 private:
  std::map<std::string, std::string> values_;
};

/// Range checks; each failure names the offending key.
inline void validate(const RunConfig& c) {
  auto fail = [](const char* key, const std::string& what) { throw ConfigError(key, what); };
  if (c.nu_i < 0) fail("nu_i", "must be >= 0");
  if (c.basis_size < 1 || c.basis_size > 4000) fail("basis_size", "must be in [1, 4000]");
  if (c.mode != Mode::spectrum && std::abs(c.g_i) < 1e-10 && c.nu_i >= c.basis_size)
    fail("nu_i", "must be below basis_size for a non-interacting initial state");
  if (c.n_f < 1) fail("n_f", "must be >= 1");
  if (c.n_f_list.empty()) fail("n_f_list", "must not be empty");
  for (std::size_t k = 0; k < c.n_f_list.size(); ++k) {
    if (c.n_f_list[k] < 1) fail("n_f_list", "entries must be >= 1");
    if (k > 0 && c.n_f_list[k] <= c.n_f_list[k - 1]) fail("n_f_list", "must be strictly increasing");
  }
  if (!(c.half_width > 0.0)) fail("half_width", "must be > 0");
  if (c.n_points < 16) fail("n_points", "must be >= 16");
  if (c.t_count < 1) fail("t_count", "must be >= 1");
  if (c.t_stop < c.t_start) fail("t_stop", "must be >= t_start");
  if (c.mode == Mode::evolve && c.t_count > 64) fail("t_count", "evolve writes one snapshot per time; at most 64");
  if (c.output_dir.empty()) fail("output_dir", "must not be empty");
  if (c.formats.empty()) fail("formats", "must list at least one of csv, json, plotscript");
  for (const auto& f : c.formats)
    if (f != "csv" && f != "json" && f != "plotscript") fail("formats", "unknown format '" + f + "'");
  if (c.wants("plotscript") && !c.wants("csv")) fail("formats", "plotscript reads the csv output; add csv");
  if (!(c.g_min < c.g_max)) fail("g_max", "must be > g_min");
  if (c.g_steps < 2) fail("g_steps", "must be >= 2");
  if (c.levels < 1) fail("levels", "must be >= 1");
}

inline RunConfig parse_config(const std::string& text) { return ConfigBuilder().load_text(text).build(); }

/// Text form accepted by parse_config; parse_config(serialize(c)) == c.
inline std::string serialize(const RunConfig& c) {
  using detail::format_double;
  auto join = [](const auto& items, auto fmt) {
    std::string s;
    for (std::size_t k = 0; k < items.size(); ++k) s += (k ? "," : "") + fmt(items[k]);
    return s;
  };
  std::ostringstream o;
  o << "[run]\nmode = " << mode_name(c.mode) << "\n\n";
  o << "[model]\ng_i = " << format_double(c.g_i) << "\ng_f = " << format_double(c.g_f) << "\nnu_i = " << c.nu_i
    << "\nbasis_size = " << c.basis_size << "\n\n";
  o << "[quench]\nn_f = " << c.n_f << "\nn_f_list = "
    << join(c.n_f_list, [](int v) { return std::to_string(v); }) << "\n\n";
  o << "[grid]\nhalf_width = " << format_double(c.half_width) << "\nn_points = " << c.n_points << "\n\n";
  o << "[time]\nt_start = " << format_double(c.t_start) << "\nt_stop = " << format_double(c.t_stop)
    << "\nt_count = " << c.t_count << "\n\n";
  o << "[output]\noutput_dir = " << c.output_dir << "\nformats = "
    << join(c.formats, [](const std::string& v) { return v; }) << "\n\n";
  o << "[spectrum]\ng_min = " << format_double(c.g_min) << "\ng_max = " << format_double(c.g_max)
    << "\ng_steps = " << c.g_steps << "\nlevels = " << c.levels << "\n";
  return o.str();
}

}  // namespace quench_duo::appio
