#pragma once

// Key-value configuration files:
//
//   # comment
//   port = 8080
//   graph = "data/demo.graph"
//   [models]
//   duration = "model.mf"        # read back as "models.duration"
//
// Values may be quoted with double quotes; unquoted values run to the end of
// the line or to a `#`. Keys under a [section] get the section name as a
// dotted prefix.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "urbanflow/realtime/trip.hpp"
#include "urbanflow/spatiotemporal/aggregate.hpp"
#include "urbanflow/spatiotemporal/grid.hpp"

namespace urbanflow::service {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in) {
    KeyValueConfig cfg;
    std::string line, section;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      const auto text = trim(strip_comment(line));
      if (text.empty()) continue;
      if (text.front() == '[') {
        if (text.back() != ']') throw ConfigError("line " + std::to_string(n) + ": unterminated section header");
        section = trim(text.substr(1, text.size() - 2));
        if (section.empty()) throw ConfigError("line " + std::to_string(n) + ": empty section name");
        continue;
      }
      const auto eq = text.find('=');
      if (eq == std::string::npos) throw ConfigError("line " + std::to_string(n) + ": expected key = value");
      std::string key = trim(text.substr(0, eq));
      std::string value = trim(text.substr(eq + 1));
      if (key.empty()) throw ConfigError("line " + std::to_string(n) + ": empty key");
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
      else if (!value.empty() && value.front() == '"')
        throw ConfigError("line " + std::to_string(n) + ": unterminated string");
      if (!section.empty()) key = section + "." + key;
      if (!cfg.values_.emplace(key, value).second)
        throw ConfigError("line " + std::to_string(n) + ": duplicate key '" + key + "'");
    }
    return cfg;
  }

  static KeyValueConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    return parse(in);
  }

  static KeyValueConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::optional<std::string> get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    used_.emplace(key);
    return it->second;
  }

  std::string get_or(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
  }

  double number(const std::string& key, double fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    try {
      std::size_t used = 0;
      const double d = std::stod(*v, &used);
      if (used != v->size() || !std::isfinite(d)) throw std::invalid_argument("");
      return d;
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': expected a number, got '" + *v + "'");
    }
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    const double d = number(key, static_cast<double>(fallback));
    if (d != std::floor(d)) throw ConfigError("key '" + key + "': expected an integer");
    return static_cast<std::int64_t>(d);
  }

  /// Keys never read, for typo detection.
  std::vector<std::string> unused() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
      if (!used_.count(k)) out.push_back(k);
    return out;
  }

 private:
  static std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') quoted = !quoted;
      if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
  }
  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string graph_path;
  std::optional<std::string> duration_model_path;
  std::optional<std::string> congestion_model_path;
  std::optional<std::string> data_path;  // cleaned trips for the analytics endpoints
  std::optional<std::string> scenario_path;
  double threshold = realtime::kDefaultThreshold;
  spatiotemporal::GridSpec grid;
  std::size_t min_support = spatiotemporal::kDefaultMinSupport;
  std::string timezone = "America/New_York";
};

/// Reads a ServiceConfig. Relative paths resolve against the working
/// directory. Throws ConfigError for unknown keys, bad values or files that
/// do not exist.
inline ServiceConfig service_config_from(const KeyValueConfig& kv) {
  ServiceConfig c;
  c.host = kv.get_or("host", c.host);
  const auto port = kv.integer("port", c.port);
  if (port < 0 || port > 65535) throw ConfigError("port must lie in [0, 65535]");
  c.port = static_cast<int>(port);
  const auto graph = kv.get("graph");
  if (!graph) throw ConfigError("missing required key 'graph'");
  c.graph_path = *graph;
  c.duration_model_path = kv.get("models.duration");
  if (!c.duration_model_path) c.duration_model_path = kv.get("duration_model");
  c.congestion_model_path = kv.get("models.congestion");
  if (!c.congestion_model_path) c.congestion_model_path = kv.get("congestion_model");
  c.data_path = kv.get("data");
  c.scenario_path = kv.get("scenario");
  c.threshold = kv.number("threshold", c.threshold);
  if (!(c.threshold > 0)) throw ConfigError("threshold must be positive");
  if (const auto g = kv.get("grid")) {
    try {
      const auto [rows, cols] = spatiotemporal::parse_grid_size(*g);
      c.grid.rows = rows;
      c.grid.cols = cols;
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("grid: ") + e.what());
    }
  }
  c.grid.bbox.lat_min = kv.number("bbox.lat_min", c.grid.bbox.lat_min);
  c.grid.bbox.lat_max = kv.number("bbox.lat_max", c.grid.bbox.lat_max);
  c.grid.bbox.lon_min = kv.number("bbox.lon_min", c.grid.bbox.lon_min);
  c.grid.bbox.lon_max = kv.number("bbox.lon_max", c.grid.bbox.lon_max);
  try {
    c.grid.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  const auto support = kv.integer("min_support", static_cast<std::int64_t>(c.min_support));
  if (support < 1) throw ConfigError("min_support must be at least 1");
  c.min_support = static_cast<std::size_t>(support);
  c.timezone = kv.get_or("timezone", c.timezone);

  if (const auto unused = kv.unused(); !unused.empty()) throw ConfigError("unknown config key '" + unused.front() + "'");
  auto must_exist = [](const std::optional<std::string>& p, const char* what) {
    if (p && !std::filesystem::exists(*p)) throw ConfigError(std::string(what) + " file not found: " + *p);
  };
  must_exist(c.graph_path, "graph");
  must_exist(c.duration_model_path, "duration model");
  must_exist(c.congestion_model_path, "congestion model");
  must_exist(c.data_path, "data");
  must_exist(c.scenario_path, "scenario");
  return c;
}

inline ServiceConfig load_service_config(const std::string& path) {
  return service_config_from(KeyValueConfig::load(path));
}

}  // namespace urbanflow::service
