#pragma once

// Scenario and trip-list files (JSON).
//
//   {"seed": 7, "poll_interval": 30,
//    "events": [{"t": 30, "edge": 2, "factor": 0.4}, ...],
//    "random_events": {"count": 20, "t_max": 600, "factor_min": 0.3,
//                      "factor_max": 1.0, "edges": [1, 2, 3]}}
//
// `random_events` is optional; its draws come from `seed` and are merged into
// the explicit timeline, explicit events first on equal times. Omitting
// "edges" draws from every edge of the graph.
//
//   [{"id": "t1", "from": 1, "to": 4, "start": 0},
//    {"id": "t2", "from": {"lat": 40.7, "lon": -74.0}, "to": {...}}]

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "urbanflow/realtime/trip.hpp"
#include "urbanflow/realtime/updates.hpp"
#include "urbanflow/rng.hpp"

namespace urbanflow::realtime {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioEvent {
  double t = 0;
  EdgeId edge = 0;
  double factor = 1;

  bool operator==(const ScenarioEvent&) const = default;
};

struct RandomEvents {
  std::size_t count = 0;
  double t_max = 0;
  double factor_min = 0.3;
  double factor_max = 1.0;
  std::vector<EdgeId> edges;  // empty: all edges of the graph
};

struct Scenario {
  std::uint64_t seed = 0;
  double poll_interval = kDefaultPollInterval;
  std::vector<ScenarioEvent> events;  // time-ordered
  std::optional<RandomEvents> random;
};

inline void validate(const Scenario& s) {
  if (!(s.poll_interval > 0) || !std::isfinite(s.poll_interval))
    throw ScenarioError("poll_interval must be positive");
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    if (!std::isfinite(s.events[i].t) || s.events[i].t < 0) throw ScenarioError("event time must be >= 0");
    if (i > 0 && s.events[i].t < s.events[i - 1].t) throw ScenarioError("events are not time-ordered");
  }
  if (s.random) {
    const auto& r = *s.random;
    if (!(r.t_max >= 0)) throw ScenarioError("random_events.t_max must be >= 0");
    if (!valid_factor(r.factor_min) || !valid_factor(r.factor_max) || r.factor_min > r.factor_max)
      throw ScenarioError("random_events factor range must lie in (0, 1]");
  }
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
  try {
    Scenario s;
    s.seed = j.value("seed", std::uint64_t{0});
    s.poll_interval = j.value("poll_interval", kDefaultPollInterval);
    if (j.contains("events"))
      for (const auto& e : j.at("events"))
        s.events.push_back({e.at("t").get<double>(), e.at("edge").get<EdgeId>(), e.at("factor").get<double>()});
    if (j.contains("random_events")) {
      const auto& r = j.at("random_events");
      RandomEvents re;
      re.count = r.at("count").get<std::size_t>();
      re.t_max = r.at("t_max").get<double>();
      re.factor_min = r.value("factor_min", re.factor_min);
      re.factor_max = r.value("factor_max", re.factor_max);
      if (r.contains("edges")) re.edges = r.at("edges").get<std::vector<EdgeId>>();
      s.random = re;
    }
    validate(s);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  }
}

inline Scenario parse_scenario(std::istream& in) {
  try {
    return scenario_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  }
}

inline Scenario parse_scenario(const std::string& text) {
  try {
    return scenario_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  }
}

inline nlohmann::json to_json(const Scenario& s) {
  nlohmann::json j{{"seed", s.seed}, {"poll_interval", s.poll_interval}, {"events", nlohmann::json::array()}};
  for (const auto& e : s.events) j["events"].push_back({{"t", e.t}, {"edge", e.edge}, {"factor", e.factor}});
  if (s.random) {
    const auto& r = *s.random;
    j["random_events"] = {{"count", r.count},
                          {"t_max", r.t_max},
                          {"factor_min", r.factor_min},
                          {"factor_max", r.factor_max},
                          {"edges", r.edges}};
  }
  return j;
}

/// Explicit events plus the seeded random draws, in time order.
inline std::vector<ScenarioEvent> timeline(const Scenario& s, const routing::RoadGraph& g) {
  std::vector<ScenarioEvent> out = s.events;
  if (s.random && s.random->count > 0) {
    const auto& r = *s.random;
    std::vector<EdgeId> pool = r.edges;
    if (pool.empty())
      for (const auto& e : g.edges()) pool.push_back(e.id);
    if (pool.empty()) throw ScenarioError("random_events: graph has no edges");
    Rng rng(s.seed);
    std::vector<ScenarioEvent> drawn;
    for (std::size_t i = 0; i < r.count; ++i) {
      ScenarioEvent e;
      e.t = rng.uniform(0.0, r.t_max);
      e.edge = pool[rng.below(pool.size())];
      e.factor = r.factor_min == r.factor_max ? r.factor_min : rng.uniform(r.factor_min, r.factor_max);
      drawn.push_back(e);
    }
    out.insert(out.end(), drawn.begin(), drawn.end());
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
  }
  return out;
}

struct TripRequest {
  std::string id;
  std::variant<NodeId, routing::LatLon> from;
  std::variant<NodeId, routing::LatLon> to;
  double start = 0;
};

namespace scenario_detail {
inline std::variant<NodeId, routing::LatLon> endpoint(const nlohmann::json& j) {
  if (j.is_number_integer()) return j.get<NodeId>();
  return routing::LatLon{j.at("lat").get<double>(), j.at("lon").get<double>()};
}
}  // namespace scenario_detail

inline std::vector<TripRequest> trips_from_json(const nlohmann::json& j) {
  try {
    std::vector<TripRequest> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
      const auto& t = j.at(i);
      TripRequest r;
      r.id = t.contains("id") ? t.at("id").get<std::string>() : "trip-" + std::to_string(i + 1);
      r.from = scenario_detail::endpoint(t.at("from"));
      r.to = scenario_detail::endpoint(t.at("to"));
      r.start = t.value("start", 0.0);
      if (!std::isfinite(r.start) || r.start < 0) throw ScenarioError("trip " + r.id + ": start must be >= 0");
      out.push_back(std::move(r));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("trips: ") + e.what());
  }
}

inline std::vector<TripRequest> parse_trips(std::istream& in) {
  try {
    return trips_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("trips: ") + e.what());
  }
}

}  // namespace urbanflow::realtime
