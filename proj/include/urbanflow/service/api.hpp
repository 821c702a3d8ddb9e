#pragma once

// HTTP API, independent of any socket: `Api::handle` maps a request to a
// status and JSON body. All coordinates are {"lat": .., "lon": ..} objects
// and geometry is a list of [lat, lon] pairs.
//
// Errors carry {"error": {"code", "message", "details"}} with code one of
// BAD_REQUEST, BAD_COORDINATE, NO_ROUTE, MODEL_NOT_LOADED, EMPTY_BIN,
// NO_SCENARIO, NOT_FOUND, INTERNAL.
//
// Trip state lives in memory only and is lost on restart.

#include <charconv>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "urbanflow/ingest/pipeline.hpp"
#include "urbanflow/ml/duration.hpp"
#include "urbanflow/ml/model_file.hpp"
#include "urbanflow/realtime/simulator.hpp"
#include "urbanflow/routing/route.hpp"
#include "urbanflow/service/config.hpp"
#include "urbanflow/spatiotemporal/aggregate.hpp"
#include "urbanflow/spatiotemporal/heatmap.hpp"

namespace urbanflow::service {

using nlohmann::json;

struct Response {
  int status = 200;
  json body;
};

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

namespace code {
inline constexpr const char* kBadRequest = "BAD_REQUEST";
inline constexpr const char* kBadCoordinate = "BAD_COORDINATE";
inline constexpr const char* kNoRoute = "NO_ROUTE";
inline constexpr const char* kModelNotLoaded = "MODEL_NOT_LOADED";
inline constexpr const char* kEmptyBin = "EMPTY_BIN";
inline constexpr const char* kNoScenario = "NO_SCENARIO";
inline constexpr const char* kNotFound = "NOT_FOUND";
inline constexpr const char* kInternal = "INTERNAL";
}  // namespace code

/// Thrown inside handlers; converted to an error response.
struct ApiError {
  int status;
  std::string code;
  std::string message;
  json details = json::object();
};

inline Response error_response(const ApiError& e) {
  return {e.status, {{"error", {{"code", e.code}, {"message", e.message}, {"details", e.details}}}}};
}

/// Precomputed aggregates behind the analytics endpoints.
struct Analytics {
  spatiotemporal::GridSpec grid;
  spatiotemporal::TemporalAggregation temporal;
  std::vector<spatiotemporal::CongestionCell> cells;  // every bin, sorted by (bin, row, col)
  std::size_t trips = 0;
};

inline Analytics build_analytics(std::span<const ingest::EngineeredTrip> trips, const spatiotemporal::GridSpec& grid,
                                 std::size_t min_support) {
  Analytics a;
  a.grid = grid;
  a.temporal = spatiotemporal::aggregate_temporal(trips);
  a.cells = spatiotemporal::aggregate_spatial(trips, grid, {}, min_support).cells;
  a.trips = trips.size();
  return a;
}

inline json temporal_json(const spatiotemporal::TemporalAggregation& agg, double top_q) {
  json bins = json::array();
  for (int b = 0; b < spatiotemporal::kTimeBins; ++b) {
    const auto bin = spatiotemporal::TimeBin::from_index(b);
    const auto& v = agg.index[static_cast<std::size_t>(b)];
    bins.push_back({{"day", bin.day_of_week},
                    {"hour", bin.hour},
                    {"trip_count", agg.counts[static_cast<std::size_t>(b)]},
                    {"congestion_index", v ? json(*v) : json(nullptr)}});
  }
  json peaks = json::array();
  for (const auto& p : spatiotemporal::peak_periods(agg, top_q)) peaks.push_back({{"day", p.day_of_week}, {"hour", p.hour}});
  return {{"bins", bins}, {"peaks", peaks}, {"peak_top_q", top_q}};
}

inline constexpr double kDefaultPeakTopQ = 0.15;

/// Loaded artifacts. Immutable once the Api is constructed.
struct ServiceState {
  routing::RoadGraph graph;
  routing::HeuristicSpec heuristic;
  std::optional<ml::ModelFile> duration_model;
  std::optional<ml::ModelFile> congestion_model;
  std::optional<Analytics> analytics;
  std::optional<realtime::Scenario> scenario;  // started at construction
  double threshold = realtime::kDefaultThreshold;
};

namespace api_detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json geometry(const routing::RoadGraph& g, const std::vector<routing::NodeId>& nodes) {
  json out = json::array();
  for (auto id : nodes) {
    const auto& p = g.node(g.index_of(id)).pos;
    out.push_back({p.lat, p.lon});
  }
  return out;
}

inline json route_json(const routing::RoadGraph& g, const routing::Route& r) {
  return {{"found", r.found},
          {"cost_sec", r.cost_sec},
          {"distance_m", r.distance_m},
          {"snapshot_version", r.snapshot_version},
          {"nodes", r.nodes},
          {"edges", r.edges},
          {"geometry", geometry(g, r.nodes)}};
}

inline json parse_body(const std::string& body) {
  try {
    auto j = json::parse(body);
    if (!j.is_object()) throw ApiError{400, code::kBadRequest, "request body must be a JSON object"};
    return j;
  } catch (const json::exception& e) {
    throw ApiError{400, code::kBadRequest, std::string("malformed JSON body: ") + e.what()};
  }
}

inline routing::LatLon coordinate(const json& body, const char* field) {
  if (!body.contains(field))
    throw ApiError{400, code::kBadCoordinate, std::string("missing coordinate '") + field + "'", {{"field", field}}};
  const auto& c = body.at(field);
  auto bad = [&](const std::string& why) {
    return ApiError{400, code::kBadCoordinate, std::string("bad coordinate '") + field + "': " + why, {{"field", field}}};
  };
  if (!c.is_object()) throw bad("expected {\"lat\": .., \"lon\": ..}");
  if (!c.contains("lat") || !c.at("lat").is_number()) throw bad("lat must be a number");
  if (!c.contains("lon") || !c.at("lon").is_number()) throw bad("lon must be a number");
  routing::LatLon p{c.at("lat").get<double>(), c.at("lon").get<double>()};
  if (!routing::valid(p)) throw bad("lat must lie in [-90, 90] and lon in [-180, 180]");
  return p;
}

inline int int_param(const std::map<std::string, std::string>& q, const std::string& name, int lo, int hi) {
  auto it = q.find(name);
  if (it == q.end()) throw ApiError{400, code::kBadRequest, "missing query parameter '" + name + "'", {{"field", name}}};
  int v = 0;
  const auto& s = it->second;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v < lo || v > hi)
    throw ApiError{400, code::kBadRequest,
                   name + " must be an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]",
                   {{"field", name}, {"value", s}}};
  return v;
}

}  // namespace api_detail

/// Loads everything a ServiceConfig names. Throws on any load failure.
inline ServiceState load_state(const ServiceConfig& cfg) {
  ServiceState s;
  s.graph = routing::load_graph(api_detail::read_file(cfg.graph_path));
  s.heuristic = routing::HeuristicSpec::haversine_for(s.graph);
  s.threshold = cfg.threshold;
  if (cfg.duration_model_path) {
    auto mf = ml::load_model(api_detail::read_file(*cfg.duration_model_path));
    if (!std::holds_alternative<ml::LinRegModel>(mf.model))
      throw std::runtime_error(*cfg.duration_model_path + ": not a regression model");
    s.duration_model = std::move(mf);
  }
  if (cfg.congestion_model_path) {
    auto mf = ml::load_model(api_detail::read_file(*cfg.congestion_model_path));
    if (!std::holds_alternative<ml::KMeansModel>(mf.model))
      throw std::runtime_error(*cfg.congestion_model_path + ": not a clustering model");
    s.congestion_model = std::move(mf);
  }
  if (cfg.data_path) {
    const auto tz = ingest::TimeZone::load(cfg.timezone);
    const auto trips = ingest::load_engineered(*cfg.data_path, tz);
    s.analytics = build_analytics(trips, cfg.grid, cfg.min_support);
  }
  if (cfg.scenario_path) s.scenario = realtime::parse_scenario(api_detail::read_file(*cfg.scenario_path));
  return s;
}

class Api {
 public:
  explicit Api(std::shared_ptr<const ServiceState> state) : state_(std::move(state)) {
    if (state_->scenario) start_sim(*state_->scenario, state_->threshold);
  }

  Response handle(const Request& req) const {
    try {
      return dispatch(req);
    } catch (const ApiError& e) {
      return error_response(e);
    } catch (const std::exception& e) {
      return error_response({500, code::kInternal, e.what()});
    }
  }

  Response handle(const std::string& method, const std::string& path, const std::string& body = "",
                  std::map<std::string, std::string> query = {}) const {
    return handle(Request{method, path, std::move(query), body});
  }

 private:
  Response dispatch(const Request& req) const {
    const auto& p = req.path;
    const auto& m = req.method;
    if (p == "/api/health") return only(m, "GET", [&] { return health(); });
    if (p == "/api/route") return only(m, "POST", [&] { return route(req); });
    if (p == "/api/predict-duration") return only(m, "POST", [&] { return predict(req); });
    if (p == "/api/congestion") return only(m, "GET", [&] { return congestion(req); });
    if (p == "/api/stats/temporal") return only(m, "GET", [&] { return temporal(); });
    if (p == "/api/trips") return only(m, "POST", [&] { return create_trip(req); });
    if (p.starts_with("/api/trips/") && p.size() > 11)
      return only(m, "GET", [&] { return trip_status(p.substr(11)); });
    if (p == "/api/sim/start") return only(m, "POST", [&] { return sim_start(req); });
    if (p == "/api/sim/tick") return only(m, "POST", [&] { return sim_tick(); });
    throw ApiError{404, code::kNotFound, "no such endpoint: " + m + " " + p};
  }

  template <class F>
  Response only(const std::string& method, const char* allowed, F&& f) const {
    if (method != allowed)
      throw ApiError{404, code::kNotFound, "no such endpoint: " + method + " (use " + allowed + ")"};
    return f();
  }

  struct Sim {
    std::mutex mu;  // one writer for the trip table
    std::unique_ptr<realtime::Simulator> sim;
    std::size_t next_id = 1;
  };

  std::shared_ptr<Sim> current_sim() const {
    std::lock_guard lock(sim_mu_);
    return sim_;
  }

  void start_sim(const realtime::Scenario& sc, double threshold) const {
    auto s = std::make_shared<Sim>();
    s->sim = std::make_unique<realtime::Simulator>(state_->graph, sc, threshold, state_->heuristic);
    std::lock_guard lock(sim_mu_);
    sim_ = std::move(s);
  }

  routing::SnapshotPtr snapshot() const {
    if (auto s = current_sim()) return s->sim->snapshot();
    return routing::free_flow_snapshot();
  }

  Response health() const {
    json j{{"status", "ok"},
           {"graph", {{"nodes", state_->graph.node_count()}, {"edges", state_->graph.edge_count()}}},
           {"models",
            {{"duration", state_->duration_model.has_value()}, {"congestion", state_->congestion_model.has_value()}}},
           {"analytics", state_->analytics.has_value()}};
    if (auto s = current_sim()) {
      std::lock_guard lock(s->mu);
      j["sim"] = {{"running", true}, {"t", s->sim->now()}, {"snapshot_version", s->sim->snapshot()->version}};
    } else {
      j["sim"] = {{"running", false}};
    }
    return {200, j};
  }

  Response route(const Request& req) const {
    const auto body = api_detail::parse_body(req.body);
    const auto origin = api_detail::coordinate(body, "origin");
    const auto dest = api_detail::coordinate(body, "dest");
    const auto snap = snapshot();
    const auto r = routing::compute_route(origin, dest, state_->graph, *snap, state_->heuristic);
    if (!r.route.found)
      throw ApiError{404, code::kNoRoute, "no route between the snapped endpoints",
                     {{"origin_node", r.origin_node}, {"dest_node", r.dest_node}}};
    json j = api_detail::route_json(state_->graph, r.route);
    j["crow_flight_m"] = r.crow_flight_m;
    j["origin_node"] = r.origin_node;
    j["dest_node"] = r.dest_node;
    j["origin_snap_m"] = r.origin_snap_m;
    j["dest_snap_m"] = r.dest_snap_m;
    return {200, j};
  }

  Response predict(const Request& req) const {
    if (!state_->duration_model) throw ApiError{409, code::kModelNotLoaded, "no duration model is loaded"};
    const auto& model = std::get<ml::LinRegModel>(state_->duration_model->model);
    auto body = api_detail::parse_body(req.body);
    const json& f = body.contains("features") ? body.at("features") : body;
    if (!f.is_object()) throw ApiError{400, code::kBadRequest, "features must be an object"};
    std::vector<double> x;
    x.reserve(model.feature_names.size());
    for (const auto& name : model.feature_names) x.push_back(feature(f, name));
    const double y = ml::linreg_predict(model, x);
    return {200, {{"duration_min", y}, {"features", model.feature_names}}};
  }

  /// Value of one model feature. One-hot columns may instead come from
  /// day_of_week / hour_of_day.
  static double feature(const json& f, const std::string& name) {
    auto number = [&](const std::string& key) {
      const auto& v = f.at(key);
      if (!v.is_number())
        throw ApiError{400, code::kBadRequest, "feature '" + key + "' must be a number", {{"field", key}}};
      return v.get<double>();
    };
    if (f.contains(name)) return number(name);
    auto onehot = [&](const std::string& source, int lo, int hi, int which) -> std::optional<double> {
      if (!f.contains(source)) return std::nullopt;
      const auto& v = f.at(source);
      if (!v.is_number_integer() || v.get<int>() < lo || v.get<int>() > hi)
        throw ApiError{400, code::kBadRequest,
                       source + " must be an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]",
                       {{"field", source}}};
      return v.get<int>() == which ? 1.0 : 0.0;
    };
    if (name.starts_with("day_") && name.size() == 5)
      if (auto v = onehot("day_of_week", 0, 6, name[4] - '0')) return *v;
    if (name.starts_with("hour_"))
      if (auto v = onehot("hour_of_day", 0, 23, std::stoi(name.substr(5)))) return *v;
    throw ApiError{400, code::kBadRequest, "missing feature '" + name + "'", {{"field", name}}};
  }

  Response congestion(const Request& req) const {
    const int day = api_detail::int_param(req.query, "day", 0, 6);
    const int hour = api_detail::int_param(req.query, "hour", 0, 23);
    if (!state_->analytics) throw ApiError{409, code::kModelNotLoaded, "analytics have not been built"};
    const auto& a = *state_->analytics;
    std::vector<spatiotemporal::CongestionCell> cells;
    for (const auto& c : a.cells)
      if (c.bin.day_of_week == day && c.bin.hour == hour) cells.push_back(c);
    if (cells.empty())
      throw ApiError{404, code::kEmptyBin, "no populated cells for this bin", {{"day", day}, {"hour", hour}}};
    const auto hm = spatiotemporal::build_heatmap(cells, a.grid, {day, hour});
    return {200, spatiotemporal::heatmap_geojson(hm)};
  }

  Response temporal() const {
    if (!state_->analytics) throw ApiError{409, code::kModelNotLoaded, "analytics have not been built"};
    return {200, temporal_json(state_->analytics->temporal, kDefaultPeakTopQ)};
  }

  json trip_json(const realtime::Simulator& sim, const realtime::TripState& s) const {
    const auto& g = state_->graph;
    json j = realtime::to_json(s);
    j["trip_id"] = s.request.id;
    j["t"] = sim.now();
    if (s.status == realtime::TripStatus::Active || s.status == realtime::TripStatus::Arrived) {
      const auto snap = sim.snapshot();
      j["route"] = api_detail::route_json(g, s.trip.route);
      j["position_node"] = s.trip.position(g);
      j["arc_pos"] = s.trip.arc_pos;
      j["progress"] = s.trip.progress;
      j["predicted_remaining"] = realtime::predicted_remaining(s.trip);
      j["live_eta"] = realtime::live_eta(s.trip, g, *snap);
    }
    j["last_report"] = s.last_report ? realtime::to_json(*s.last_report) : json(nullptr);
    return j;
  }

  std::variant<routing::NodeId, routing::LatLon> endpoint(const json& body, const char* field) const {
    if (body.contains(field) && body.at(field).is_number_integer()) {
      const auto id = body.at(field).get<routing::NodeId>();
      if (!state_->graph.has_node(id))
        throw ApiError{400, code::kBadCoordinate, std::string("unknown node in '") + field + "'", {{"field", field}}};
      return id;
    }
    return api_detail::coordinate(body, field);
  }

  Response create_trip(const Request& req) const {
    const auto body = api_detail::parse_body(req.body);
    realtime::TripRequest tr;
    tr.from = endpoint(body, "origin");
    tr.to = endpoint(body, "dest");
    auto s = current_sim();
    if (!s) throw ApiError{409, code::kNoScenario, "no scenario is running; POST /api/sim/start first"};
    std::lock_guard lock(s->mu);
    tr.start = s->sim->now();
    if (body.contains("id")) {
      if (!body.at("id").is_string()) throw ApiError{400, code::kBadRequest, "id must be a string", {{"field", "id"}}};
      tr.id = body.at("id").get<std::string>();
      if (s->sim->find(tr.id)) throw ApiError{400, code::kBadRequest, "trip id already exists", {{"field", "id"}}};
    } else {
      do tr.id = "trip-" + std::to_string(s->next_id++);
      while (s->sim->find(tr.id));
    }
    // Probe first so an unreachable request leaves no trace in the table.
    const auto& g = state_->graph;
    auto resolve = [&](const std::variant<routing::NodeId, routing::LatLon>& p) {
      if (auto id = std::get_if<routing::NodeId>(&p)) return *id;
      return routing::snap(std::get<routing::LatLon>(p), g);
    };
    const auto probe = routing::astar(g, *s->sim->snapshot(), resolve(tr.from), resolve(tr.to), state_->heuristic);
    if (!probe.found) throw ApiError{404, code::kNoRoute, "destination is unreachable"};
    const auto& added = s->sim->add_trip(tr);
    json j = trip_json(*s->sim, added);
    j["predicted_eta"] = added.trip.predicted_eta;
    return {201, j};
  }

  Response trip_status(const std::string& id) const {
    auto s = current_sim();
    if (!s) throw ApiError{404, code::kNotFound, "unknown trip '" + id + "'"};
    std::lock_guard lock(s->mu);
    const auto* t = s->sim->find(id);
    if (!t) throw ApiError{404, code::kNotFound, "unknown trip '" + id + "'"};
    return {200, trip_json(*s->sim, *t)};
  }

  Response sim_start(const Request& req) const {
    const auto body = api_detail::parse_body(req.body);
    // Without a body scenario, restart the configured one.
    if (!body.contains("scenario") && !state_->scenario)
      throw ApiError{400, code::kBadRequest, "missing field 'scenario'", {{"field", "scenario"}}};
    double threshold = state_->threshold;
    if (body.contains("threshold")) {
      if (!body.at("threshold").is_number() || !(body.at("threshold").get<double>() > 0))
        throw ApiError{400, code::kBadRequest, "threshold must be a positive number", {{"field", "threshold"}}};
      threshold = body.at("threshold").get<double>();
    }
    realtime::Scenario sc;
    try {
      sc = body.contains("scenario") ? realtime::scenario_from_json(body.at("scenario")) : *state_->scenario;
    } catch (const realtime::ScenarioError& e) {
      throw ApiError{400, code::kBadRequest, e.what(), {{"field", "scenario"}}};
    }
    start_sim(sc, threshold);
    auto s = current_sim();
    std::lock_guard lock(s->mu);
    return {200,
            {{"t", s->sim->now()},
             {"poll_interval", sc.poll_interval},
             {"threshold", threshold},
             {"snapshot_version", s->sim->snapshot()->version},
             {"scenario", realtime::to_json(sc)}}};
  }

  Response sim_tick() const {
    auto s = current_sim();
    if (!s) throw ApiError{409, code::kNoScenario, "no scenario is running; POST /api/sim/start first"};
    std::lock_guard lock(s->mu);
    const auto log = s->sim->tick();
    json j = realtime::to_json(log);
    j["finished"] = s->sim->finished();
    return {200, j};
  }

  std::shared_ptr<const ServiceState> state_;
  mutable std::mutex sim_mu_;
  mutable std::shared_ptr<Sim> sim_;
};

}  // namespace urbanflow::service
