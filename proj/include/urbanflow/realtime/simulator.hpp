#pragma once

// Virtual-clock trip simulation.
//
// Each tick covers [now, now + poll_interval):
//   1. vehicles move under the snapshot that held during the interval;
//   2. the clock advances and every event with t <= now is applied as one batch;
//   3. pending trips whose start time has come are dispatched;
//   4. every active trip gets a DeviationReport and is recalculated when it
//      triggers.
// Events and trips due at time 0 take effect on construction and add_trip.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "urbanflow/realtime/scenario.hpp"
#include "urbanflow/realtime/trip.hpp"
#include "urbanflow/realtime/updates.hpp"
#include "urbanflow/routing/route.hpp"

namespace urbanflow::realtime {

enum class TripStatus { Pending, Active, Arrived, Unreachable };

inline const char* to_string(TripStatus s) {
  switch (s) {
    case TripStatus::Pending: return "pending";
    case TripStatus::Active: return "active";
    case TripStatus::Arrived: return "arrived";
    case TripStatus::Unreachable: return "unreachable";
  }
  return "unknown";
}

struct TripState {
  TripRequest request;
  NodeId from = 0;
  NodeId to = 0;
  TripStatus status = TripStatus::Pending;
  ActiveTrip trip;  // meaningful once dispatched
  std::optional<DeviationReport> last_report;

  std::optional<double> realized() const {
    if (status != TripStatus::Arrived) return std::nullopt;
    return trip.arrived_at - trip.started_at;
  }
};

struct RerouteRecord {
  std::string trip_id;
  double old_live_eta = 0;
  double new_cost = 0;
  std::vector<NodeId> nodes;
};

struct TickLog {
  double t = 0;
  std::uint64_t snapshot_version = 0;
  std::vector<ScenarioEvent> applied;
  std::size_t rejected = 0;
  std::vector<std::string> dispatched;
  std::vector<std::string> arrived;
  std::vector<DeviationReport> reports;
  std::vector<RerouteRecord> reroutes;
};

class Simulator {
 public:
  /// `threshold` = +inf disables rerouting.
  Simulator(const routing::RoadGraph& graph, Scenario scenario, double threshold = kDefaultThreshold,
            routing::HeuristicSpec h = {})
      : graph_(graph), scenario_(std::move(scenario)), threshold_(threshold), h_(h), applier_(store_) {
    validate(scenario_);
    if (!(threshold_ > 0)) throw ScenarioError("threshold must be positive");
    events_ = timeline(scenario_, graph_);
    apply_due(nullptr);
  }

  double now() const { return now_; }
  double threshold() const { return threshold_; }
  const Scenario& scenario() const { return scenario_; }
  routing::SnapshotPtr snapshot() const { return store_.current(); }
  const std::vector<TripState>& trips() const { return trips_; }

  const TripState* find(const std::string& id) const {
    for (const auto& t : trips_)
      if (t.request.id == id) return &t;
    return nullptr;
  }

  /// Registers a trip; it is dispatched at once if its start time has come.
  /// Throws ScenarioError for an unknown node or a duplicate id.
  const TripState& add_trip(TripRequest req) {
    if (find(req.id)) throw ScenarioError("duplicate trip id " + req.id);
    TripState s;
    s.from = resolve(req.from);
    s.to = resolve(req.to);
    s.request = std::move(req);
    trips_.push_back(std::move(s));
    if (trips_.back().request.start <= now_) dispatch(trips_.back());
    return trips_.back();
  }

  TickLog tick() {
    const double dt = scenario_.poll_interval;
    const auto snap = store_.current();
    TickLog log;
    for (auto& s : trips_) {
      if (s.status != TripStatus::Active) continue;
      advance(s.trip, graph_, *snap, now_, dt);
      if (s.trip.arrived) {
        s.status = TripStatus::Arrived;
        log.arrived.push_back(s.request.id);
      }
    }
    ++ticks_;
    now_ = scenario_.poll_interval * static_cast<double>(ticks_);
    apply_due(&log);
    for (auto& s : trips_)
      if (s.status == TripStatus::Pending && s.request.start <= now_) {
        dispatch(s);
        log.dispatched.push_back(s.request.id);
      }
    const auto current = store_.current();
    log.t = now_;
    log.snapshot_version = current->version;
    for (auto& s : trips_) {
      if (s.status != TripStatus::Active) continue;
      auto report = check_deviation(s.trip, graph_, *current, threshold_);
      s.last_report = report;
      log.reports.push_back(report);
      if (!report.triggered) continue;
      const auto res = recalculate(s.trip, graph_, *current, h_);
      if (res.adopted) log.reroutes.push_back({s.request.id, res.old_live_eta, res.candidate_cost, s.trip.route.nodes});
    }
    return log;
  }

  /// Nothing left to move, dispatch or apply.
  bool finished() const {
    if (next_event_ < events_.size()) return false;
    for (const auto& s : trips_)
      if (s.status == TripStatus::Pending || s.status == TripStatus::Active) return false;
    return true;
  }

 private:
  NodeId resolve(const std::variant<NodeId, routing::LatLon>& p) const {
    if (const auto* id = std::get_if<NodeId>(&p)) {
      if (!graph_.has_node(*id)) throw ScenarioError("unknown node " + std::to_string(*id));
      return *id;
    }
    const auto& ll = std::get<routing::LatLon>(p);
    if (!routing::valid(ll)) throw ScenarioError("bad coordinate");
    return routing::snap(ll, graph_);
  }

  void dispatch(TripState& s) {
    const auto snap = store_.current();
    auto route = routing::astar(graph_, *snap, s.from, s.to, h_);
    if (!route.found) {
      s.status = TripStatus::Unreachable;
      return;
    }
    s.trip = start_trip(s.request.id, graph_, *snap, std::move(route), now_);
    s.status = s.trip.arrived ? TripStatus::Arrived : TripStatus::Active;
  }

  void apply_due(TickLog* log) {
    std::vector<TrafficUpdate> batch;
    while (next_event_ < events_.size() && events_[next_event_].t <= now_) {
      const auto& e = events_[next_event_++];
      batch.push_back({e.edge, e.factor, e.t});
      if (log) log->applied.push_back(e);
    }
    if (batch.empty()) return;
    const auto r = applier_.apply(batch);
    if (log) log->rejected = r.rejected;
  }

  const routing::RoadGraph& graph_;
  Scenario scenario_;
  double threshold_;
  routing::HeuristicSpec h_;
  routing::SnapshotStore store_;
  FeedApplier applier_;
  std::vector<ScenarioEvent> events_;
  std::size_t next_event_ = 0;
  std::vector<TripState> trips_;
  double now_ = 0;
  std::uint64_t ticks_ = 0;
};

// ---------------------------------------------------------------------------
// Logs

inline nlohmann::json to_json(const DeviationReport& r) {
  return {{"trip_id", r.trip_id}, {"predicted_eta", r.predicted_eta}, {"live_eta", r.live_eta},
          {"ratio", r.ratio},     {"threshold", r.threshold},         {"triggered", r.triggered}};
}

inline nlohmann::json to_json(const TickLog& t) {
  nlohmann::json j{{"t", t.t},
                   {"snapshot_version", t.snapshot_version},
                   {"applied", nlohmann::json::array()},
                   {"rejected", t.rejected},
                   {"dispatched", t.dispatched},
                   {"arrived", t.arrived},
                   {"reports", nlohmann::json::array()},
                   {"reroutes", nlohmann::json::array()}};
  for (const auto& e : t.applied) j["applied"].push_back({{"t", e.t}, {"edge", e.edge}, {"factor", e.factor}});
  for (const auto& r : t.reports) j["reports"].push_back(to_json(r));
  for (const auto& r : t.reroutes)
    j["reroutes"].push_back(
        {{"trip_id", r.trip_id}, {"old_live_eta", r.old_live_eta}, {"new_cost", r.new_cost}, {"nodes", r.nodes}});
  return j;
}

inline nlohmann::json to_json(const TripState& s) {
  nlohmann::json j{{"id", s.request.id},
                   {"from", s.from},
                   {"to", s.to},
                   {"start", s.request.start},
                   {"status", to_string(s.status)}};
  if (s.status == TripStatus::Active || s.status == TripStatus::Arrived) {
    j["started_at"] = s.trip.started_at;
    j["predicted_eta"] = s.trip.predicted_eta;
    j["reroutes"] = s.trip.reroutes;
    j["route"] = s.trip.route.nodes;
  }
  if (auto r = s.realized()) {
    j["arrived_at"] = s.trip.arrived_at;
    j["realized_sec"] = *r;
  }
  return j;
}

struct ScenarioRun {
  std::vector<TickLog> ticks;
  std::vector<TripState> trips;
  bool completed = false;  // false when max_ticks ran out first
};

inline constexpr std::size_t kDefaultMaxTicks = 100000;

/// Runs until every trip has arrived (or cannot) and every event is applied.
inline ScenarioRun run_scenario(const routing::RoadGraph& graph, const Scenario& scenario,
                                const std::vector<TripRequest>& trips, double threshold,
                                const routing::HeuristicSpec& h, std::size_t max_ticks = kDefaultMaxTicks) {
  Simulator sim(graph, scenario, threshold, h);
  for (const auto& t : trips) sim.add_trip(t);
  ScenarioRun run;
  while (!sim.finished() && run.ticks.size() < max_ticks) run.ticks.push_back(sim.tick());
  run.completed = sim.finished();
  run.trips = sim.trips();
  return run;
}

inline nlohmann::json to_json(const ScenarioRun& run, double threshold) {
  nlohmann::json j{{"threshold", std::isfinite(threshold) ? nlohmann::json(threshold) : nlohmann::json("inf")},
                   {"completed", run.completed},
                   {"ticks", nlohmann::json::array()},
                   {"trips", nlohmann::json::array()}};
  for (const auto& t : run.ticks) j["ticks"].push_back(to_json(t));
  for (const auto& s : run.trips) j["trips"].push_back(to_json(s));
  return j;
}

struct PairedTrip {
  std::string id;
  std::optional<double> rerouted;
  std::optional<double> baseline;
};

struct PairedRun {
  ScenarioRun rerouted;
  ScenarioRun baseline;
  std::vector<PairedTrip> trips;
  double total_rerouted = 0;  // over trips that arrived in both runs
  double total_baseline = 0;

  /// Rerouted over baseline total realized time; 1 when there is nothing to compare.
  double ratio() const { return total_baseline > 0 ? total_rerouted / total_baseline : 1.0; }
};

/// The same scenario twice: with rerouting at `threshold`, and without.
inline PairedRun simulate_paired(const routing::RoadGraph& graph, const Scenario& scenario,
                                 const std::vector<TripRequest>& trips, double threshold,
                                 const routing::HeuristicSpec& h, std::size_t max_ticks = kDefaultMaxTicks) {
  PairedRun p;
  p.rerouted = run_scenario(graph, scenario, trips, threshold, h, max_ticks);
  p.baseline =
      run_scenario(graph, scenario, trips, std::numeric_limits<double>::infinity(), h, max_ticks);
  for (std::size_t i = 0; i < p.rerouted.trips.size(); ++i) {
    PairedTrip t{p.rerouted.trips[i].request.id, p.rerouted.trips[i].realized(), p.baseline.trips[i].realized()};
    if (t.rerouted && t.baseline) {
      p.total_rerouted += *t.rerouted;
      p.total_baseline += *t.baseline;
    }
    p.trips.push_back(t);
  }
  return p;
}

inline nlohmann::json to_json(const PairedRun& p, double threshold) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  nlohmann::json summary{{"threshold", threshold},
                         {"total_realized_rerouted", p.total_rerouted},
                         {"total_realized_baseline", p.total_baseline},
                         {"ratio", p.ratio()},
                         {"improvement", 1.0 - p.ratio()},
                         {"trips", nlohmann::json::array()}};
  for (const auto& t : p.trips) {
    nlohmann::json row{{"id", t.id}, {"realized_rerouted", opt(t.rerouted)}, {"realized_baseline", opt(t.baseline)}};
    if (t.rerouted && t.baseline && *t.baseline > 0) row["improvement"] = 1.0 - *t.rerouted / *t.baseline;
    summary["trips"].push_back(row);
  }
  return {{"summary", summary},
          {"rerouted", to_json(p.rerouted, threshold)},
          {"baseline", to_json(p.baseline, std::numeric_limits<double>::infinity())}};
}

}  // namespace urbanflow::realtime
