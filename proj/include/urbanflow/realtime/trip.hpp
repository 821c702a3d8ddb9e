#pragma once

// Active trips, deviation checks and re-routing.
//
// A vehicle sits on arc `arc_pos` of its route with `progress` in [0, 1)
// of that arc already covered. ETAs count the uncovered part of the current
// arc plus every later arc. The predicted ETA uses the arc costs frozen when
// the route was assigned; the live ETA re-costs the same arcs under the
// latest snapshot.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "urbanflow/routing/route.hpp"
#include "urbanflow/routing/search.hpp"

namespace urbanflow::realtime {

using routing::HeuristicSpec;
using routing::NodeId;
using routing::RoadGraph;
using routing::Route;

inline constexpr double kDefaultThreshold = 0.20;
inline constexpr double kDefaultPollInterval = 30.0;

struct ActiveTrip {
  std::string id;
  NodeId origin = 0;
  NodeId destination = 0;
  Route route;                          // remaining plan, starting with the current arc
  std::vector<double> predicted_costs;  // per arc of `route`, at assignment
  std::size_t arc_pos = 0;
  double progress = 0;
  double started_at = 0;
  double predicted_eta = 0;  // ETA of the route at its latest assignment
  bool arrived = false;
  double arrived_at = 0;
  bool unreachable = false;  // last recalculation found no path
  std::size_t reroutes = 0;

  /// Last node the vehicle passed.
  NodeId position(const RoadGraph& g) const {
    if (route.arcs.empty()) return destination;
    if (arc_pos >= route.arcs.size()) return destination;
    return g.node(g.arc(route.arcs[arc_pos]).from).id;
  }

  bool operator==(const ActiveTrip&) const = default;
};

/// Trip on a freshly computed route. Predicted costs are taken from the
/// snapshot the route was computed under.
inline ActiveTrip start_trip(std::string id, const RoadGraph& g, const routing::TrafficSnapshot& snap, Route route,
                             double now) {
  ActiveTrip t;
  t.id = std::move(id);
  t.origin = route.nodes.empty() ? 0 : route.nodes.front();
  t.destination = route.nodes.empty() ? 0 : route.nodes.back();
  for (auto a : route.arcs) t.predicted_costs.push_back(routing::edge_cost(g.arc(a), snap));
  t.route = std::move(route);
  t.started_at = now;
  t.predicted_eta = t.route.cost_sec;
  if (t.route.arcs.empty()) {
    t.arrived = true;
    t.arrived_at = now;
  }
  return t;
}

namespace trip_detail {
template <class CostOf>
double remaining(const ActiveTrip& trip, CostOf&& cost_of) {
  if (trip.arrived || trip.arc_pos >= trip.route.arcs.size()) return 0.0;
  double s = (1.0 - trip.progress) * cost_of(trip.arc_pos);
  for (std::size_t i = trip.arc_pos + 1; i < trip.route.arcs.size(); ++i) s += cost_of(i);
  return s;
}
}  // namespace trip_detail

inline double predicted_remaining(const ActiveTrip& trip) {
  return trip_detail::remaining(trip, [&](std::size_t i) { return trip.predicted_costs[i]; });
}

/// Remaining time on the current route under `snap`.
inline double live_eta(const ActiveTrip& trip, const RoadGraph& g, const routing::TrafficSnapshot& snap) {
  return trip_detail::remaining(trip,
                                [&](std::size_t i) { return routing::edge_cost(g.arc(trip.route.arcs[i]), snap); });
}

/// The re-route trigger: live strictly exceeds predicted by more than the
/// threshold fraction.
inline bool deviation_triggered(double predicted, double live, double threshold) {
  return live > predicted * (1.0 + threshold);
}

struct DeviationReport {
  std::string trip_id;
  double predicted_eta = 0;
  double live_eta = 0;
  double ratio = 1;
  double threshold = kDefaultThreshold;
  bool triggered = false;

  bool operator==(const DeviationReport&) const = default;
};

inline DeviationReport make_report(std::string trip_id, double predicted, double live, double threshold) {
  DeviationReport r;
  r.trip_id = std::move(trip_id);
  r.predicted_eta = predicted;
  r.live_eta = live;
  r.threshold = threshold;
  if (predicted > 0) r.ratio = live / predicted;
  else r.ratio = live > 0 ? std::numeric_limits<double>::infinity() : 1.0;
  r.triggered = deviation_triggered(predicted, live, threshold);
  return r;
}

inline DeviationReport check_deviation(const ActiveTrip& trip, const RoadGraph& g,
                                       const routing::TrafficSnapshot& snap, double threshold) {
  return make_report(trip.id, predicted_remaining(trip), live_eta(trip, g, snap), threshold);
}

struct RecalcResult {
  bool adopted = false;
  bool unreachable = false;
  double old_live_eta = 0;
  double candidate_cost = std::numeric_limits<double>::infinity();
  Route candidate;  // full remaining plan from the vehicle's position
};

/// Best route from the vehicle's position under `snap`. A vehicle part-way
/// along an arc must finish it first. The trip switches only when the
/// candidate is strictly cheaper than finishing the current route.
inline RecalcResult recalculate(ActiveTrip& trip, const RoadGraph& g, const routing::TrafficSnapshot& snap,
                                const HeuristicSpec& h) {
  RecalcResult res;
  if (trip.arrived || trip.arc_pos >= trip.route.arcs.size()) return res;
  res.old_live_eta = live_eta(trip, g, snap);

  const auto& current = g.arc(trip.route.arcs[trip.arc_pos]);
  const bool mid_arc = trip.progress > 0;
  const NodeId from = g.node(mid_arc ? current.to : current.from).id;
  Route path = routing::astar(g, snap, from, trip.destination, h);
  if (!path.found) {
    res.unreachable = true;
    trip.unreachable = true;
    return res;
  }
  trip.unreachable = false;

  Route plan;
  plan.found = true;
  plan.snapshot_version = snap.version;
  plan.settled = path.settled;
  if (mid_arc) {
    plan.nodes.push_back(g.node(current.from).id);
    plan.edges.push_back(current.edge);
    plan.arcs.push_back(trip.route.arcs[trip.arc_pos]);
    plan.distance_m += current.length_m;
  }
  for (std::size_t i = 0; i < path.nodes.size(); ++i) plan.nodes.push_back(path.nodes[i]);
  plan.edges.insert(plan.edges.end(), path.edges.begin(), path.edges.end());
  plan.arcs.insert(plan.arcs.end(), path.arcs.begin(), path.arcs.end());
  plan.distance_m += path.distance_m;
  res.candidate_cost = (mid_arc ? (1.0 - trip.progress) * routing::edge_cost(current, snap) : 0.0) + path.cost_sec;
  plan.cost_sec = res.candidate_cost;
  res.candidate = plan;

  if (res.candidate_cost < res.old_live_eta) {
    res.adopted = true;
    trip.route = std::move(plan);
    trip.arc_pos = 0;
    trip.predicted_costs.clear();
    for (auto a : trip.route.arcs) trip.predicted_costs.push_back(routing::edge_cost(g.arc(a), snap));
    trip.predicted_eta = res.candidate_cost;
    ++trip.reroutes;
  }
  return res;
}

/// Moves the vehicle forward `dt` seconds at the speeds in `snap`.
inline void advance(ActiveTrip& trip, const RoadGraph& g, const routing::TrafficSnapshot& snap, double now,
                    double dt) {
  double elapsed = 0;
  while (!trip.arrived && elapsed < dt) {
    if (trip.arc_pos >= trip.route.arcs.size()) {
      trip.arrived = true;
      trip.arrived_at = now + elapsed;
      break;
    }
    const double cost = routing::edge_cost(g.arc(trip.route.arcs[trip.arc_pos]), snap);
    const double left = (1.0 - trip.progress) * cost;
    if (left <= dt - elapsed) {
      elapsed += left;
      ++trip.arc_pos;
      trip.progress = 0;
      if (trip.arc_pos == trip.route.arcs.size()) {
        trip.arrived = true;
        trip.arrived_at = now + elapsed;
      }
    } else {
      trip.progress += (dt - elapsed) / cost;
      elapsed = dt;
    }
  }
}

}  // namespace urbanflow::realtime
