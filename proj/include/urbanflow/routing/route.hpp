#pragma once

#include <limits>
#include <stdexcept>

#include "urbanflow/routing/search.hpp"

namespace urbanflow::routing {

/// Nearest node by haversine distance; ties go to the lower id.
inline NodeId snap(const LatLon& p, const RoadGraph& graph, double* distance_m = nullptr) {
  if (graph.node_count() == 0) throw std::invalid_argument("snap: empty graph");
  NodeIndex best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (NodeIndex i = 0; i < graph.node_count(); ++i) {
    const double d = haversine(p, graph.node(i).pos);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  if (distance_m) *distance_m = best_d;
  return graph.node(best).id;
}

struct RouteResult {
  Route route;  // route.found == false when unreachable
  double crow_flight_m = 0;
  NodeId origin_node = 0;
  NodeId dest_node = 0;
  double origin_snap_m = 0;
  double dest_snap_m = 0;
};

/// Point-to-point route: crow-flight distance, then A* between the snapped
/// endpoints.
inline RouteResult compute_route(const LatLon& origin, const LatLon& dest, const RoadGraph& graph,
                                 const TrafficSnapshot& snapshot, const HeuristicSpec& h) {
  RouteResult r;
  r.crow_flight_m = haversine(origin, dest);
  r.origin_node = snap(origin, graph, &r.origin_snap_m);
  r.dest_node = snap(dest, graph, &r.dest_snap_m);
  r.route = astar(graph, snapshot, r.origin_node, r.dest_node, h);
  return r;
}

}  // namespace urbanflow::routing
