#pragma once

// Dijkstra and A* over travel-time arc costs.
//
// Both pop the open set in (key, node index) order, so equal keys resolve
// to the smaller node id, and both stop once the destination is settled.
// A* with the zero heuristic performs exactly the same expansions as
// Dijkstra.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "urbanflow/routing/geo.hpp"
#include "urbanflow/routing/graph.hpp"
#include "urbanflow/routing/snapshot.hpp"

namespace urbanflow::routing {

struct Route {
  bool found = false;
  std::vector<NodeId> nodes;
  std::vector<EdgeId> edges;
  std::vector<std::size_t> arcs;  // arc indices into the graph
  double cost_sec = 0;
  double distance_m = 0;
  std::uint64_t snapshot_version = 0;
  std::size_t settled = 0;  // nodes expanded by the search

  bool operator==(const Route&) const = default;
};

/// A* lower bound on remaining travel time: haversine distance to the goal
/// over the fastest free-flow speed in the graph, scaled down when some
/// edge is shorter than the straight line between its ends.
struct HeuristicSpec {
  enum class Kind { Zero, HaversineOverVmax };
  Kind kind = Kind::Zero;
  double vmax = 0;
  double scale = 1;

  static HeuristicSpec zero() { return {}; }

  static HeuristicSpec haversine_for(const RoadGraph& g) {
    HeuristicSpec h;
    h.kind = Kind::HaversineOverVmax;
    h.vmax = g.max_speed();
    double ratio = 1.0;
    for (const auto& a : g.arcs()) {
      const double straight = haversine(g.node(a.from).pos, g.node(a.to).pos);
      if (straight > 0) ratio = std::min(ratio, a.length_m / straight);
    }
    // Headroom for rounding in the haversine evaluation.
    h.scale = ratio * (1 - 1e-9);
    return h;
  }

  double operator()(const LatLon& from, const LatLon& goal) const {
    if (kind == Kind::Zero || vmax <= 0) return 0.0;
    return scale * haversine(from, goal) / vmax;
  }
};

struct SearchStats {
  std::vector<NodeIndex> expansion_order;
};

namespace search_detail {

struct Entry {
  double key;
  NodeIndex node;
  double g;
  bool operator>(const Entry& o) const { return key != o.key ? key > o.key : node > o.node; }
};

inline Route build_route(const RoadGraph& graph, const TrafficSnapshot& snap, NodeIndex src, NodeIndex dst,
                         const std::vector<std::size_t>& parent_arc, double cost, std::size_t settled) {
  Route r;
  r.found = true;
  r.snapshot_version = snap.version;
  r.settled = settled;
  std::vector<std::size_t> arcs;
  for (NodeIndex v = dst; v != src;) {
    const auto a = parent_arc[v];
    arcs.push_back(a);
    v = graph.arc(a).from;
  }
  std::reverse(arcs.begin(), arcs.end());
  r.nodes.push_back(graph.node(src).id);
  for (auto a : arcs) {
    const auto& arc = graph.arc(a);
    r.nodes.push_back(graph.node(arc.to).id);
    r.edges.push_back(arc.edge);
    r.distance_m += arc.length_m;
  }
  r.arcs = std::move(arcs);
  r.cost_sec = cost;
  return r;
}

inline constexpr std::size_t kNoArc = std::numeric_limits<std::size_t>::max();

template <class Heuristic>
Route best_first(const RoadGraph& graph, const TrafficSnapshot& snap, NodeIndex src, NodeIndex dst,
                 Heuristic&& h, SearchStats* stats) {
  const std::size_t n = graph.node_count();
  std::vector<double> g(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> parent(n, kNoArc);
  std::vector<bool> closed(n, false);
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  g[src] = 0;
  open.push({h(src), src, 0.0});
  std::size_t settled = 0;
  while (!open.empty()) {
    const Entry top = open.top();
    open.pop();
    if (top.g > g[top.node] || (closed[top.node] && top.g == g[top.node])) continue;
    closed[top.node] = true;
    ++settled;
    if (stats) stats->expansion_order.push_back(top.node);
    if (top.node == dst) return build_route(graph, snap, src, dst, parent, g[dst], settled);
    const auto [first, last] = graph.out_arcs(top.node);
    for (auto a = first; a < last; ++a) {
      const Arc& arc = graph.arc(a);
      const double nd = g[top.node] + edge_cost(arc, snap);
      if (nd < g[arc.to]) {
        g[arc.to] = nd;
        parent[arc.to] = a;
        closed[arc.to] = false;  // reopen if an inconsistent bound closed it early
        open.push({nd + h(arc.to), arc.to, nd});
      }
    }
  }
  Route none;
  none.snapshot_version = snap.version;
  none.settled = settled;
  return none;
}

}  // namespace search_detail

/// Least-cost route from src to dst. src == dst yields a found, empty route.
inline Route dijkstra(const RoadGraph& graph, const TrafficSnapshot& snap, NodeId src, NodeId dst,
                      SearchStats* stats = nullptr) {
  const NodeIndex s = graph.index_of(src), t = graph.index_of(dst);
  return search_detail::best_first(graph, snap, s, t, [](NodeIndex) { return 0.0; }, stats);
}

inline Route astar(const RoadGraph& graph, const TrafficSnapshot& snap, NodeId src, NodeId dst,
                   const HeuristicSpec& spec, SearchStats* stats = nullptr) {
  const NodeIndex s = graph.index_of(src), t = graph.index_of(dst);
  const LatLon goal = graph.node(t).pos;
  return search_detail::best_first(
      graph, snap, s, t, [&](NodeIndex v) { return spec(graph.node(v).pos, goal); }, stats);
}

/// Sum of arc costs along a route under a snapshot, in route order.
inline double route_cost(const RoadGraph& graph, const std::vector<std::size_t>& arcs, const TrafficSnapshot& snap) {
  double c = 0;
  for (auto a : arcs) c += edge_cost(graph.arc(a), snap);
  return c;
}

}  // namespace urbanflow::routing
