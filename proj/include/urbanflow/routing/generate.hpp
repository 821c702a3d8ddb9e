#pragma once

// Synthetic road networks for tests, demos and benchmarks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "urbanflow/rng.hpp"
#include "urbanflow/routing/graph.hpp"

namespace urbanflow::routing {

struct GridGraphSpec {
  int rows = 10;
  int cols = 10;
  LatLon origin{40.70, -74.02};  // south-west corner
  double spacing_m = 200.0;
  double speed_mps = 10.0;
};

/// rows x cols lattice of two-way streets; node id = row * cols + col + 1.
inline RoadGraph grid_graph(const GridGraphSpec& spec) {
  std::vector<Node> nodes;
  std::vector<EdgeSpec> edges;
  const double dlat = spec.spacing_m / kEarthRadiusM * 180.0 / kPi;
  const double dlon = dlat / std::cos(spec.origin.lat * kPi / 180.0);
  auto id = [&](int r, int c) { return static_cast<NodeId>(r * spec.cols + c + 1); };
  for (int r = 0; r < spec.rows; ++r)
    for (int c = 0; c < spec.cols; ++c) nodes.push_back({id(r, c), {spec.origin.lat + r * dlat, spec.origin.lon + c * dlon}});
  EdgeId next = 1;
  auto add = [&](NodeId a, NodeId b) {
    const auto& pa = nodes[static_cast<std::size_t>(a - 1)].pos;
    const auto& pb = nodes[static_cast<std::size_t>(b - 1)].pos;
    // Never shorter than the straight line, so the A* bound stays unscaled.
    const double len = std::max(spec.spacing_m, haversine(pa, pb));
    edges.push_back({next++, a, b, len, spec.speed_mps, false});
  };
  for (int r = 0; r < spec.rows; ++r)
    for (int c = 0; c < spec.cols; ++c) {
      if (c + 1 < spec.cols) add(id(r, c), id(r, c + 1));
      if (r + 1 < spec.rows) add(id(r, c), id(r + 1, c));
    }
  return RoadGraph(std::move(nodes), std::move(edges));
}

struct RandomGraphSpec {
  std::size_t nodes = 200;
  std::size_t neighbours = 3;  // links to each node's nearest neighbours
  double oneway_fraction = 0.2;
  double lat_min = 40.70, lon_min = -74.02, lat_max = 40.80, lon_max = -73.93;
  double min_speed = 5.0, max_speed = 25.0;
  std::uint64_t seed = 1;
};

/// Random geometric graph: each node links to its nearest neighbours with
/// lengths 1-1.5x the straight-line distance and random speeds. Node ids are
/// shuffled so that id order is unrelated to position.
inline RoadGraph random_graph(const RandomGraphSpec& spec) {
  Rng rng(spec.seed);
  std::vector<NodeId> ids(spec.nodes);
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<NodeId>(i + 1);
  rng.shuffle(ids);
  std::vector<Node> nodes(spec.nodes);
  for (std::size_t i = 0; i < spec.nodes; ++i)
    nodes[i] = {ids[i], {rng.uniform(spec.lat_min, spec.lat_max), rng.uniform(spec.lon_min, spec.lon_max)}};
  std::set<std::pair<std::size_t, std::size_t>> linked;
  std::vector<EdgeSpec> edges;
  EdgeId next = 1;
  for (std::size_t i = 0; i < spec.nodes; ++i) {
    std::vector<std::pair<double, std::size_t>> near;
    for (std::size_t j = 0; j < spec.nodes; ++j)
      if (j != i) near.emplace_back(haversine(nodes[i].pos, nodes[j].pos), j);
    const std::size_t k = std::min(spec.neighbours, near.size());
    std::partial_sort(near.begin(), near.begin() + static_cast<std::ptrdiff_t>(k), near.end());
    for (std::size_t m = 0; m < k; ++m) {
      const std::size_t j = near[m].second;
      if (!linked.insert({std::min(i, j), std::max(i, j)}).second) continue;
      const bool oneway = rng.uniform01() < spec.oneway_fraction;
      const bool flip = rng.uniform01() < 0.5;
      const double len = std::max(1.0, near[m].first * rng.uniform(1.0, 1.5));
      const double speed = rng.uniform(spec.min_speed, spec.max_speed);
      const auto a = flip ? nodes[j].id : nodes[i].id, b = flip ? nodes[i].id : nodes[j].id;
      edges.push_back({next++, a, b, len, speed, oneway});
    }
  }
  return RoadGraph(std::move(nodes), std::move(edges));
}

}  // namespace urbanflow::routing
