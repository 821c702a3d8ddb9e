#pragma once

// Road graph storage and the plain-text graph format:
//
//   # comment
//   node <id> <lat> <lon>
//   edge <id> <from> <to> <length_m> <speed_mps> <oneway 0|1>
//
// A two-way edge becomes two directed arcs that share the edge id, so a
// traffic update on that id slows both directions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "urbanflow/routing/geo.hpp"

namespace urbanflow::routing {

using NodeId = std::int64_t;
using EdgeId = std::int64_t;
using NodeIndex = std::uint32_t;

struct Node {
  NodeId id = 0;
  LatLon pos;
};

/// A directed traversal of an edge.
struct Arc {
  NodeIndex from = 0;
  NodeIndex to = 0;
  EdgeId edge = 0;
  double length_m = 0;
  double speed_mps = 0;
  bool reverse = false;  // second direction of a two-way edge
};

struct EdgeSpec {
  EdgeId id = 0;
  NodeId from = 0;
  NodeId to = 0;
  double length_m = 0;
  double speed_mps = 0;
  bool oneway = false;
};

class GraphError : public std::runtime_error {
 public:
  GraphError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Immutable after construction. Node indices follow ascending node id, so
/// ordering by index is ordering by id.
class RoadGraph {
 public:
  RoadGraph() = default;

  /// `edge_lines` optionally carries the source line of each edge for error
  /// messages.
  RoadGraph(std::vector<Node> nodes, std::vector<EdgeSpec> edges, const std::vector<std::size_t>& edge_lines = {},
            const std::vector<std::size_t>& node_lines = {}) {
    std::vector<std::size_t> order(nodes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return nodes[a].id < nodes[b].id; });
    nodes_.reserve(nodes.size());
    for (auto i : order) {
      const auto line = i < node_lines.size() ? node_lines[i] : 0;
      if (!nodes_.empty() && nodes_.back().id == nodes[i].id)
        throw GraphError(line, "duplicate node id " + std::to_string(nodes[i].id));
      if (!valid(nodes[i].pos)) throw GraphError(line, "node " + std::to_string(nodes[i].id) + " has bad coordinates");
      index_.emplace(nodes[i].id, static_cast<NodeIndex>(nodes_.size()));
      nodes_.push_back(nodes[i]);
    }

    std::unordered_map<EdgeId, std::size_t> seen;
    std::vector<Arc> arcs;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const auto& e = edges[k];
      const auto line = k < edge_lines.size() ? edge_lines[k] : 0;
      if (!seen.emplace(e.id, k).second) throw GraphError(line, "duplicate edge id " + std::to_string(e.id));
      auto from = index_.find(e.from), to = index_.find(e.to);
      if (from == index_.end())
        throw GraphError(line, "edge " + std::to_string(e.id) + " references missing node " + std::to_string(e.from));
      if (to == index_.end())
        throw GraphError(line, "edge " + std::to_string(e.id) + " references missing node " + std::to_string(e.to));
      if (!(e.length_m > 0) || !std::isfinite(e.length_m))
        throw GraphError(line, "edge " + std::to_string(e.id) + " has nonpositive length");
      if (!(e.speed_mps > 0) || !std::isfinite(e.speed_mps))
        throw GraphError(line, "edge " + std::to_string(e.id) + " has nonpositive speed");
      arcs.push_back({from->second, to->second, e.id, e.length_m, e.speed_mps, false});
      if (!e.oneway) arcs.push_back({to->second, from->second, e.id, e.length_m, e.speed_mps, true});
      edges_.push_back(e);
    }
    std::stable_sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
      if (a.from != b.from) return a.from < b.from;
      if (a.to != b.to) return a.to < b.to;
      return a.edge < b.edge;
    });
    offsets_.assign(nodes_.size() + 1, 0);
    for (const auto& a : arcs) ++offsets_[a.from + 1];
    for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
    arcs_ = std::move(arcs);
    for (const auto& a : arcs_) max_speed_ = std::max(max_speed_, a.speed_mps);
  }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t arc_count() const { return arcs_.size(); }

  const Node& node(NodeIndex i) const { return nodes_[i]; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<EdgeSpec>& edges() const { return edges_; }
  const Arc& arc(std::size_t a) const { return arcs_[a]; }
  const std::vector<Arc>& arcs() const { return arcs_; }

  /// Arc index range leaving node i.
  std::pair<std::size_t, std::size_t> out_arcs(NodeIndex i) const { return {offsets_[i], offsets_[i + 1]}; }

  bool has_node(NodeId id) const { return index_.count(id) != 0; }
  NodeIndex index_of(NodeId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw std::out_of_range("unknown node id " + std::to_string(id));
    return it->second;
  }

  double max_speed() const { return max_speed_; }

  /// Weakly connected components.
  std::size_t component_count() const {
    std::vector<NodeIndex> parent(nodes_.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](NodeIndex x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    std::size_t components = nodes_.size();
    for (const auto& a : arcs_) {
      const auto ra = find(a.from), rb = find(a.to);
      if (ra != rb) {
        parent[std::max(ra, rb)] = std::min(ra, rb);
        --components;
      }
    }
    return components;
  }

 private:
  std::vector<Node> nodes_;
  std::unordered_map<NodeId, NodeIndex> index_;
  std::vector<EdgeSpec> edges_;
  std::vector<Arc> arcs_;
  std::vector<std::size_t> offsets_{0};
  double max_speed_ = 0;
};

inline RoadGraph load_graph(std::istream& in) {
  std::vector<Node> nodes;
  std::vector<std::size_t> node_lines;
  std::vector<EdgeSpec> edges;
  std::vector<std::size_t> edge_lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string kind;
    if (!(ss >> kind)) continue;
    if (kind == "node") {
      Node n;
      if (!(ss >> n.id >> n.pos.lat >> n.pos.lon)) throw GraphError(line_no, "malformed node line");
      nodes.push_back(n);
      node_lines.push_back(line_no);
    } else if (kind == "edge") {
      EdgeSpec e;
      int oneway = 0;
      if (!(ss >> e.id >> e.from >> e.to >> e.length_m >> e.speed_mps >> oneway) || (oneway != 0 && oneway != 1))
        throw GraphError(line_no, "malformed edge line");
      e.oneway = oneway == 1;
      edges.push_back(e);
      edge_lines.push_back(line_no);
    } else {
      throw GraphError(line_no, "unknown record '" + kind + "'");
    }
    std::string extra;
    if (ss >> extra) throw GraphError(line_no, "trailing fields");
  }
  return RoadGraph(std::move(nodes), std::move(edges), edge_lines, node_lines);
}

inline RoadGraph load_graph(const std::string& text) {
  std::istringstream in(text);
  return load_graph(in);
}

inline void write_graph(std::ostream& out, const RoadGraph& g) {
  out.precision(17);
  for (const auto& n : g.nodes()) out << "node " << n.id << ' ' << n.pos.lat << ' ' << n.pos.lon << '\n';
  for (const auto& e : g.edges())
    out << "edge " << e.id << ' ' << e.from << ' ' << e.to << ' ' << e.length_m << ' ' << e.speed_mps << ' '
        << (e.oneway ? 1 : 0) << '\n';
}

}  // namespace urbanflow::routing
