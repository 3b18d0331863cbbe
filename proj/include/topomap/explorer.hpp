#pragma once

#include <limits>
#include <optional>
#include <set>
#include <vector>

#include "topomap/raster.hpp"
#include "topomap/topo_graph.hpp"

namespace topomap {

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

struct ShortestPaths {
  std::vector<double> dist;     // kUnreachable when no path exists
  std::vector<int> pred;        // predecessor node, -1 at the source or when unreachable
  std::vector<int> pred_edge;   // index into g.edges of the edge taken from pred
};

/// Bellman-Ford over the undirected edge-length-weighted graph.
ShortestPaths shortest_paths(const TopoGraph& g, int src);

struct ExplorationState {
  int current_node = 0;
  std::set<int> visited;
  std::vector<Point2d> trajectory;
};

struct Target {
  int node = -1;
  std::vector<int> nodes;     // source .. target
  std::vector<Point2d> path;  // concatenated edge polylines
  double length = 0.0;
};

/// Nearest unvisited frontier, else nearest unvisited node; nullopt when
/// there is nothing left to visit. Ties go to the smaller id.
std::optional<Target> next_target(const TopoGraph& g, const ExplorationState& s);

/// Marks every node on the route visited and moves to the target.
ExplorationState advance(ExplorationState s, const Target& t);

/// Adds the robot position to the graph and returns its node id: an existing
/// node when that is the closest skeleton vertex, else a new junction that
/// splits the nearest edge at its closest polyline vertex. Returns -1 for an
/// empty graph.
int attach_position(TopoGraph& g, const Point2d& p);

/// Subgraph of the component containing `node`, ids renumbered in order.
/// `node` is updated to its new id.
TopoGraph component_of(const TopoGraph& g, int& node);

}  // namespace topomap
