#pragma once

#include <string>
#include <vector>

#include "topomap/binarize.hpp"
#include "topomap/raster.hpp"

namespace topomap {

enum class NodeKind { Endpoint, Junction };

/// One skeleton sample along an edge: cell position, inscribed radius, object angle.
struct SkeletonSample {
  double x = 0.0;
  double y = 0.0;
  double r = 0.0;
  double theta = 0.0;

  Point2d position() const { return {x, y}; }
  bool operator==(const SkeletonSample&) const = default;
};

struct TopoNode {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  double r = 0.0;
  double theta = 0.0;
  NodeKind kind = NodeKind::Endpoint;
  bool frontier = false;
  bool visited = false;

  Point2d position() const { return {x, y}; }
  bool operator==(const TopoNode&) const = default;
};

struct TopoEdge {
  int u = 0;
  int v = 0;
  double length = 0.0;
  std::vector<SkeletonSample> polyline;  // runs from node u to node v

  bool operator==(const TopoEdge&) const = default;
};

/// Topological map. Node ids always equal their index in `nodes`.
struct TopoGraph {
  std::vector<TopoNode> nodes;
  std::vector<TopoEdge> edges;

  int degree(int id) const;
  bool operator==(const TopoGraph&) const = default;
};

double polyline_length(const std::vector<SkeletonSample>& pts);

/// Sorts nodes by (y, x), renumbers ids, orients and sorts edges.
TopoGraph canonicalize(TopoGraph g);

/// Throws InvariantError when a structural invariant does not hold.
void validate(const TopoGraph& g);

/// Merges each junction of degree 2 into a single edge. A node that only
/// carries one self-loop is left in place so isolated cycles keep a vertex.
TopoGraph dissolve_degree_two(TopoGraph g);

struct Betti {
  int components = 0;
  int cycles = 0;
};

/// Components and independent cycles (E - V + C).
Betti graph_betti(const TopoGraph& g);

/// Unknown cells 4-adjacent to the free region reachable from `center`
/// through free cells inside the disk. Cells outside the raster count as unknown.
int reachable_unknown(const TriState& tri, const Point2d& center, double radius);

struct PruneParams {
  double clearance = 3.0;
};

/// Removes junction-to-endpoint branches whose endpoint is enclosed by sensed
/// space, dissolving degree-2 junctions, until nothing changes.
TopoGraph prune(TopoGraph g, const TriState& tri, const PruneParams& params = {});

struct FrontierParams {
  double radius = 3.0;
  int min_unknown = 5;
};

TopoGraph label_frontiers(TopoGraph g, const TriState& tri, const FrontierParams& params = {});

std::string serialize(const TopoGraph& g);
TopoGraph deserialize(const std::string& text);

}  // namespace topomap
