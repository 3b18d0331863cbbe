#pragma once

#include <limits>
#include <vector>

#include "topomap/spectral_match.hpp"

namespace topomap {

/// Vertex sequence along the arc-length shortest path between two vertices of
/// a medial graph; empty when they are disconnected.
std::vector<int> shortest_vertex_path(const MedialGraph& g, int from, int to);

struct EndpointPath {
  int from = 0;
  int to = 0;
  std::vector<int> vertices;
  double length = 0.0;
};

std::vector<int> endpoint_vertices(const MedialGraph& g);

/// One path per unordered pair of endpoints in the same component.
std::vector<EndpointPath> endpoint_paths(const MedialGraph& g);

double path_length(const MedialGraph& g, const std::vector<int>& vertices);

/// Skip penalty used when none is given: twice the median nearest-partner
/// cost over both sequences, at least 0.5.
double default_skip_cost(const std::vector<MedialVertex>& a, const std::vector<MedialVertex>& b, double gamma);

/// Elastic match of two vertex sequences: a monotone one-to-one matching of
/// subsequences, each element either matched at the (x, y, gamma r) distance
/// after both paths are moved to their centroids, or skipped at `skip_cost`.
/// Returns the optimal total divided by the number of matched pairs.
/// A negative skip_cost selects default_skip_cost.
double path_distance(const std::vector<MedialVertex>& a, const std::vector<MedialVertex>& b, double gamma = 1.0,
                     double skip_cost = -1.0);

struct DistanceTerm {
  int side = 0;  // 0: paths of the first graph, 1: of the second
  int i = 0;     // endpoint vertex ids in that graph
  int j = 0;
  int ti = 0;    // their images in the other graph
  int tj = 0;
  double pd = 0.0;
};

struct DistanceResult {
  double d = 0.0;
  double first_sum = 0.0;
  double second_sum = 0.0;
  int n = 0;  // endpoints of the first graph
  int m = 0;  // endpoints of the second graph
  int unmatched_a = 0;  // endpoints without an image
  int unmatched_b = 0;
  int dropped_pairs = 0;  // pairs skipped for a missing image or path
  std::vector<DistanceTerm> terms;
};

struct DistanceParams {
  double gamma = 1.0;
  double skip_cost = -1.0;
  // Unmatched endpoints borrow the image of the nearest matched vertex within
  // this many cells.
  double snap_radius = std::numeric_limits<double>::infinity();
};

/// Sum of path distances between endpoint pairs and their images, both ways,
/// each normalized by count * (count - 1).
DistanceResult environment_distance(const MedialGraph& a, const MedialGraph& b, const Correspondence& t,
                                    const DistanceParams& params = {});

}  // namespace topomap
