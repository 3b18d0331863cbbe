#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <vector>

#include "topomap/aof_skeleton.hpp"
#include "topomap/binarize.hpp"
#include "topomap/grid_io.hpp"
#include "topomap/topo_graph.hpp"

namespace topomap {

/// Ground-truth environment: 1 = free.
struct World {
  Mask truth;
  double resolution = kDefaultResolution;

  int width() const { return static_cast<int>(truth.cols()); }
  int height() const { return static_cast<int>(truth.rows()); }
};

/// Pose in continuous cell coordinates; cell (i, j) is centered on (i, j).
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // radians, 0 along +x
};

struct ScanModel {
  double range_max = 30.0;  // meters
  double fov = 1.5 * std::numbers::pi;
  int n_rays = 1080;
  double noise_sigma = 0.0;  // meters

  double bearing(int k) const { return -fov / 2 + k * fov / (n_rays - 1); }
};

void validate(const ScanModel& m);

/// Range per ray in meters. Rays that leave the raster or exceed range_max
/// read exactly range_max; hits get Gaussian noise clipped to [0, range_max].
std::vector<double> scan(const World& w, const Pose& pose, const ScanModel& m, std::uint64_t seed);

/// Occupancy grid of the world's size with every cell unknown.
OccupancyGrid blank_map(const World& w);

/// Marks cells before each hit free and the hit cell occupied. Occupied cells
/// are never cleared.
void integrate(OccupancyGrid& g, const Pose& pose, const std::vector<double>& readings, const ScanModel& m);

struct RunConfig {
  ScanModel scan;
  BinarizeParams binarize;
  SkeletonParams skeleton;
  PruneParams prune;
  FrontierParams frontier;
  int max_steps = 200;
  double scan_stride = 10.0;  // cells of travel between scans
  double match_radius = 5.0;  // cells, visited-status transfer
  std::uint64_t seed = 0;
};

/// Reads a key:value run config; unknown keys are an error.
RunConfig parse_run_config(const KeyValueFile& kv);

struct StepRecord {
  int step = 0;
  Pose pose;
  TopoGraph graph;            // pruned, frontier-labelled, visited-marked
  std::optional<int> target;  // node id in `graph` chosen at this step
  int frontier_count = 0;
};

struct RunResult {
  std::vector<StepRecord> steps;
  OccupancyGrid map;
  std::vector<Point2d> trajectory;
  bool done = false;  // stopped because nothing was left to explore
};

/// binarize -> skeletonize -> extract -> prune -> label frontiers on the
/// current map. An empty free region gives an empty graph.
TopoGraph map_to_graph(const OccupancyGrid& map, const RunConfig& cfg, Mask* mask_out = nullptr);

RunResult run_exploration(const World& w, const Point2d& start, const RunConfig& cfg);

/// Free cells of the truth reachable from `start` (4-connectivity).
Mask reachable_region(const World& w, const Point2d& start);

/// Writes step graphs, the final map, and the trajectory under `dir`.
std::vector<std::filesystem::path> write_run_artifacts(const std::filesystem::path& dir, const RunResult& r);

}  // namespace topomap
