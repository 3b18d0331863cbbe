#include "topomap/sim_world.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <random>
#include <sstream>

#include "topomap/errors.hpp"
#include "topomap/explorer.hpp"
#include "topomap/log.hpp"

namespace topomap {

namespace {

// Grid traversal along a ray. Calls visit(cx, cy, t_enter, t_exit) per cell in
// order (t in cells) until it returns false, the ray leaves the raster, or
// t_enter reaches t_max.
template <typename Visit>
void traverse(int width, int height, double x, double y, double angle, double t_max, Visit&& visit) {
  const double dx = std::cos(angle), dy = std::sin(angle);
  // Shift so cell i spans [i, i + 1).
  const double gx = x + 0.5, gy = y + 0.5;
  int cx = static_cast<int>(std::floor(gx)), cy = static_cast<int>(std::floor(gy));
  const int sx = dx > 0 ? 1 : -1, sy = dy > 0 ? 1 : -1;
  const double inf = std::numeric_limits<double>::infinity();
  const double tdx = dx != 0.0 ? std::abs(1.0 / dx) : inf;
  const double tdy = dy != 0.0 ? std::abs(1.0 / dy) : inf;
  double tx = dx != 0.0 ? ((dx > 0 ? cx + 1 - gx : gx - cx) * tdx) : inf;
  double ty = dy != 0.0 ? ((dy > 0 ? cy + 1 - gy : gy - cy) * tdy) : inf;
  double t = 0.0;
  while (t < t_max && cx >= 0 && cy >= 0 && cx < width && cy < height) {
    const double t_exit = std::min(tx, ty);
    if (!visit(cx, cy, t, t_exit)) return;
    t = t_exit;
    if (tx < ty) {
      tx += tdx;
      cx += sx;
    } else {
      ty += tdy;
      cy += sy;
    }
  }
}

bool in_obstacle(const World& w, double x, double y) {
  const int cx = static_cast<int>(std::lround(x)), cy = static_cast<int>(std::lround(y));
  return !in_bounds(w.truth, cx, cy) || w.truth(cy, cx) == 0;
}

}  // namespace

void validate(const ScanModel& m) {
  if (m.n_rays < 2) throw ParameterError("scan model needs at least 2 rays");
  if (!(m.fov > 0.0 && m.fov <= 2 * std::numbers::pi)) throw ParameterError("scan fov must lie in (0, 2*pi]");
  if (!(m.range_max > 0.0)) throw ParameterError("scan range_max must be > 0");
  if (m.noise_sigma < 0.0) throw ParameterError("scan noise_sigma must be >= 0");
}

std::vector<double> scan(const World& w, const Pose& pose, const ScanModel& m, std::uint64_t seed) {
  validate(m);
  if (in_obstacle(w, pose.x, pose.y)) throw PoseError("scan pose lies in an obstacle or outside the world");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, m.noise_sigma > 0.0 ? m.noise_sigma : 1.0);
  const double t_max = m.range_max / w.resolution;
  std::vector<double> out(m.n_rays, m.range_max);
  for (int k = 0; k < m.n_rays; ++k) {
    double hit = -1.0;
    traverse(w.width(), w.height(), pose.x, pose.y, pose.heading + m.bearing(k), t_max,
             [&](int cx, int cy, double t_enter, double) {
               if (w.truth(cy, cx) != 0) return true;
               hit = t_enter;
               return false;
             });
    if (hit < 0.0) continue;
    double range = hit * w.resolution;
    if (range >= m.range_max) continue;
    if (m.noise_sigma > 0.0) range = std::clamp(range + noise(rng), 0.0, m.range_max);
    out[k] = range;
  }
  return out;
}

OccupancyGrid blank_map(const World& w) {
  return OccupancyGrid::filled(w.width(), w.height(), kUnknownValue, w.resolution);
}

void integrate(OccupancyGrid& g, const Pose& pose, const std::vector<double>& readings, const ScanModel& m) {
  validate(m);
  if (static_cast<int>(readings.size()) != m.n_rays) throw SizeError("reading count does not match the scan model");
  std::vector<Cell> hits;
  for (int k = 0; k < m.n_rays; ++k) {
    const bool is_hit = readings[k] < m.range_max;
    // Nudged forward so a reading that lands on a cell boundary names the
    // cell behind it.
    const double t_hit = readings[k] / g.resolution + 1e-7;
    traverse(g.width(), g.height(), pose.x, pose.y, pose.heading + m.bearing(k), t_hit,
             [&](int cx, int cy, double, double t_exit) {
               if (is_hit && t_exit > t_hit) {
                 hits.emplace_back(cx, cy);
                 return false;
               }
               if (g.cells(cy, cx) != kOccupiedValue) g.cells(cy, cx) = kFreeValue;
               return true;
             });
  }
  for (const auto& c : hits) g.cells(c.y(), c.x()) = kOccupiedValue;
}

RunConfig parse_run_config(const KeyValueFile& kv) {
  static const std::vector<std::string> known = {
      "range_max", "fov",       "n_rays",     "noise_sigma",     "sigma",       "thresh",
      "min_area",  "min_hole_area", "eps",    "n_samples",       "tau",         "min_branch_area", "clearance",
      "frontier_radius", "frontier_min_unknown", "max_steps",   "scan_stride", "match_radius", "seed"};
  for (const auto& [k, v] : kv.entries) {
    if (std::find(known.begin(), known.end(), k) == known.end()) {
      throw ParseError("run config: unknown key '" + k + "'");
    }
  }
  RunConfig c;
  c.scan.range_max = kv.get_double("range_max", c.scan.range_max);
  c.scan.fov = kv.get_double("fov", c.scan.fov);
  c.scan.n_rays = static_cast<int>(kv.get_int("n_rays", c.scan.n_rays));
  c.scan.noise_sigma = kv.get_double("noise_sigma", c.scan.noise_sigma);
  c.binarize.sigma = kv.get_double("sigma", c.binarize.sigma);
  c.binarize.thresh = kv.get_double("thresh", c.binarize.thresh);
  c.binarize.min_area = static_cast<int>(kv.get_int("min_area", c.binarize.min_area));
  c.binarize.min_hole_area = static_cast<int>(kv.get_int("min_hole_area", c.binarize.min_hole_area));
  c.skeleton.eps = kv.get_double("eps", c.skeleton.eps);
  c.skeleton.n_samples = static_cast<int>(kv.get_int("n_samples", c.skeleton.n_samples));
  c.skeleton.tau = kv.get_double("tau", c.skeleton.tau);
  c.skeleton.min_branch_area = static_cast<int>(kv.get_int("min_branch_area", c.skeleton.min_branch_area));
  c.prune.clearance = kv.get_double("clearance", c.prune.clearance);
  c.frontier.radius = kv.get_double("frontier_radius", c.frontier.radius);
  c.frontier.min_unknown = static_cast<int>(kv.get_int("frontier_min_unknown", c.frontier.min_unknown));
  c.max_steps = static_cast<int>(kv.get_int("max_steps", c.max_steps));
  c.scan_stride = kv.get_double("scan_stride", c.scan_stride);
  c.match_radius = kv.get_double("match_radius", c.match_radius);
  c.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<long>(c.seed)));
  validate(c.scan);
  if (c.max_steps < 0) throw ParameterError("max_steps must be >= 0");
  if (!(c.scan_stride > 0.0)) throw ParameterError("scan_stride must be > 0");
  return c;
}

TopoGraph map_to_graph(const OccupancyGrid& map, const RunConfig& cfg, Mask* mask_out) {
  const TriState tri = classify_cells(map);
  const BinaryMap bm = binarize(map, cfg.binarize);
  if (mask_out) *mask_out = bm.mask;
  if (!(bm.mask != 0).any()) return {};
  const auto field = compute_skeleton(bm.mask, cfg.skeleton);
  TopoGraph g = extract_graph(field.skeletal, field.dist);
  g = prune(std::move(g), tri, cfg.prune);
  return label_frontiers(std::move(g), tri, cfg.frontier);
}

RunResult run_exploration(const World& w, const Point2d& start, const RunConfig& cfg) {
  validate(cfg.scan);
  if (in_obstacle(w, start.x(), start.y())) throw PoseError("start position is not in free space");
  RunResult res;
  res.map = blank_map(w);
  std::uint64_t scan_index = 0;
  auto sense = [&](const Pose& p) {
    if (in_obstacle(w, p.x, p.y)) return;
    const auto readings = scan(w, p, cfg.scan, cfg.seed * 1000003ULL + scan_index++);
    integrate(res.map, p, readings, cfg.scan);
  };

  Pose pose{start.x(), start.y(), 0.0};
  sense(pose);
  sense({pose.x, pose.y, std::numbers::pi});
  res.trajectory.push_back(start);
  std::vector<Point2d> visited_at = {start};

  for (int step = 0;; ++step) {
    StepRecord rec;
    rec.step = step;
    rec.pose = pose;
    rec.graph = map_to_graph(res.map, cfg);
    for (auto& n : rec.graph.nodes) {
      n.visited = std::any_of(visited_at.begin(), visited_at.end(), [&](const Point2d& p) {
        return (p - n.position()).norm() <= cfg.match_radius;
      });
      rec.frontier_count += n.frontier;
    }
    log_debug("step " + std::to_string(step) + ": " + std::to_string(rec.graph.nodes.size()) + " nodes, " +
              std::to_string(rec.frontier_count) + " frontiers");
    if (step >= cfg.max_steps || rec.graph.nodes.empty()) {
      res.done = rec.graph.nodes.empty() && step < cfg.max_steps;
      res.steps.push_back(std::move(rec));
      break;
    }

    TopoGraph plan = rec.graph;
    int here = attach_position(plan, Point2d(pose.x, pose.y));
    plan = component_of(plan, here);
    ExplorationState state;
    state.current_node = here;
    for (const auto& n : plan.nodes) {
      if (n.visited) state.visited.insert(n.id);
    }
    state.visited.insert(here);

    std::optional<Target> t;
    try {
      t = next_target(plan, state);
    } catch (const UnreachableFrontierError& e) {
      throw UnreachableFrontierError(e.what(), step);
    }
    if (!t) {
      res.done = true;
      res.steps.push_back(std::move(rec));
      break;
    }
    // Report the target in the recorded graph's ids.
    const Point2d goal = plan.nodes[t->node].position();
    for (const auto& n : rec.graph.nodes) {
      if (n.position() == goal) rec.target = n.id;
    }
    res.steps.push_back(std::move(rec));

    for (int v : t->nodes) visited_at.push_back(plan.nodes[v].position());
    // Teleport along the route, scanning every scan_stride cells of travel.
    double since_scan = 0.0;
    for (std::size_t i = 1; i < t->path.size(); ++i) {
      const Point2d a = t->path[i - 1], b = t->path[i];
      const double seg = (b - a).norm();
      since_scan += seg;
      res.trajectory.push_back(b);
      const bool last = i + 1 == t->path.size();
      if (since_scan >= cfg.scan_stride || last) {
        sense({b.x(), b.y(), std::atan2(b.y() - a.y(), b.x() - a.x())});
        since_scan = 0.0;
      }
    }
    const Point2d end = t->path.back();
    pose = {end.x(), end.y(), pose.heading};
    if (t->path.size() >= 2) {
      const Point2d& a = t->path[t->path.size() - 2];
      pose.heading = std::atan2(end.y() - a.y(), end.x() - a.x());
    }
  }
  return res;
}

Mask reachable_region(const World& w, const Point2d& start) {
  Mask out = Mask::Zero(w.height(), w.width());
  const int sx = static_cast<int>(std::lround(start.x())), sy = static_cast<int>(std::lround(start.y()));
  if (!in_bounds(w.truth, sx, sy) || !w.truth(sy, sx)) return out;
  std::deque<Cell> q{Cell(sx, sy)};
  out(sy, sx) = 1;
  while (!q.empty()) {
    const Cell c = q.front();
    q.pop_front();
    for (const auto& d : kNeighbors4) {
      const int nx = c.x() + d[0], ny = c.y() + d[1];
      if (in_bounds(w.truth, nx, ny) && w.truth(ny, nx) && !out(ny, nx)) {
        out(ny, nx) = 1;
        q.emplace_back(nx, ny);
      }
    }
  }
  return out;
}

std::vector<std::filesystem::path> write_run_artifacts(const std::filesystem::path& dir, const RunResult& r) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<fs::path> written;
  auto write_text = [&](const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw InputError("cannot write " + p.string());
    f << text;
    written.push_back(p);
  };
  std::ostringstream steps;
  steps << "step,pose_x,pose_y,heading,nodes,frontiers,target\n";
  for (const auto& s : r.steps) {
    char name[32];
    std::snprintf(name, sizeof name, "step_%03d_graph.json", s.step);
    write_text(dir / name, serialize(s.graph) + "\n");
    steps << s.step << ',' << format_double(s.pose.x) << ',' << format_double(s.pose.y) << ','
          << format_double(s.pose.heading) << ',' << s.graph.nodes.size() << ',' << s.frontier_count << ','
          << (s.target ? std::to_string(*s.target) : std::string()) << '\n';
  }
  write_text(dir / "steps.csv", steps.str());
  std::ostringstream traj;
  traj << "x,y\n";
  for (const auto& p : r.trajectory) traj << format_double(p.x()) << ',' << format_double(p.y()) << '\n';
  write_text(dir / "trajectory.csv", traj.str());
  save_grid(dir / "final_map.pgm", r.map);
  written.push_back(dir / "final_map.pgm");
  written.push_back(sidecar_path(dir / "final_map.pgm"));
  return written;
}

}  // namespace topomap
