#include "topomap/worlds.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "topomap/aof_skeleton.hpp"
#include "topomap/errors.hpp"

namespace topomap {

namespace {

using Rng = std::mt19937_64;

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

void fill_rect(Mask& m, int x0, int y0, int x1, int y1, std::uint8_t v) {
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  x1 = std::min(x1, static_cast<int>(m.cols()) - 1);
  y1 = std::min(y1, static_cast<int>(m.rows()) - 1);
  if (x1 < x0 || y1 < y0) return;
  m.block(y0, x0, y1 - y0 + 1, x1 - x0 + 1).setConstant(v);
}

// Splits [lo, hi] into n spans of jittered width; returns the n - 1 cut positions.
std::vector<int> cuts(Rng& rng, int lo, int hi, int n) {
  std::vector<int> out;
  const double span = double(hi - lo) / n;
  for (int i = 1; i < n; ++i) out.push_back(lo + static_cast<int>(std::lround(i * span + uniform(rng, -0.15, 0.15) * span)));
  return out;
}

Mask rooms(Rng& rng) {
  const int w = 120, h = 90, wall = 2, door = uniform_int(rng, 9, 12);
  Mask m = Mask::Zero(h, w);
  fill_rect(m, wall, wall, w - 1 - wall, h - 1 - wall, 1);
  const int nx = uniform_int(rng, 2, 3), ny = 2;
  const auto xs = cuts(rng, wall, w - wall, nx), ys = cuts(rng, wall, h - wall, ny);
  std::vector<int> xb = {wall - 1}, yb = {wall - 1};
  xb.insert(xb.end(), xs.begin(), xs.end());
  yb.insert(yb.end(), ys.begin(), ys.end());
  xb.push_back(w - wall);
  yb.push_back(h - wall);
  for (int x : xs) fill_rect(m, x, 0, x + wall - 1, h - 1, 0);
  for (int y : ys) fill_rect(m, 0, y, w - 1, y + wall - 1, 0);
  // One door through every wall segment separating two rooms.
  for (std::size_t i = 1; i + 1 < xb.size(); ++i) {
    for (std::size_t j = 0; j + 1 < yb.size(); ++j) {
      const int lo = yb[j] + wall + 3, hi = yb[j + 1] - 3 - door;
      const int y = uniform_int(rng, lo, std::max(lo, hi));
      fill_rect(m, xb[i], y, xb[i] + wall - 1, y + door - 1, 1);
    }
  }
  for (std::size_t j = 1; j + 1 < yb.size(); ++j) {
    for (std::size_t i = 0; i + 1 < xb.size(); ++i) {
      const int lo = xb[i] + wall + 3, hi = xb[i + 1] - 3 - door;
      const int x = uniform_int(rng, lo, std::max(lo, hi));
      fill_rect(m, x, yb[j], x + door - 1, yb[j] + wall - 1, 1);
    }
  }
  return m;
}

Mask corridors(Rng& rng) {
  const int w = 140, h = 100, wall = 2;
  Mask m = Mask::Zero(h, w);
  fill_rect(m, wall, wall, w - 1 - wall, h - 1 - wall, 1);
  const int bx = uniform_int(rng, 1, 3), by = uniform_int(rng, 1, 2);
  const int corridor = uniform_int(rng, 11, 14);
  const double cell_w = double(w - 2 * wall - corridor) / bx, cell_h = double(h - 2 * wall - corridor) / by;
  for (int i = 0; i < bx; ++i) {
    for (int j = 0; j < by; ++j) {
      const int x0 = wall + corridor + static_cast<int>(i * cell_w) + uniform_int(rng, 0, 2);
      const int y0 = wall + corridor + static_cast<int>(j * cell_h) + uniform_int(rng, 0, 2);
      const int x1 = wall + corridor + static_cast<int>((i + 1) * cell_w) - corridor - uniform_int(rng, 0, 2);
      const int y1 = wall + corridor + static_cast<int>((j + 1) * cell_h) - corridor - uniform_int(rng, 0, 2);
      fill_rect(m, x0, y0, x1, y1, 0);
    }
  }
  return m;
}

struct Lobed {
  double cx, cy, radius;
  std::vector<double> amp, phase;

  double r_at(double phi) const {
    double f = 1.0;
    for (std::size_t k = 0; k < amp.size(); ++k) f += amp[k] * std::cos((k + 2) * phi + phase[k]);
    return radius * f;
  }
  bool contains(double x, double y) const {
    const double dx = x - cx, dy = y - cy;
    return std::hypot(dx, dy) <= r_at(std::atan2(dy, dx));
  }
};

Lobed lobed(Rng& rng, double cx, double cy, double radius, int harmonics, double max_amp) {
  Lobed l{cx, cy, radius, {}, {}};
  for (int k = 0; k < harmonics; ++k) {
    l.amp.push_back(uniform(rng, 0.0, max_amp / (k + 1)));
    l.phase.push_back(uniform(rng, 0.0, 2 * std::numbers::pi));
  }
  return l;
}

void paint_capsule(Mask& m, const Point2d& a, const Point2d& b, double radius, std::uint8_t v) {
  const Point2d ab = b - a;
  const double len2 = std::max(ab.squaredNorm(), 1e-12);
  for (int y = 0; y < m.rows(); ++y) {
    for (int x = 0; x < m.cols(); ++x) {
      const Point2d p(x, y);
      const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
      if ((p - (a + t * ab)).norm() <= radius) m(y, x) = v;
    }
  }
}

// Chambers strung along a random walk and joined by tunnels, with lobed
// pillars standing in some of the larger chambers.
Mask cave(Rng& rng, int& holes) {
  const int w = 160, h = 120, margin = 4;
  Mask m = Mask::Zero(h, w);
  std::vector<Lobed> chambers;
  Point2d at(uniform(rng, 30.0, 42.0), uniform(rng, 35.0, 85.0));
  double heading = uniform(rng, -0.5, 0.5);
  const int n = uniform_int(rng, 5, 7);
  for (int i = 0; i < n; ++i) {
    const double radius = uniform(rng, 13.0, 21.0);
    chambers.push_back(lobed(rng, at.x(), at.y(), radius, 5, 0.22));
    heading += uniform(rng, -0.9, 0.9);
    Point2d next = at + uniform(rng, 28.0, 38.0) * Point2d(std::cos(heading), std::sin(heading));
    // Turn back inside the raster.
    for (int turn = 0; turn < 12; ++turn) {
      if (next.x() > 28 && next.x() < w - 28 && next.y() > 28 && next.y() < h - 28) break;
      heading += 0.6;
      next = at + 32.0 * Point2d(std::cos(heading), std::sin(heading));
    }
    if (i + 1 < n) paint_capsule(m, at, next, uniform(rng, 5.5, 7.5), 1);
    at = next;
  }
  for (const auto& c : chambers) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (c.contains(x, y)) m(y, x) = 1;
      }
    }
  }
  std::vector<int> order(chambers.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const int pillars = uniform_int(rng, 1, 3);
  for (int i = 0; i < pillars && i < static_cast<int>(order.size()); ++i) {
    const auto& c = chambers[order[i]];
    const Lobed p = lobed(rng, c.cx + uniform(rng, -2.0, 2.0), c.cy + uniform(rng, -2.0, 2.0), c.radius * 0.32, 2, 0.15);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (p.contains(x, y)) m(y, x) = 0;
      }
    }
  }
  m.topRows(margin).setZero();
  m.bottomRows(margin).setZero();
  m.leftCols(margin).setZero();
  m.rightCols(margin).setZero();
  holes = free_space_topology(m).second;
  return m;
}

// One free region, the expected number of holes, and every passage at least
// `min_width` cells wide.
bool acceptable(const Mask& m, int holes, double min_width) {
  const auto topo = free_space_topology(m);
  if (topo.first != 1 || topo.second != holes) return false;
  if ((label_components(m, 1, 4).areas.size()) != 1) return false;
  const Rasterd d = distance_transform<double>(m);
  const Mask core = (d >= min_width / 2).cast<std::uint8_t>();
  const auto core_topo = free_space_topology(core);
  return core_topo.first == 1 && core_topo.second == holes;
}

}  // namespace

WorldKind parse_world_kind(const std::string& name) {
  if (name == "rooms") return WorldKind::Rooms;
  if (name == "corridors") return WorldKind::Corridors;
  if (name == "cave") return WorldKind::Cave;
  throw ParameterError("unknown world kind '" + name + "' (expected rooms, corridors or cave)");
}

const char* world_kind_name(WorldKind kind) {
  switch (kind) {
    case WorldKind::Rooms: return "rooms";
    case WorldKind::Corridors: return "corridors";
    case WorldKind::Cave: return "cave";
  }
  return "?";
}

std::pair<int, int> free_space_topology(const Mask& free) {
  const Mask fg = (free != 0).cast<std::uint8_t>();
  const auto f = label_components(fg, 1, 8);
  const auto b = label_components(fg, 0, 4);
  int holes = 0;
  for (bool t : b.touches_border) holes += !t;
  return {static_cast<int>(f.areas.size()), holes};
}

World make_world(WorldKind kind, std::uint64_t seed) {
  Rng rng(seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    World w;
    int holes = 0;
    switch (kind) {
      case WorldKind::Rooms:
        w.truth = rooms(rng);
        holes = free_space_topology(w.truth).second;
        break;
      case WorldKind::Corridors:
        w.truth = corridors(rng);
        holes = free_space_topology(w.truth).second;
        break;
      case WorldKind::Cave:
        w.truth = cave(rng, holes);
        if (holes < 1 || holes > 3) continue;
        break;
    }
    if (acceptable(w.truth, holes, 8.0)) return w;
  }
  throw InvariantError("world generator failed to produce a valid world");
}

Point2d default_start(const World& w) { return alternate_start(w, Point2d(-1e9, -1e9), 0.0); }

Point2d alternate_start(const World& w, const Point2d& other, double min_separation) {
  const Rasterd d = distance_transform<double>(w.truth);
  double best = -1.0;
  Point2d out(-1, -1);
  for (int y = 0; y < w.height(); ++y) {
    for (int x = 0; x < w.width(); ++x) {
      if ((Point2d(x, y) - other).norm() < min_separation) continue;
      if (d(y, x) > best) {
        best = d(y, x);
        out = Point2d(x, y);
      }
    }
  }
  if (best <= 0.0) throw ParameterError("world has no free cell for a start position");
  return out;
}

}  // namespace topomap
