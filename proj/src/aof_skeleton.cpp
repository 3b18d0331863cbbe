#include "topomap/aof_skeleton.hpp"

#include <array>
#include <bit>
#include <deque>
#include <map>
#include <queue>

namespace topomap {

namespace {

bool ring_adjacent8(int a, int b) {
  return std::abs(kNeighbors8[a][0] - kNeighbors8[b][0]) <= 1 && std::abs(kNeighbors8[a][1] - kNeighbors8[b][1]) <= 1;
}

bool ring_adjacent4(int a, int b) {
  return std::abs(kNeighbors8[a][0] - kNeighbors8[b][0]) + std::abs(kNeighbors8[a][1] - kNeighbors8[b][1]) == 1;
}

std::array<bool, 256> build_simple_table() {
  std::array<bool, 256> table{};
  for (unsigned ring = 0; ring < 256; ++ring) {
    // Foreground: 8-components among set ring cells.
    int fg = 0;
    std::array<int, 8> seen{};
    for (int s = 0; s < 8; ++s) {
      if (!(ring >> s & 1u) || seen[s]) continue;
      ++fg;
      std::deque<int> q{s};
      seen[s] = 1;
      while (!q.empty()) {
        const int a = q.front();
        q.pop_front();
        for (int b = 0; b < 8; ++b) {
          if ((ring >> b & 1u) && !seen[b] && ring_adjacent8(a, b)) {
            seen[b] = 1;
            q.push_back(b);
          }
        }
      }
    }
    // Background: 4-components among clear ring cells that touch the center
    // through an edge (even positions are the 4-neighbors).
    int bg = 0;
    seen.fill(0);
    for (int s = 0; s < 8; s += 2) {
      if ((ring >> s & 1u) || seen[s]) continue;
      ++bg;
      std::deque<int> q{s};
      seen[s] = 1;
      while (!q.empty()) {
        const int a = q.front();
        q.pop_front();
        for (int b = 0; b < 8; ++b) {
          if (!(ring >> b & 1u) && !seen[b] && ring_adjacent4(a, b)) {
            seen[b] = 1;
            q.push_back(b);
          }
        }
      }
    }
    table[ring] = fg == 1 && bg == 1;
  }
  return table;
}

const std::array<bool, 256>& simple_table() {
  static const auto table = build_simple_table();
  return table;
}

unsigned ring_of(const Mask& s, int x, int y) {
  unsigned ring = 0;
  for (int k = 0; k < 8; ++k) {
    const int nx = x + kNeighbors8[k][0], ny = y + kNeighbors8[k][1];
    if (in_bounds(s, nx, ny) && s(ny, nx)) ring |= 1u << k;
  }
  return ring;
}

int count_neighbors(const Mask& s, int x, int y) { return std::popcount(ring_of(s, x, y)); }

// Foreground 8-components and background 4-holes of a whole mask.
std::pair<int, int> mask_topology(const Mask& s) {
  const auto fg = label_components(s, 1, 8);
  const auto bg = label_components(s, 0, 4);
  int holes = 0;
  for (std::size_t i = 0; i < bg.areas.size(); ++i) {
    if (!bg.touches_border[i]) ++holes;
  }
  return {static_cast<int>(fg.areas.size()), holes};
}

bool has_block_at(const Mask& s, int x, int y) {
  return in_bounds(s, x, y) && in_bounds(s, x + 1, y + 1) && s(y, x) && s(y, x + 1) && s(y + 1, x) &&
         s(y + 1, x + 1);
}

// A 2x2 block survives thinning only where four diagonal arms meet at a
// pixel corner. Replace one block cell by a 4-adjacent bridge that keeps its
// outer arm attached.
void break_corner_crossings(Mask& s, const Rasterd& aof, const Mask& mask) {
  const int w = static_cast<int>(s.cols()), h = static_cast<int>(s.rows());
  for (int y = 0; y + 1 < h; ++y) {
    for (int x = 0; x + 1 < w; ++x) {
      if (!has_block_at(s, x, y)) continue;
      const auto before = mask_topology(s);
      std::array<Cell, 4> block = {Cell(x, y), Cell(x + 1, y), Cell(x, y + 1), Cell(x + 1, y + 1)};
      std::sort(block.begin(), block.end(), [&](const Cell& a, const Cell& b) {
        return aof(a.y(), a.x()) > aof(b.y(), b.x());
      });
      bool fixed = false;
      for (const Cell& a : block) {
        const int ox = a.x() == x ? -1 : 1;
        const int oy = a.y() == y ? -1 : 1;
        const std::array<Cell, 2> bridges = {Cell(a.x() + ox, a.y()), Cell(a.x(), a.y() + oy)};
        std::array<Cell, 2> order = bridges;
        if (in_bounds(aof, order[1].x(), order[1].y()) && in_bounds(aof, order[0].x(), order[0].y()) &&
            aof(order[1].y(), order[1].x()) < aof(order[0].y(), order[0].x())) {
          std::swap(order[0], order[1]);
        }
        for (const Cell& b : order) {
          if (!in_bounds(s, b.x(), b.y()) || !mask(b.y(), b.x()) || s(b.y(), b.x())) continue;
          s(a.y(), a.x()) = 0;
          s(b.y(), b.x()) = 1;
          bool ok = mask_topology(s) == before;
          for (int dy = -1; ok && dy <= 0; ++dy) {
            for (int dx = -1; ok && dx <= 0; ++dx) ok = !has_block_at(s, b.x() + dx, b.y() + dy);
          }
          if (ok) {
            fixed = true;
            break;
          }
          s(a.y(), a.x()) = 1;
          s(b.y(), b.x()) = 0;
        }
        if (fixed) break;
      }
    }
  }
}

}  // namespace

bool is_simple_configuration(unsigned ring) { return simple_table()[ring & 0xffu]; }

Mask detect_skeleton(const Rasterd& aof, const Mask& mask, double tau) {
  if (!(tau > 0.0)) throw ParameterError("tau must be > 0");
  const int w = static_cast<int>(mask.cols()), h = static_cast<int>(mask.rows());
  Mask s = (mask != 0).cast<std::uint8_t>();
  Mask anchored = Mask::Zero(h, w);
  Mask queued = Mask::Zero(h, w);

  // Highest flux first; ties by raster index.
  using Entry = std::pair<double, int>;
  auto cmp = [](const Entry& a, const Entry& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
  auto push = [&](int x, int y) {
    if (!s(y, x) || anchored(y, x) || queued(y, x)) return;
    queued(y, x) = 1;
    heap.emplace(aof(y, x), y * w + x);
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!s(y, x)) continue;
      bool border = false;
      for (const auto& d : kNeighbors4) {
        const int nx = x + d[0], ny = y + d[1];
        border |= !in_bounds(s, nx, ny) || !s(ny, nx);
      }
      if (border) push(x, y);
    }
  }

  while (!heap.empty()) {
    const auto [value, idx] = heap.top();
    heap.pop();
    const int x = idx % w, y = idx / w;
    queued(y, x) = 0;
    if (!s(y, x) || anchored(y, x)) continue;
    const unsigned ring = ring_of(s, x, y);
    if (!is_simple_configuration(ring)) continue;
    if (std::popcount(ring) == 1 && value < -tau) {
      anchored(y, x) = 1;
      continue;
    }
    s(y, x) = 0;
    for (const auto& d : kNeighbors8) {
      const int nx = x + d[0], ny = y + d[1];
      if (in_bounds(s, nx, ny)) push(nx, ny);
    }
  }

  break_corner_crossings(s, aof, mask);

  const auto comps = label_components(s, 1, 8);
  std::vector<bool> keep(comps.areas.size(), false);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const int l = comps.labels.data()[i];
    if (l >= 0 && aof.data()[i] < -tau) keep[l] = true;
  }
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const int l = comps.labels.data()[i];
    if (l >= 0 && !keep[l]) s.data()[i] = 0;
  }
  return s;
}

std::vector<double> object_angle(const std::vector<Point2d>& polyline, const std::vector<double>& r) {
  const int n = static_cast<int>(polyline.size());
  std::vector<double> theta(n, std::numbers::pi / 2);
  if (n < 2) return theta;
  std::vector<double> s(n, 0.0);
  for (int i = 1; i < n; ++i) s[i] = s[i - 1] + (polyline[i] - polyline[i - 1]).norm();
  // Stencil half-width 2 damps the half-cell quantization of the distance map.
  constexpr int kHalf = 2;
  for (int i = 0; i < n; ++i) {
    int lo = std::max(0, i - kHalf), hi = std::min(n - 1, i + kHalf);
    if (i > 0 && i < n - 1) {
      const int k = std::min(i - lo, hi - i);
      lo = i - k;
      hi = i + k;
    }
    const double ds = s[hi] - s[lo];
    const double slope = ds > 0.0 ? (r[hi] - r[lo]) / ds : 0.0;
    theta[i] = std::acos(std::clamp(std::abs(slope), 0.0, 1.0));
  }
  return theta;
}

TopoGraph extract_graph(const Mask& skeletal, const Rasterd& dist) {
  const int w = static_cast<int>(skeletal.cols()), h = static_cast<int>(skeletal.rows());
  const Mask s = (skeletal != 0).cast<std::uint8_t>();
  Raster<int> deg = Raster<int>::Zero(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (s(y, x)) deg(y, x) = count_neighbors(s, x, y);
    }
  }

  // Node membership per cell: junction clusters first, then endpoints.
  Raster<int> node_of = Raster<int>::Constant(h, w, -1);
  std::vector<std::vector<Cell>> members;
  std::vector<NodeKind> kinds;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!s(y, x) || deg(y, x) < 3 || node_of(y, x) >= 0) continue;
      const int id = static_cast<int>(members.size());
      members.emplace_back();
      kinds.push_back(NodeKind::Junction);
      std::deque<Cell> q{Cell(x, y)};
      node_of(y, x) = id;
      while (!q.empty()) {
        const Cell c = q.front();
        q.pop_front();
        members[id].push_back(c);
        for (const auto& d : kNeighbors8) {
          const int nx = c.x() + d[0], ny = c.y() + d[1];
          if (in_bounds(s, nx, ny) && s(ny, nx) && deg(ny, nx) >= 3 && node_of(ny, nx) < 0) {
            node_of(ny, nx) = id;
            q.emplace_back(nx, ny);
          }
        }
      }
    }
  }
  // Degree-2 cells wedged between two cells of one cluster belong to it.
  for (bool changed = true; changed;) {
    changed = false;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (!s(y, x) || node_of(y, x) >= 0 || deg(y, x) != 2) continue;
        int owner = -2;
        for (const auto& d : kNeighbors8) {
          const int nx = x + d[0], ny = y + d[1];
          if (!in_bounds(s, nx, ny) || !s(ny, nx)) continue;
          const int o = node_of(ny, nx);
          if (o < 0 || kinds[o] != NodeKind::Junction || (owner != -2 && owner != o)) {
            owner = -1;
            break;
          }
          owner = o;
        }
        if (owner >= 0) {
          node_of(y, x) = owner;
          members[owner].emplace_back(x, y);
          changed = true;
        }
      }
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!s(y, x) || node_of(y, x) >= 0 || deg(y, x) > 1) continue;
      node_of(y, x) = static_cast<int>(members.size());
      members.push_back({Cell(x, y)});
      kinds.push_back(NodeKind::Endpoint);
    }
  }

  auto make_node = [&](int id) {
    TopoNode n;
    n.id = id;
    n.kind = kinds[id];
    Point2d c = Point2d::Zero();
    for (const auto& m : members[id]) {
      c += m.cast<double>();
      n.r = std::max(n.r, dist(m.y(), m.x()));
    }
    c /= static_cast<double>(members[id].size());
    n.x = c.x();
    n.y = c.y();
    return n;
  };
  auto sample_at = [&](const Cell& c) {
    return SkeletonSample{double(c.x()), double(c.y()), dist(c.y(), c.x()), 0.0};
  };

  TopoGraph g;
  for (int id = 0; id < static_cast<int>(members.size()); ++id) g.nodes.push_back(make_node(id));
  auto node_sample = [&](int id) {
    const auto& n = g.nodes[id];
    return SkeletonSample{n.x, n.y, n.r, 0.0};
  };

  // Node cells that touch a different node directly.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int a = node_of(y, x);
      if (a < 0) continue;
      for (const auto& d : kNeighbors8) {
        const int nx = x + d[0], ny = y + d[1];
        if (!in_bounds(s, nx, ny)) continue;
        const int b = node_of(ny, nx);
        if (b < 0 || b <= a) continue;
        const bool exists = std::any_of(g.edges.begin(), g.edges.end(), [&](const TopoEdge& e) {
          return e.u == a && e.v == b && e.polyline.size() == 2;
        });
        if (exists) continue;
        TopoEdge e;
        e.u = a;
        e.v = b;
        e.polyline = {node_sample(a), node_sample(b)};
        g.edges.push_back(std::move(e));
      }
    }
  }

  // Chains of degree-2 cells between nodes.
  Mask seen = Mask::Zero(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!s(y, x) || node_of(y, x) >= 0 || seen(y, x)) continue;
      std::vector<Cell> chain;
      std::deque<Cell> q{Cell(x, y)};
      seen(y, x) = 1;
      while (!q.empty()) {
        const Cell c = q.front();
        q.pop_front();
        chain.push_back(c);
        for (const auto& d : kNeighbors8) {
          const int nx = c.x() + d[0], ny = c.y() + d[1];
          if (in_bounds(s, nx, ny) && s(ny, nx) && node_of(ny, nx) < 0 && !seen(ny, nx)) {
            seen(ny, nx) = 1;
            q.emplace_back(nx, ny);
          }
        }
      }
      auto chain_neighbors = [&](const Cell& c) {
        std::vector<Cell> out;
        for (const auto& d : kNeighbors8) {
          const int nx = c.x() + d[0], ny = c.y() + d[1];
          if (in_bounds(s, nx, ny) && s(ny, nx) && node_of(ny, nx) < 0) out.emplace_back(nx, ny);
        }
        return out;
      };
      Cell start = chain.front();
      bool is_loop = true;
      for (const auto& c : chain) {
        if (chain_neighbors(c).size() < 2) {
          start = c;
          is_loop = false;
          break;
        }
      }
      if (is_loop) {
        // Closed curve without junctions: anchor it on its first cell.
        start = *std::min_element(chain.begin(), chain.end(), [](const Cell& a, const Cell& b) {
          return a.y() != b.y() ? a.y() < b.y() : a.x() < b.x();
        });
        const int id = static_cast<int>(members.size());
        members.push_back({start});
        kinds.push_back(NodeKind::Junction);
        node_of(start.y(), start.x()) = id;
        g.nodes.push_back(make_node(id));
      }
      // Walk the chain in order.
      std::vector<Cell> ordered;
      {
        Mask walked = Mask::Zero(h, w);
        Cell cur = start;
        if (is_loop) {
          // Step off the anchor onto one of its chain neighbors.
          walked(cur.y(), cur.x()) = 1;
          const auto nb = chain_neighbors(cur);
          cur = nb.front();
        }
        while (true) {
          ordered.push_back(cur);
          walked(cur.y(), cur.x()) = 1;
          bool moved = false;
          for (const auto& c : chain_neighbors(cur)) {
            if (!walked(c.y(), c.x())) {
              cur = c;
              moved = true;
              break;
            }
          }
          if (!moved) break;
        }
      }
      auto attach = [&](const Cell& c, int exclude) {
        int best = -1;
        for (const auto& d : kNeighbors8) {
          const int nx = c.x() + d[0], ny = c.y() + d[1];
          if (!in_bounds(s, nx, ny) || !s(ny, nx)) continue;
          const int o = node_of(ny, nx);
          if (o < 0) continue;
          if (best < 0 || (best == exclude && o != exclude)) best = o;
        }
        return best;
      };
      // A single-cell chain prefers two distinct attachments.
      const int a = attach(ordered.front(), -1);
      const int b = attach(ordered.back(), ordered.size() == 1 ? a : -1);
      if (a < 0 || b < 0) throw InvariantError("skeleton chain without attachment");
      TopoEdge e;
      e.u = a;
      e.v = b;
      e.polyline.push_back(node_sample(a));
      for (const auto& c : ordered) e.polyline.push_back(sample_at(c));
      e.polyline.push_back(node_sample(b));
      g.edges.push_back(std::move(e));
    }
  }

  // Object angles along every edge; node angle is the mean over incident ends.
  std::vector<double> theta_sum(g.nodes.size(), 0.0);
  std::vector<int> theta_cnt(g.nodes.size(), 0);
  for (auto& e : g.edges) {
    std::vector<Point2d> pts;
    std::vector<double> rs;
    for (const auto& p : e.polyline) {
      pts.push_back(p.position());
      rs.push_back(p.r);
    }
    const auto th = object_angle(pts, rs);
    for (std::size_t i = 0; i < th.size(); ++i) e.polyline[i].theta = th[i];
    e.length = polyline_length(e.polyline);
    theta_sum[e.u] += th.front();
    ++theta_cnt[e.u];
    theta_sum[e.v] += th.back();
    ++theta_cnt[e.v];
  }
  for (auto& n : g.nodes) {
    n.theta = theta_cnt[n.id] ? theta_sum[n.id] / theta_cnt[n.id] : std::numbers::pi / 2;
  }
  for (auto& e : g.edges) {
    e.polyline.front().theta = g.nodes[e.u].theta;
    e.polyline.back().theta = g.nodes[e.v].theta;
  }
  return canonicalize(dissolve_degree_two(std::move(g)));
}

namespace {

void add_disk(Raster<int>& cover, const Mask& shape, int x, int y, double r, int v) {
  const int k = static_cast<int>(std::floor(r));
  for (int dy = -k; dy <= k; ++dy) {
    for (int dx = -k; dx <= k; ++dx) {
      if (dx * dx + dy * dy > r * r || !in_bounds(cover, x + dx, y + dy) || !shape(y + dy, x + dx)) continue;
      cover(y + dy, x + dx) += v;
    }
  }
}

// Cells that can be peeled off one curve end: from an end cell up to, not
// including, the first junction cell. A junction-free arc is split at its
// widest cell and yields two tails.
std::vector<std::vector<Cell>> terminal_tails(const Mask& s, const Rasterd& dist) {
  const int w = static_cast<int>(s.cols()), h = static_cast<int>(s.rows());
  std::vector<std::vector<Cell>> tails;
  Mask walked = Mask::Zero(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!s(y, x) || walked(y, x) || count_neighbors(s, x, y) != 1) continue;
      std::vector<Cell> path{Cell(x, y)};
      walked(y, x) = 1;
      bool junction = false;
      while (true) {
        const Cell c = path.back();
        int n = 0;
        Cell next;
        for (const auto& d : kNeighbors8) {
          const int nx = c.x() + d[0], ny = c.y() + d[1];
          if (in_bounds(s, nx, ny) && s(ny, nx) && !walked(ny, nx)) {
            ++n;
            next = Cell(nx, ny);
          }
        }
        if (n != 1) break;
        if (count_neighbors(s, next.x(), next.y()) >= 3) {
          junction = true;
          break;
        }
        walked(next.y(), next.x()) = 1;
        path.push_back(next);
      }
      if (junction) {
        tails.push_back(std::move(path));
        continue;
      }
      if (count_neighbors(s, path.back().x(), path.back().y()) != 1 || path.size() < 3) continue;
      std::size_t top = 0;
      for (std::size_t i = 1; i < path.size(); ++i) {
        if (dist(path[i].y(), path[i].x()) > dist(path[top].y(), path[top].x())) top = i;
      }
      std::vector<Cell> a(path.begin(), path.begin() + top), b(path.rbegin(), path.rend() - top - 1);
      if (!a.empty()) tails.push_back(std::move(a));
      if (!b.empty()) tails.push_back(std::move(b));
    }
  }
  return tails;
}

}  // namespace

Mask prune_ligatures(Mask skeletal, const Rasterd& dist, const Mask& shape, int min_area) {
  if (min_area <= 0) return skeletal;
  const int w = static_cast<int>(skeletal.cols()), h = static_cast<int>(skeletal.rows());
  // Disks of the rest of the skeleton count as covering one cell further, so
  // a tail that only reaches one-cell boundary jitter has no unique area.
  constexpr double slack = 1.0;
  Raster<int> cover = Raster<int>::Zero(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (skeletal(y, x)) add_disk(cover, shape, x, y, dist(y, x) + slack, 1);
    }
  }
  Raster<int> mine = Raster<int>::Zero(h, w);
  Mask counted = Mask::Zero(h, w);
  auto unique_area = [&](const std::vector<Cell>& tail) {
    for (const Cell& c : tail) add_disk(mine, shape, c.x(), c.y(), dist(c.y(), c.x()) + slack, 1);
    int area = 0;
    for (const Cell& c : tail) {
      const double r = dist(c.y(), c.x());
      const int k = static_cast<int>(std::floor(r));
      for (int dy = -k; dy <= k; ++dy) {
        for (int dx = -k; dx <= k; ++dx) {
          const int nx = c.x() + dx, ny = c.y() + dy;
          if (dx * dx + dy * dy > r * r || !in_bounds(mine, nx, ny) || !shape(ny, nx) || counted(ny, nx)) continue;
          counted(ny, nx) = 1;
          if (mine(ny, nx) == cover(ny, nx)) ++area;
        }
      }
    }
    for (const Cell& c : tail) {
      const int k = static_cast<int>(std::floor(dist(c.y(), c.x()) + slack));
      for (int dy = -k; dy <= k; ++dy) {
        for (int dx = -k; dx <= k; ++dx) {
          const int nx = c.x() + dx, ny = c.y() + dy;
          if (!in_bounds(mine, nx, ny)) continue;
          mine(ny, nx) = 0;
          counted(ny, nx) = 0;
        }
      }
    }
    return area;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    auto tails = terminal_tails(skeletal, dist);
    std::vector<std::pair<int, std::size_t>> order;
    for (std::size_t i = 0; i < tails.size(); ++i) order.emplace_back(unique_area(tails[i]), i);
    std::sort(order.begin(), order.end());
    for (const auto& [area, i] : order) {
      if (area >= min_area) break;
      const auto& tail = tails[i];
      // Earlier removals can only raise this tail's share; re-check it and
      // make sure it is still attached at one end only.
      bool intact = true;
      for (const Cell& c : tail) intact &= skeletal(c.y(), c.x()) != 0;
      if (!intact || count_neighbors(skeletal, tail.front().x(), tail.front().y()) != 1) continue;
      if (unique_area(tail) >= min_area) continue;
      for (const Cell& c : tail) {
        skeletal(c.y(), c.x()) = 0;
        add_disk(cover, shape, c.x(), c.y(), dist(c.y(), c.x()) + slack, -1);
      }
      changed = true;
    }
  }
  return skeletal;
}

SkeletonFieldd compute_skeleton(const Mask& mask, const SkeletonParams& params) {
  SkeletonFieldd f;
  f.dist = distance_transform<double>(mask);
  f.grad = gradient_field(f.dist);
  f.aof = average_outward_flux(f.grad, mask, params.eps, params.n_samples);
  f.skeletal = prune_ligatures(detect_skeleton(f.aof, mask, params.tau), f.dist, mask, params.min_branch_area);
  return f;
}

}  // namespace topomap
