#include "topomap/topo_distance.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <tuple>

#include "topomap/errors.hpp"

namespace topomap {

namespace {

std::vector<std::vector<std::pair<int, double>>> adjacency(const MedialGraph& g) {
  std::vector<std::vector<std::pair<int, double>>> adj(g.size());
  for (const auto& [i, j] : g.edges) {
    const double w = (g.vertices[i].position() - g.vertices[j].position()).norm();
    adj[i].emplace_back(j, w);
    adj[j].emplace_back(i, w);
  }
  return adj;
}

// Dijkstra from `src`; predecessor per vertex, ties broken by vertex id.
std::vector<int> predecessors(const std::vector<std::vector<std::pair<int, double>>>& adj, int src) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(adj.size(), inf);
  std::vector<int> pred(adj.size(), -2);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
  dist[src] = 0.0;
  pred[src] = -1;
  q.emplace(0.0, src);
  while (!q.empty()) {
    const auto [d, v] = q.top();
    q.pop();
    if (d > dist[v]) continue;
    for (const auto& [u, w] : adj[v]) {
      const double cand = d + w;
      if (cand < dist[u] || (cand == dist[u] && v < pred[u])) {
        dist[u] = cand;
        pred[u] = v;
        q.emplace(cand, u);
      }
    }
  }
  return pred;
}

std::vector<int> unwind(const std::vector<int>& pred, int from, int to) {
  if (pred[to] == -2) return {};
  std::vector<int> path;
  for (int v = to; v != -1; v = pred[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  if (path.front() != from) return {};
  return path;
}

std::vector<MedialVertex> vertices_of(const MedialGraph& g, const std::vector<int>& ids) {
  std::vector<MedialVertex> out;
  for (int i : ids) out.push_back(g.vertices[i]);
  return out;
}

}  // namespace

std::vector<int> shortest_vertex_path(const MedialGraph& g, int from, int to) {
  if (from < 0 || to < 0 || from >= g.size() || to >= g.size()) throw ParameterError("vertex does not exist");
  return unwind(predecessors(adjacency(g), from), from, to);
}

std::vector<int> endpoint_vertices(const MedialGraph& g) {
  std::vector<int> out;
  for (int i = 0; i < g.size(); ++i) {
    if (g.vertices[i].endpoint) out.push_back(i);
  }
  return out;
}

double path_length(const MedialGraph& g, const std::vector<int>& vertices) {
  double len = 0.0;
  for (std::size_t k = 1; k < vertices.size(); ++k) {
    len += (g.vertices[vertices[k]].position() - g.vertices[vertices[k - 1]].position()).norm();
  }
  return len;
}

std::vector<EndpointPath> endpoint_paths(const MedialGraph& g) {
  const auto adj = adjacency(g);
  const auto ends = endpoint_vertices(g);
  std::vector<EndpointPath> out;
  for (std::size_t i = 0; i < ends.size(); ++i) {
    const auto pred = predecessors(adj, ends[i]);
    for (std::size_t j = i + 1; j < ends.size(); ++j) {
      auto path = unwind(pred, ends[i], ends[j]);
      if (path.empty()) continue;
      EndpointPath p{ends[i], ends[j], std::move(path), 0.0};
      p.length = path_length(g, p.vertices);
      out.push_back(std::move(p));
    }
  }
  return out;
}

namespace {

std::vector<Eigen::Vector3d> centered(const std::vector<MedialVertex>& p, double gamma) {
  Point2d c = Point2d::Zero();
  for (const auto& v : p) c += v.position();
  c /= static_cast<double>(p.size());
  std::vector<Eigen::Vector3d> out;
  for (const auto& v : p) out.emplace_back(v.x - c.x(), v.y - c.y(), gamma * v.r);
  return out;
}

}  // namespace

double default_skip_cost(const std::vector<MedialVertex>& a, const std::vector<MedialVertex>& b, double gamma) {
  if (a.empty() || b.empty()) return 0.5;
  const auto ca = centered(a, gamma), cb = centered(b, gamma);
  std::vector<double> nearest;
  auto collect = [&](const std::vector<Eigen::Vector3d>& from, const std::vector<Eigen::Vector3d>& to) {
    for (const auto& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : to) best = std::min(best, (p - q).norm());
      nearest.push_back(best);
    }
  };
  collect(ca, cb);
  collect(cb, ca);
  std::sort(nearest.begin(), nearest.end());
  const std::size_t k = nearest.size();
  const double median = k % 2 ? nearest[k / 2] : 0.5 * (nearest[k / 2 - 1] + nearest[k / 2]);
  return std::max(2.0 * median, 0.5);
}

double path_distance(const std::vector<MedialVertex>& a, const std::vector<MedialVertex>& b, double gamma,
                     double skip_cost) {
  if (a.empty() || b.empty()) throw ParameterError("path distance needs non-empty paths");
  const double skip = skip_cost < 0.0 ? default_skip_cost(a, b, gamma) : skip_cost;
  const auto ca = centered(a, gamma), cb = centered(b, gamma);
  const std::size_t n = ca.size(), m = cb.size();
  // Lexicographic (total cost, -matches) so that ties resolve the same way
  // in both argument orders.
  struct Cell {
    double cost;
    int matches;
    bool operator<(const Cell& o) const { return cost != o.cost ? cost < o.cost : matches > o.matches; }
  };
  std::vector<Cell> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = {skip * static_cast<double>(j), 0};
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = {skip * static_cast<double>(i), 0};
    for (std::size_t j = 1; j <= m; ++j) {
      Cell best{prev[j - 1].cost + (ca[i - 1] - cb[j - 1]).norm(), prev[j - 1].matches + 1};
      const Cell up{prev[j].cost + skip, prev[j].matches};
      const Cell left{cur[j - 1].cost + skip, cur[j - 1].matches};
      if (up < best) best = up;
      if (left < best) best = left;
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  const Cell end = prev[m];
  return end.matches > 0 ? end.cost / end.matches : end.cost;
}

DistanceResult environment_distance(const MedialGraph& a, const MedialGraph& b, const Correspondence& t,
                                    const DistanceParams& params) {
  DistanceResult r;
  const auto ends_a = endpoint_vertices(a), ends_b = endpoint_vertices(b);
  r.n = static_cast<int>(ends_a.size());
  r.m = static_cast<int>(ends_b.size());
  if (r.n < 2 || r.m < 2) throw UndefinedDistanceError("distance needs at least two endpoints in each graph");

  std::vector<int> a_to_b(a.size(), -1), b_to_a(b.size(), -1);
  for (const auto& p : t.pairs) {
    if (p.a < 0 || p.a >= a.size() || p.b < 0 || p.b >= b.size()) {
      throw ParameterError("correspondence references a missing vertex");
    }
    a_to_b[p.a] = p.b;
    b_to_a[p.b] = p.a;
  }

  // Image of an endpoint: its partner, else the partner of the nearest
  // matched vertex within snap_radius.
  auto image = [&](const MedialGraph& g, const std::vector<int>& map, int v) {
    if (map[v] >= 0) return map[v];
    int best = -1;
    double best_d = params.snap_radius;
    for (int u = 0; u < g.size(); ++u) {
      if (map[u] < 0) continue;
      const double d = (g.vertices[u].position() - g.vertices[v].position()).norm();
      if (d <= best_d && (best < 0 || d < best_d)) {
        best = u;
        best_d = d;
      }
    }
    return best < 0 ? -1 : map[best];
  };

  auto side_sum = [&](int side, const MedialGraph& g, const MedialGraph& other, const std::vector<int>& ends,
                      const std::vector<int>& map, int& unmatched) {
    const auto adj = adjacency(g), adj_other = adjacency(other);
    std::vector<int> img;
    for (int e : ends) {
      img.push_back(image(g, map, e));
      unmatched += img.back() < 0;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < ends.size(); ++i) {
      const auto pred = predecessors(adj, ends[i]);
      const auto pred_other = img[i] >= 0 ? predecessors(adj_other, img[i]) : std::vector<int>{};
      for (std::size_t j = i + 1; j < ends.size(); ++j) {
        const auto path = unwind(pred, ends[i], ends[j]);
        if (path.empty()) continue;  // different components: no path to compare
        if (img[i] < 0 || img[j] < 0) {
          ++r.dropped_pairs;
          continue;
        }
        const auto mapped = unwind(pred_other, img[i], img[j]);
        if (mapped.empty()) {
          ++r.dropped_pairs;
          continue;
        }
        const double pd = path_distance(vertices_of(g, path), vertices_of(other, mapped), params.gamma,
                                        params.skip_cost);
        r.terms.push_back({side, ends[i], ends[j], img[i], img[j], pd});
        sum += pd;
      }
    }
    return sum;
  };

  r.first_sum = side_sum(0, a, b, ends_a, a_to_b, r.unmatched_a);
  r.second_sum = side_sum(1, b, a, ends_b, b_to_a, r.unmatched_b);
  r.d = r.first_sum / (static_cast<double>(r.n) * (r.n - 1)) + r.second_sum / (static_cast<double>(r.m) * (r.m - 1));
  return r;
}

}  // namespace topomap
