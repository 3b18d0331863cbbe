#include "topomap/explorer.hpp"

#include <algorithm>
#include <deque>

#include "topomap/errors.hpp"

namespace topomap {

ShortestPaths shortest_paths(const TopoGraph& g, int src) {
  const int n = static_cast<int>(g.nodes.size());
  if (src < 0 || src >= n) throw ParameterError("shortest paths: source node does not exist");
  for (const auto& e : g.edges) {
    if (e.length < 0.0) throw InvariantError("shortest paths: negative edge weight");
  }
  ShortestPaths sp;
  sp.dist.assign(n, kUnreachable);
  sp.pred.assign(n, -1);
  sp.pred_edge.assign(n, -1);
  sp.dist[src] = 0.0;
  for (int round = 0; round < n - 1; ++round) {
    bool changed = false;
    for (int i = 0; i < static_cast<int>(g.edges.size()); ++i) {
      const auto& e = g.edges[i];
      auto relax = [&](int a, int b) {
        if (sp.dist[a] == kUnreachable) return;
        const double cand = sp.dist[a] + e.length;
        if (cand < sp.dist[b]) {
          sp.dist[b] = cand;
          sp.pred[b] = a;
          sp.pred_edge[b] = i;
          changed = true;
        }
      };
      relax(e.u, e.v);
      relax(e.v, e.u);
    }
    if (!changed) break;
  }
  return sp;
}

std::optional<Target> next_target(const TopoGraph& g, const ExplorationState& s) {
  if (s.current_node < 0 || s.current_node >= static_cast<int>(g.nodes.size())) {
    throw ParameterError("next_target: current node does not exist");
  }
  std::vector<int> frontiers, unvisited;
  for (const auto& n : g.nodes) {
    if (s.visited.count(n.id)) continue;
    if (n.id == s.current_node) continue;
    (n.frontier ? frontiers : unvisited).push_back(n.id);
  }
  const auto& candidates = frontiers.empty() ? unvisited : frontiers;
  if (candidates.empty()) return std::nullopt;

  const auto sp = shortest_paths(g, s.current_node);
  int best = -1;
  for (int id : candidates) {
    if (sp.dist[id] == kUnreachable) continue;
    if (best < 0 || sp.dist[id] < sp.dist[best]) best = id;
  }
  if (best < 0) throw UnreachableFrontierError("no frontier or unvisited node is reachable from the robot");

  Target t;
  t.node = best;
  t.length = sp.dist[best];
  std::vector<int> edge_chain;
  for (int v = best; v != s.current_node; v = sp.pred[v]) {
    t.nodes.push_back(v);
    edge_chain.push_back(sp.pred_edge[v]);
  }
  t.nodes.push_back(s.current_node);
  std::reverse(t.nodes.begin(), t.nodes.end());
  std::reverse(edge_chain.begin(), edge_chain.end());
  for (std::size_t k = 0; k < edge_chain.size(); ++k) {
    const auto& e = g.edges[edge_chain[k]];
    std::vector<SkeletonSample> poly = e.polyline;
    if (e.u != t.nodes[k]) std::reverse(poly.begin(), poly.end());
    for (std::size_t i = (t.path.empty() ? 0 : 1); i < poly.size(); ++i) t.path.push_back(poly[i].position());
  }
  if (t.path.empty()) t.path.push_back(g.nodes[s.current_node].position());
  return t;
}

ExplorationState advance(ExplorationState s, const Target& t) {
  for (int v : t.nodes) s.visited.insert(v);
  s.visited.insert(t.node);
  s.current_node = t.node;
  for (const auto& p : t.path) {
    if (s.trajectory.empty() || (s.trajectory.back() - p).norm() > 0.0) s.trajectory.push_back(p);
  }
  return s;
}

int attach_position(TopoGraph& g, const Point2d& p) {
  if (g.nodes.empty()) return -1;
  int best_node = 0;
  double best_d = (g.nodes[0].position() - p).squaredNorm();
  for (const auto& n : g.nodes) {
    const double d = (n.position() - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best_node = n.id;
    }
  }
  int best_edge = -1;
  std::size_t best_vertex = 0;
  for (int i = 0; i < static_cast<int>(g.edges.size()); ++i) {
    const auto& poly = g.edges[i].polyline;
    for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
      const double d = (poly[k].position() - p).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best_edge = i;
        best_vertex = k;
      }
    }
  }
  if (best_edge < 0) return best_node;

  const TopoEdge e = g.edges[best_edge];
  const auto& split = e.polyline[best_vertex];
  TopoNode n;
  n.id = static_cast<int>(g.nodes.size());
  n.x = split.x;
  n.y = split.y;
  n.r = split.r;
  n.theta = split.theta;
  n.kind = NodeKind::Junction;
  g.nodes.push_back(n);

  TopoEdge a, b;
  a.u = e.u;
  a.v = n.id;
  a.polyline.assign(e.polyline.begin(), e.polyline.begin() + static_cast<std::ptrdiff_t>(best_vertex) + 1);
  a.length = polyline_length(a.polyline);
  b.u = n.id;
  b.v = e.v;
  b.polyline.assign(e.polyline.begin() + static_cast<std::ptrdiff_t>(best_vertex), e.polyline.end());
  b.length = polyline_length(b.polyline);
  g.edges[best_edge] = std::move(a);
  g.edges.push_back(std::move(b));
  return n.id;
}

TopoGraph component_of(const TopoGraph& g, int& node) {
  const int n = static_cast<int>(g.nodes.size());
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : g.edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<bool> in(n, false);
  std::deque<int> q{node};
  in[node] = true;
  while (!q.empty()) {
    const int a = q.front();
    q.pop_front();
    for (int b : adj[a]) {
      if (!in[b]) {
        in[b] = true;
        q.push_back(b);
      }
    }
  }
  std::vector<int> remap(n, -1);
  TopoGraph out;
  for (const auto& nd : g.nodes) {
    if (!in[nd.id]) continue;
    remap[nd.id] = static_cast<int>(out.nodes.size());
    out.nodes.push_back(nd);
    out.nodes.back().id = remap[nd.id];
  }
  for (const auto& e : g.edges) {
    if (!in[e.u]) continue;
    TopoEdge ne = e;
    ne.u = remap[e.u];
    ne.v = remap[e.v];
    out.edges.push_back(std::move(ne));
  }
  node = remap[node];
  return out;
}

}  // namespace topomap
