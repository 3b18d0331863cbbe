#include "topomap/topo_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <tuple>

#include <json.hpp>

#include "topomap/errors.hpp"

namespace topomap {

int TopoGraph::degree(int id) const {
  int d = 0;
  for (const auto& e : edges) d += (e.u == id) + (e.v == id);
  return d;
}

double polyline_length(const std::vector<SkeletonSample>& pts) {
  double len = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) len += (pts[i].position() - pts[i - 1].position()).norm();
  return len;
}

namespace {

auto sample_key(const SkeletonSample& s) { return std::tie(s.x, s.y, s.r, s.theta); }

bool polyline_less(const std::vector<SkeletonSample>& a, const std::vector<SkeletonSample>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      [](const SkeletonSample& p, const SkeletonSample& q) {
                                        return sample_key(p) < sample_key(q);
                                      });
}

TopoEdge reversed(TopoEdge e) {
  std::swap(e.u, e.v);
  std::reverse(e.polyline.begin(), e.polyline.end());
  return e;
}

// Drops the listed nodes and renumbers the rest in order.
TopoGraph remove_nodes(const TopoGraph& g, const std::vector<bool>& drop) {
  std::vector<int> remap(g.nodes.size(), -1);
  TopoGraph out;
  for (const auto& n : g.nodes) {
    if (drop[n.id]) continue;
    remap[n.id] = static_cast<int>(out.nodes.size());
    out.nodes.push_back(n);
    out.nodes.back().id = remap[n.id];
  }
  for (const auto& e : g.edges) {
    if (remap[e.u] < 0 || remap[e.v] < 0) continue;
    TopoEdge ne = e;
    ne.u = remap[e.u];
    ne.v = remap[e.v];
    out.edges.push_back(std::move(ne));
  }
  return out;
}

}  // namespace

TopoGraph canonicalize(TopoGraph g) {
  std::vector<int> order(g.nodes.size());
  std::iota(order.begin(), order.end(), 0);
  auto node_key = [&](int i) {
    const auto& n = g.nodes[i];
    return std::make_tuple(n.y, n.x, n.r, n.theta, static_cast<int>(n.kind), n.frontier, n.visited);
  };
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return node_key(a) < node_key(b); });
  std::vector<int> remap(g.nodes.size());
  TopoGraph out;
  for (std::size_t k = 0; k < order.size(); ++k) {
    remap[g.nodes[order[k]].id] = static_cast<int>(k);
    out.nodes.push_back(g.nodes[order[k]]);
    out.nodes.back().id = static_cast<int>(k);
  }
  for (auto e : g.edges) {
    e.u = remap[e.u];
    e.v = remap[e.v];
    if (e.u > e.v) e = reversed(std::move(e));
    if (e.u == e.v) {
      auto r = reversed(e);
      if (polyline_less(r.polyline, e.polyline)) e = std::move(r);
    }
    out.edges.push_back(std::move(e));
  }
  std::stable_sort(out.edges.begin(), out.edges.end(), [](const TopoEdge& a, const TopoEdge& b) {
    if (a.u != b.u) return a.u < b.u;
    if (a.v != b.v) return a.v < b.v;
    if (a.length != b.length) return a.length < b.length;
    return polyline_less(a.polyline, b.polyline);
  });
  return out;
}

void validate(const TopoGraph& g) {
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& n = g.nodes[i];
    if (n.id != static_cast<int>(i)) throw InvariantError("node id does not match its index");
    if (n.frontier && n.kind != NodeKind::Endpoint) throw InvariantError("frontier node is not an endpoint");
  }
  const int n = static_cast<int>(g.nodes.size());
  for (const auto& e : g.edges) {
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n) throw InvariantError("edge references a missing node");
    if (e.u == e.v && e.length <= 0.0) throw InvariantError("zero-length self-loop");
    if (e.length < 0.0) throw InvariantError("negative edge length");
  }
}

TopoGraph dissolve_degree_two(TopoGraph g) {
  while (true) {
    int target = -1;
    std::vector<int> inc;
    for (const auto& node : g.nodes) {
      if (node.kind != NodeKind::Junction) continue;
      inc.clear();
      for (int i = 0; i < static_cast<int>(g.edges.size()); ++i) {
        const auto& e = g.edges[i];
        if (e.u == node.id) inc.push_back(i);
        if (e.v == node.id) inc.push_back(i);
      }
      if (inc.size() == 2 && inc[0] != inc[1]) {
        target = node.id;
        break;
      }
    }
    if (target < 0) break;
    TopoEdge a = g.edges[inc[0]], b = g.edges[inc[1]];
    if (a.v != target) a = reversed(std::move(a));
    if (b.u != target) b = reversed(std::move(b));
    TopoEdge merged;
    merged.u = a.u;
    merged.v = b.v;
    merged.polyline = a.polyline;
    merged.polyline.insert(merged.polyline.end(), b.polyline.begin() + 1, b.polyline.end());
    merged.length = a.length + b.length;
    g.edges.erase(g.edges.begin() + std::max(inc[0], inc[1]));
    g.edges.erase(g.edges.begin() + std::min(inc[0], inc[1]));
    g.edges.push_back(std::move(merged));
    std::vector<bool> drop(g.nodes.size(), false);
    drop[target] = true;
    g = remove_nodes(g, drop);
  }
  for (auto& node : g.nodes) {
    if (node.kind == NodeKind::Junction && g.degree(node.id) <= 1) node.kind = NodeKind::Endpoint;
  }
  return g;
}

Betti graph_betti(const TopoGraph& g) {
  std::vector<int> parent(g.nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = static_cast<int>(g.nodes.size());
  for (const auto& e : g.edges) {
    const int a = find(e.u), b = find(e.v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  Betti b;
  b.components = components;
  b.cycles = static_cast<int>(g.edges.size()) - static_cast<int>(g.nodes.size()) + components;
  return b;
}

int reachable_unknown(const TriState& tri, const Point2d& center, double radius) {
  const int cx = static_cast<int>(std::lround(center.x()));
  const int cy = static_cast<int>(std::lround(center.y()));
  const double r2 = radius * radius;
  const int R = static_cast<int>(std::ceil(radius)) + 1;
  const int side = 2 * R + 1;
  // Local window: 0 = untouched, 1 = flooded, 2 = counted unknown.
  std::vector<std::uint8_t> state(static_cast<std::size_t>(side) * side, 0);
  auto slot = [&](int x, int y) -> std::uint8_t& { return state[(y - cy + R) * side + (x - cx + R)]; };
  auto inside = [&](int x, int y) {
    const double dx = x - center.x(), dy = y - center.y();
    return std::abs(x - cx) <= R && std::abs(y - cy) <= R && dx * dx + dy * dy <= r2;
  };
  auto cls = [&](int x, int y) {
    if (!in_bounds(tri, x, y)) return CellClass::Background;
    return static_cast<CellClass>(tri(y, x));
  };

  int unknown = 0;
  std::deque<Cell> q;
  slot(cx, cy) = 1;
  if (cls(cx, cy) == CellClass::Background) ++unknown;
  q.emplace_back(cx, cy);
  while (!q.empty()) {
    const Cell c = q.front();
    q.pop_front();
    for (const auto& d : kNeighbors4) {
      const int nx = c.x() + d[0], ny = c.y() + d[1];
      if (!inside(nx, ny) || slot(nx, ny) != 0) continue;
      switch (cls(nx, ny)) {
        case CellClass::Free:
          slot(nx, ny) = 1;
          q.emplace_back(nx, ny);
          break;
        case CellClass::Background:
          slot(nx, ny) = 2;
          ++unknown;
          break;
        case CellClass::Obstacle:
          slot(nx, ny) = 3;
          break;
      }
    }
  }
  return unknown;
}

TopoGraph prune(TopoGraph g, const TriState& tri, const PruneParams& params) {
  g = canonicalize(dissolve_degree_two(std::move(g)));
  while (true) {
    int victim_edge = -1, victim_node = -1;
    for (int i = 0; i < static_cast<int>(g.edges.size()); ++i) {
      const auto& e = g.edges[i];
      if (e.u == e.v) continue;
      int j = e.u, p = e.v;
      if (g.nodes[j].kind != NodeKind::Junction) std::swap(j, p);
      if (g.nodes[j].kind != NodeKind::Junction || g.nodes[p].kind != NodeKind::Endpoint) continue;
      if (g.degree(p) != 1) continue;
      const auto& end = g.nodes[p];
      if (reachable_unknown(tri, end.position(), end.r + params.clearance) == 0) {
        victim_edge = i;
        victim_node = p;
        break;
      }
    }
    if (victim_edge < 0) break;
    g.edges.erase(g.edges.begin() + victim_edge);
    std::vector<bool> drop(g.nodes.size(), false);
    drop[victim_node] = true;
    g = canonicalize(dissolve_degree_two(remove_nodes(g, drop)));
  }
  return g;
}

TopoGraph label_frontiers(TopoGraph g, const TriState& tri, const FrontierParams& params) {
  for (auto& n : g.nodes) {
    n.frontier = n.kind == NodeKind::Endpoint &&
                 reachable_unknown(tri, n.position(), n.r + params.radius) >= params.min_unknown;
  }
  return g;
}

namespace {

using ojson = nlohmann::ordered_json;

const char* kind_name(NodeKind k) { return k == NodeKind::Endpoint ? "endpoint" : "junction"; }

void require_keys(const ojson& obj, std::initializer_list<const char*> keys, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  for (const auto& [k, v] : obj.items()) {
    if (std::find_if(keys.begin(), keys.end(), [&](const char* s) { return k == s; }) == keys.end()) {
      throw ParseError(where + ": unknown field '" + k + "'");
    }
  }
  for (const char* k : keys) {
    if (!obj.contains(k)) throw ParseError(where + ": missing field '" + std::string(k) + "'");
  }
}

template <typename T>
T field(const ojson& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(where + ": field '" + std::string(key) + "' has the wrong type");
  }
}

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

}  // namespace

std::string serialize(const TopoGraph& in) {
  const TopoGraph g = canonicalize(in);
  ojson j;
  j["nodes"] = ojson::array();
  j["edges"] = ojson::array();
  for (const auto& n : g.nodes) {
    j["nodes"].push_back({{"id", n.id},
                          {"x", n.x},
                          {"y", n.y},
                          {"r", n.r},
                          {"theta", n.theta},
                          {"kind", kind_name(n.kind)},
                          {"frontier", n.frontier},
                          {"visited", n.visited}});
  }
  for (const auto& e : g.edges) {
    ojson poly = ojson::array();
    for (const auto& p : e.polyline) poly.push_back({p.x, p.y, p.r, p.theta});
    j["edges"].push_back({{"u", e.u}, {"v", e.v}, {"length", e.length}, {"polyline", std::move(poly)}});
  }
  return j.dump();
}

TopoGraph deserialize(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("graph file: syntax error at line " + std::to_string(line_of_offset(text, e.byte)) + ": " +
                     e.what());
  }
  require_keys(j, {"nodes", "edges"}, "graph");
  if (!j["nodes"].is_array() || !j["edges"].is_array()) throw ParseError("graph: nodes and edges must be arrays");

  TopoGraph g;
  std::vector<int> file_ids;
  for (std::size_t i = 0; i < j["nodes"].size(); ++i) {
    const auto& jn = j["nodes"][i];
    const std::string where = "node " + std::to_string(i);
    require_keys(jn, {"id", "x", "y", "r", "theta", "kind", "frontier", "visited"}, where);
    TopoNode n;
    n.id = static_cast<int>(i);
    file_ids.push_back(field<int>(jn, "id", where));
    n.x = field<double>(jn, "x", where);
    n.y = field<double>(jn, "y", where);
    n.r = field<double>(jn, "r", where);
    n.theta = field<double>(jn, "theta", where);
    const auto kind = field<std::string>(jn, "kind", where);
    if (kind == "endpoint") {
      n.kind = NodeKind::Endpoint;
    } else if (kind == "junction") {
      n.kind = NodeKind::Junction;
    } else {
      throw ParseError(where + ": field 'kind' must be endpoint or junction");
    }
    n.frontier = field<bool>(jn, "frontier", where);
    n.visited = field<bool>(jn, "visited", where);
    g.nodes.push_back(n);
  }
  auto index_of = [&](int file_id, const std::string& where) {
    const auto it = std::find(file_ids.begin(), file_ids.end(), file_id);
    if (it == file_ids.end()) throw ParseError(where + ": references unknown node id " + std::to_string(file_id));
    return static_cast<int>(it - file_ids.begin());
  };
  if (std::set<int>(file_ids.begin(), file_ids.end()).size() != file_ids.size()) {
    throw ParseError("graph: duplicate node ids");
  }
  for (std::size_t i = 0; i < j["edges"].size(); ++i) {
    const auto& je = j["edges"][i];
    const std::string where = "edge " + std::to_string(i);
    require_keys(je, {"u", "v", "length", "polyline"}, where);
    TopoEdge e;
    e.u = index_of(field<int>(je, "u", where), where);
    e.v = index_of(field<int>(je, "v", where), where);
    e.length = field<double>(je, "length", where);
    const auto& poly = je["polyline"];
    if (!poly.is_array()) throw ParseError(where + ": field 'polyline' must be an array");
    for (const auto& p : poly) {
      if (!p.is_array() || p.size() != 4) throw ParseError(where + ": polyline entries are [x, y, r, theta]");
      try {
        e.polyline.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>(), p[3].get<double>()});
      } catch (const nlohmann::json::exception&) {
        throw ParseError(where + ": polyline entries must be numbers");
      }
    }
    g.edges.push_back(std::move(e));
  }
  g = canonicalize(std::move(g));
  try {
    validate(g);
  } catch (const InvariantError& e) {
    throw ParseError(std::string("graph: ") + e.what());
  }
  return g;
}

}  // namespace topomap
