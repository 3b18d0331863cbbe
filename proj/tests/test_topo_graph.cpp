#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "shapes.hpp"
#include "topomap/aof_skeleton.hpp"
#include "topomap/topo_graph.hpp"
#include "topomap/worlds.hpp"

using namespace topomap;

namespace {

TopoGraph graph_of(const Mask& free) {
  const auto f = compute_skeleton(free);
  return canonicalize(extract_graph(f.skeletal, f.dist));
}

TriState fully_sensed(const Mask& free) {
  return free.unaryExpr([](std::uint8_t v) {
    return std::uint8_t(v ? CellClass::Free : CellClass::Obstacle);
  });
}

int count_kind(const TopoGraph& g, NodeKind k) {
  return static_cast<int>(std::count_if(g.nodes.begin(), g.nodes.end(), [&](const TopoNode& n) { return n.kind == k; }));
}

bool near_node(const TopoGraph& g, double x, double y, double tol) {
  return std::any_of(g.nodes.begin(), g.nodes.end(),
                     [&](const TopoNode& n) { return std::hypot(n.x - x, n.y - y) <= tol; });
}

}  // namespace

TEST_CASE("a sensed dead-end alcove loses exactly its spur") {
  const TriState tri = shapes::corridor_fixture(true);
  const TopoGraph g = graph_of(shapes::free_of(tri));
  REQUIRE(near_node(g, 49, 8, 4));
  const TopoGraph p = prune(g, tri);
  CHECK(p.nodes.size() + 2 == g.nodes.size());
  CHECK(p.edges.size() + 2 == g.edges.size());
  CHECK_FALSE(near_node(p, 49, 8, 6));
  CHECK(count_kind(p, NodeKind::Endpoint) + 1 == count_kind(g, NodeKind::Endpoint));

  const TriState plain = shapes::corridor_fixture(false);
  const TopoGraph q = prune(graph_of(shapes::free_of(plain)), plain);
  REQUIRE(q.nodes.size() == p.nodes.size());
  REQUIRE(q.edges.size() == p.edges.size());
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    CHECK(q.nodes[i].kind == p.nodes[i].kind);
    CHECK(std::hypot(q.nodes[i].x - p.nodes[i].x, q.nodes[i].y - p.nodes[i].y) <= 2.0);
  }
}

TEST_CASE("a spur reaching unknown space is kept") {
  const TriState tri = shapes::corridor_fixture(true, true);
  const TopoGraph g = graph_of(shapes::free_of(tri));
  const TopoGraph p = prune(g, tri);
  CHECK(p.nodes.size() == g.nodes.size());
  CHECK(p.edges.size() == g.edges.size());
}

TEST_CASE("corridor ends open to unknown space are frontiers") {
  const TriState tri = shapes::corridor_fixture(true);
  const TopoGraph g = label_frontiers(prune(graph_of(shapes::free_of(tri)), tri), tri);
  int left = 0, right = 0;
  for (const auto& n : g.nodes) {
    if (n.kind == NodeKind::Junction) CHECK_FALSE(n.frontier);
    if (n.frontier) (n.x < 50 ? left : right)++;
  }
  CHECK(left >= 1);
  CHECK(right >= 1);
  const TopoGraph sealed = label_frontiers(g, fully_sensed(shapes::free_of(tri)));
  for (const auto& n : sealed.nodes) CHECK_FALSE(n.frontier);
}

TEST_CASE("frontier labels are monotone in the radius") {
  const World w = make_world(WorldKind::Cave, 4);
  TriState tri = fully_sensed(w.truth);
  // Forget the right half of the map.
  tri.rightCols(tri.cols() / 2).setConstant(std::uint8_t(CellClass::Background));
  const TopoGraph g = graph_of(shapes::free_of(tri));
  FrontierParams small, large;
  large.radius = small.radius + 4;
  const TopoGraph a = label_frontiers(g, tri, small), b = label_frontiers(g, tri, large);
  int fa = 0;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    if (a.nodes[i].frontier) CHECK(b.nodes[i].frontier);
    fa += a.nodes[i].frontier;
  }
  CHECK(fa > 0);
  for (int r = 0; r < 8; ++r) {
    const Point2d c = g.nodes.front().position();
    CHECK(reachable_unknown(tri, c, r) <= reachable_unknown(tri, c, r + 1));
  }
}

TEST_CASE("prune is idempotent and keeps cycles on generated worlds") {
  for (int k = 0; k < 3; ++k) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const World w = make_world(WorldKind(k), seed);
      const TriState tri = fully_sensed(w.truth);
      const TopoGraph g = graph_of(w.truth);
      const TopoGraph p = prune(g, tri);
      INFO(std::string(world_kind_name(WorldKind(k))) << " " << seed);
      CHECK(prune(p, tri) == p);
      CHECK(graph_betti(p).cycles == graph_betti(g).cycles);
      CHECK(graph_betti(p).components == graph_betti(g).components);
      CHECK(oracle::graph_topology(p) == oracle::graph_topology(g));
      CHECK_NOTHROW(validate(p));
      // The only degree-2 junction allowed is the anchor of a lone cycle.
      for (const auto& n : p.nodes) {
        if (n.kind != NodeKind::Junction || p.degree(n.id) != 2) continue;
        const bool lone_loop = std::any_of(p.edges.begin(), p.edges.end(),
                                           [&](const TopoEdge& e) { return e.u == n.id && e.v == n.id; });
        CHECK(lone_loop);
      }
    }
  }
}

TEST_CASE("a graph without junctions is never pruned") {
  Mask m = shapes::rect(60, 20, 5, 8, 54, 12);
  const TopoGraph g = graph_of(m);
  REQUIRE(count_kind(g, NodeKind::Junction) == 0);
  CHECK(prune(g, fully_sensed(m)) == g);
}

TEST_CASE("empty graph serialization") {
  CHECK(serialize(TopoGraph{}) == R"({"nodes":[],"edges":[]})");
  CHECK(deserialize(R"({"nodes":[],"edges":[]})") == TopoGraph{});
}

TEST_CASE("graph serialization round trips") {
  const World w = make_world(WorldKind::Rooms, 5);
  TopoGraph g = graph_of(w.truth);
  g.nodes.front().frontier = true;
  g.nodes.back().visited = true;
  const std::string text = serialize(g);
  const TopoGraph back = deserialize(text);
  CHECK(back == canonicalize(g));
  CHECK(serialize(back) == text);
}

TEST_CASE("graph parse errors") {
  CHECK_THROWS_AS(deserialize(R"({"nodes":[],"edges":[],"extra":1})"), ParseError);
  CHECK_THROWS_WITH_AS(
      deserialize(R"({"nodes":[{"id":0,"x":1,"y":1,"r":1,"theta":0,"kind":"endpoint","frontier":false,"visited":false,"colour":2}],"edges":[]})"),
      doctest::Contains("colour"), ParseError);
  CHECK_THROWS_WITH_AS(deserialize("{\n\"nodes\": [\n,\n]}"), doctest::Contains("line 3"), ParseError);
  CHECK_THROWS_AS(deserialize(R"({"nodes":[],"edges":[{"u":0,"v":1,"length":1,"polyline":[]}]})"), ParseError);
}

TEST_CASE("validate rejects broken graphs") {
  TopoGraph g;
  g.nodes.push_back({0, 0, 0, 1, 0, NodeKind::Endpoint});
  g.nodes.push_back({1, 5, 0, 1, 0, NodeKind::Endpoint});
  g.edges.push_back({0, 3, 5.0, {{0, 0, 1, 0}, {5, 0, 1, 0}}});
  CHECK_THROWS_AS(validate(g), InvariantError);
  g.edges[0].v = 1;
  CHECK_NOTHROW(validate(g));
  g.edges[0].length = -1;
  CHECK_THROWS_AS(validate(g), InvariantError);
}
