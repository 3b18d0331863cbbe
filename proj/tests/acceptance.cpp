// Acceptance run: one PASS/FAIL line per criterion, exit status = number of
// failures.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "oracles.hpp"
#include "shapes.hpp"
#include "topomap/aof_skeleton.hpp"
#include "topomap/explorer.hpp"
#include "topomap/log.hpp"
#include "topomap/topo_distance.hpp"
#include "topomap/worlds.hpp"

using namespace topomap;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<World> twenty_worlds() {
  std::vector<World> w;
  for (std::uint64_t s = 1; s <= 7; ++s) w.push_back(make_world(WorldKind::Rooms, s));
  for (std::uint64_t s = 1; s <= 6; ++s) w.push_back(make_world(WorldKind::Corridors, s));
  for (std::uint64_t s = 1; s <= 7; ++s) w.push_back(make_world(WorldKind::Cave, s));
  return w;
}

TriState fully_sensed(const Mask& free) {
  return free.unaryExpr([](std::uint8_t v) { return std::uint8_t(v ? CellClass::Free : CellClass::Obstacle); });
}

TopoGraph graph_of(const Mask& free) {
  const auto f = compute_skeleton(free);
  return canonicalize(extract_graph(f.skeletal, f.dist));
}

bool has_2x2_block(const Mask& s) {
  for (int y = 0; y + 1 < s.rows(); ++y) {
    for (int x = 0; x + 1 < s.cols(); ++x) {
      if (s(y, x) && s(y + 1, x) && s(y, x + 1) && s(y + 1, x + 1)) return true;
    }
  }
  return false;
}

double disk_coverage(const Mask& shape, const SkeletonFieldd& f) {
  Mask covered = Mask::Zero(shape.rows(), shape.cols());
  for (int y = 0; y < shape.rows(); ++y) {
    for (int x = 0; x < shape.cols(); ++x) {
      if (!f.skeletal(y, x)) continue;
      const double r = f.dist(y, x);
      const int k = static_cast<int>(std::ceil(r));
      for (int dy = -k; dy <= k; ++dy) {
        for (int dx = -k; dx <= k; ++dx) {
          if (dx * dx + dy * dy <= r * r && in_bounds(covered, x + dx, y + dy)) covered(y + dy, x + dx) = 1;
        }
      }
    }
  }
  return static_cast<double>(((covered != 0) && (shape != 0)).count()) / static_cast<double>((shape != 0).count());
}

Outcome edt_exactness() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> fill(0.3, 0.95);
  const auto t0 = Clock::now();
  int exact = 0;
  for (int i = 0; i < 200; ++i) {
    const Mask m = oracle::random_mask(32, 32, fill(rng), rng);
    exact += (distance_transform<double>(m) == oracle::brute_force_edt(m)).all();
  }
  const double t = seconds_since(t0);
  return {exact == 200 && t < 5.0, fmt("%d/200 exact, %.2f s", exact, t)};
}

Outcome aof_calibration() {
  using std::numbers::pi;
  const Mask d = shapes::disk(61, 61, 30, 30, 25);
  const double center = average_outward_flux(gradient_field(distance_transform(d)), d, 1.5, 60)(30, 30);
  bool ok = std::abs(center + 1.0) <= 0.05;

  Mask half = Mask::Ones(60, 80);
  half.row(0).setZero();
  const Rasterd hf = average_outward_flux(gradient_field(distance_transform(half)), half, 1.5, 60);
  const double interior = hf.block(10, 10, 40, 60).abs().maxCoeff();
  ok &= interior <= 0.05;

  // Strip (object angle 90 degrees) and wedges: the medial value against
  // quadrature of the analytic field, which itself is -(2/pi) sin(theta).
  double worst = 0.0;
  const Mask strip = shapes::rect(120, 41, 0, 5, 119, 35);
  const Rasterd sf = average_outward_flux(gradient_field(distance_transform(strip)), strip, 1.5, 60);
  for (int x = 30; x <= 90; x += 10) worst = std::max(worst, std::abs(sf(20, x) + 2 / pi));
  for (double deg : {15.0, 25.0, 35.0}) {
    const double alpha = deg * pi / 180;
    const double exact = oracle::wedge_flux(alpha, 1.0, 0.0, 1.5);
    ok &= std::abs(exact + (2 / pi) * std::sin(pi / 2 - alpha)) < 1e-3;
    const Mask w = shapes::wedge(200, 140, 5, 70, alpha, 185);
    const Rasterd wf = average_outward_flux(gradient_field(distance_transform(w)), w, 1.5, 60);
    for (int x = 60; x <= 120; x += 10) worst = std::max(worst, std::abs(wf(70, x) - exact));
  }
  ok &= worst <= 0.1;
  return {ok, fmt("center %.4f, interior max |aof| %.4f, medial max error %.4f", center, interior, worst)};
}

Outcome topology(const std::vector<World>& worlds, const std::vector<SkeletonFieldd>& fields) {
  int ok = 0;
  for (std::size_t i = 0; i < worlds.size(); ++i) {
    const auto free = oracle::digital_topology(worlds[i].truth);
    const auto skel = oracle::digital_topology(fields[i].skeletal);
    const auto graph = oracle::graph_topology(extract_graph(fields[i].skeletal, fields[i].dist));
    ok += free == skel && free == graph;
  }
  return {ok == int(worlds.size()), fmt("%d/%zu worlds", ok, worlds.size())};
}

Outcome thinness(const std::vector<World>& worlds, const std::vector<SkeletonFieldd>& fields) {
  int ok = 0;
  double lowest = 1.0;
  for (std::size_t i = 0; i < worlds.size(); ++i) {
    const double c = disk_coverage(worlds[i].truth, fields[i]);
    lowest = std::min(lowest, c);
    ok += !has_2x2_block(fields[i].skeletal) && c >= 0.95;
  }
  return {ok == int(worlds.size()), fmt("%d/%zu worlds, lowest coverage %.4f", ok, worlds.size(), lowest)};
}

Outcome pruning(const std::vector<World>& worlds) {
  int ok = 0;
  for (const auto& w : worlds) {
    const TriState tri = fully_sensed(w.truth);
    const TopoGraph g = graph_of(w.truth), p = prune(g, tri);
    ok += prune(p, tri) == p && oracle::graph_topology(p) == oracle::graph_topology(g);
  }
  const TriState alcove = shapes::corridor_fixture(true);
  const TopoGraph g = graph_of(shapes::free_of(alcove)), p = prune(g, alcove);
  const TriState plain = shapes::corridor_fixture(false);
  const TopoGraph q = prune(graph_of(shapes::free_of(plain)), plain);
  const bool one_spur = p.nodes.size() + 2 == g.nodes.size() && p.edges.size() + 2 == g.edges.size() &&
                        p.nodes.size() == q.nodes.size() && p.edges.size() == q.edges.size();
  return {ok == int(worlds.size()) && one_spur,
          fmt("%d/%zu worlds; alcove %s", ok, worlds.size(), one_spur ? "lost one spur" : "NOT reduced to one spur")};
}

Outcome planner() {
  std::mt19937_64 rng(99);
  int ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 50)(rng);
    const int m = std::uniform_int_distribution<int>(n - 1, 3 * n)(rng);
    TopoGraph g;
    for (int i = 0; i < n; ++i) g.nodes.push_back({i, double(i), 0.0, 1.0, 0.0, NodeKind::Junction});
    std::vector<std::tuple<int, int, double>> edges;
    std::uniform_int_distribution<int> node(0, n - 1), weight(1, 4096);
    for (int e = 0; e < m; ++e) {
      const int u = node(rng), v = node(rng);
      if (u == v) continue;
      const double len = weight(rng) / 1024.0;
      TopoEdge edge;
      edge.u = u;
      edge.v = v;
      edge.length = len;
      g.edges.push_back(edge);
      edges.emplace_back(u, v, len);
    }
    const int src = node(rng);
    ok += shortest_paths(g, src).dist == oracle::dijkstra(n, edges, src);
  }
  return {ok == 100, fmt("%d/100 graphs exact", ok)};
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    out[fs::relative(e.path(), root).string()] = s.str();
  }
  return out;
}

Outcome exploration() {
  const World w = make_world(WorldKind::Cave, 9);
  const Point2d start = default_start(w);
  RunConfig cfg;
  cfg.seed = 1;
  const auto t0 = Clock::now();
  const RunResult r = run_exploration(w, start, cfg);
  const double t = seconds_since(t0);
  const int frontiers = r.steps.back().frontier_count;
  const double sensed = shapes::sensed_fraction(w, start, r.map);
  const int steps = static_cast<int>(r.steps.size());

  const fs::path root = fs::temp_directory_path() / ("topomap_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  write_run_artifacts(root / "a", r);
  write_run_artifacts(root / "b", run_exploration(w, start, cfg));
  const bool identical = tree(root / "a") == tree(root / "b");
  fs::remove_all(root);

  const bool ok = r.done && frontiers == 0 && sensed >= 0.98 && steps <= 200 && t < 60.0 && identical;
  return {ok, fmt("done %d, %d frontiers, %.4f sensed, %d steps, %.2f s, artifacts %s", int(r.done), frontiers,
                  sensed, steps, t, identical ? "identical" : "differ")};
}

Outcome self_match(const std::vector<TopoGraph>& graphs) {
  int ok = 0;
  for (const auto& g : graphs) {
    const MatchResult m = match_graphs(g, g);
    bool id = m.correspondence.pairs.size() == std::size_t(m.a.size());
    for (const auto& p : m.correspondence.pairs) id &= p.a == p.b;
    ok += id && environment_distance(m.a, m.b, m.correspondence).d == 0.0;
  }
  return {ok == int(graphs.size()), fmt("%d/%zu maps", ok, graphs.size())};
}

TopoGraph explored_graph(const World& w, const Point2d& start, std::uint64_t seed) {
  RunConfig cfg;
  cfg.scan.noise_sigma = 0.05;
  cfg.seed = seed;
  const RunResult r = run_exploration(w, start, cfg);
  const auto f = compute_skeleton(binarize(r.map, cfg.binarize).mask, cfg.skeleton);
  return extract_graph(f.skeletal, f.dist);
}

double distance(const TopoGraph& a, const TopoGraph& b) {
  const MatchResult m = match_graphs(a, b);
  return environment_distance(m.a, m.b, m.correspondence).d;
}

// Maps 2k and 2k + 1 come from world k. A comparison holds when the
// same-world distance is below the distance from both maps of world k, in
// both argument orders, to one map of another world.
Outcome two_starts(const std::vector<TopoGraph>& maps) {
  const int n = static_cast<int>(maps.size());
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) d(i, j) = i == j ? 0.0 : distance(maps[i], maps[j]);
  }
  int ok = 0, total = 0;
  double margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n / 2; ++k) {
    const double same = std::max(d(2 * k, 2 * k + 1), d(2 * k + 1, 2 * k));
    for (int o = 0; o < n; ++o) {
      if (o / 2 == k) continue;
      double other = std::numeric_limits<double>::infinity();
      for (int a : {2 * k, 2 * k + 1}) other = std::min({other, d(a, o), d(o, a)});
      ++total;
      ok += same < other;
      margin = std::min(margin, other - same);
    }
  }
  return {ok == total && total == 12, fmt("%d/%d ordered, smallest margin %.4f", ok, total, margin)};
}

Outcome spectral(const std::vector<TopoGraph>& graphs) {
  double lowest = 0.0;
  for (const auto& t : graphs) {
    const MedialGraph g = medial_graph(t);
    for (Metric metric : {Metric::Inverse, Metric::Gaussian}) {
      const Spectrum s = spectrum(weighted_adjacency(g, metric, 3.0, 1.0), Eigen::VectorXd::Ones(g.size()), 6);
      lowest = std::min(lowest, s.eigenvalues.minCoeff());
    }
  }
  bool ok = lowest >= -1e-8;

  MedialGraph path;
  for (int i = 0; i < 3; ++i) path.vertices.push_back({double(i), 0.0, 1.0, 0.0});
  path.edges = {{0, 1}, {1, 2}};
  const Spectrum p = spectrum(weighted_adjacency(path, Metric::Inverse, 1.0, 0.0), Eigen::VectorXd::Ones(3), 2);
  const double path_err = (p.eigenvalues - Eigen::Vector3d(0, 1, 3)).cwiseAbs().maxCoeff();
  ok &= path_err <= 1e-9;

  int recovered = 0, trials = 0;
  std::mt19937_64 rng(5);
  for (const auto& t : graphs) {
    const MedialGraph g = medial_graph(t);
    const Spectrum s1 = spectrum(weighted_adjacency(g, Metric::Inverse, 1.0, 1.0), Eigen::VectorXd::Ones(g.size()), 6);
    std::vector<int> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> signs(6);
    for (int& v : signs) v = rng() % 2 ? 1 : -1;
    // Mode l of s2 is sign * mode perm[l] of s1.
    Spectrum s2 = s1;
    for (int l = 0; l < 6; ++l) {
      s2.modes.col(l) = signs[l] * s1.modes.col(perm[l]);
      s2.mode_values(l) = s1.mode_values(perm[l]);
    }
    const Spectrum back = apply_alignment(s2, align_spectra(s1, s2));
    ++trials;
    recovered += (back.modes - s1.modes).norm() == 0.0;
  }
  ok &= recovered == trials;
  return {ok, fmt("min eigenvalue %.3g, path error %.2g, %d/%d permutations recovered", lowest, path_err, recovered,
                  trials)};
}

}  // namespace

int main() {
  set_log_level(LogLevel::Error);
  const auto worlds = twenty_worlds();
  std::vector<SkeletonFieldd> fields;
  std::vector<TopoGraph> truth_graphs;
  for (const auto& w : worlds) {
    fields.push_back(compute_skeleton(w.truth));
    truth_graphs.push_back(canonicalize(extract_graph(fields.back().skeletal, fields.back().dist)));
  }
  std::vector<TopoGraph> explored;
  for (int k = 0; k < 3; ++k) {
    const World w = make_world(WorldKind(k), 7 + k);
    const Point2d s1 = default_start(w);
    explored.push_back(explored_graph(w, s1, 1));
    explored.push_back(explored_graph(w, alternate_start(w, s1, 40), 2));
  }
  std::vector<TopoGraph> all = truth_graphs;
  all.insert(all.end(), explored.begin(), explored.end());

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"EDT exactness", edt_exactness},
      {"AOF calibration", aof_calibration},
      {"topology preservation", [&] { return topology(worlds, fields); }},
      {"thinness and reconstruction", [&] { return thinness(worlds, fields); }},
      {"pruning", [&] { return pruning(worlds); }},
      {"planner oracle", planner},
      {"closed-loop exploration", exploration},
      {"self-match", [&] { return self_match(all); }},
      {"two-start robustness", [&] { return two_starts(explored); }},
      {"spectral sanity", [&] { return spectral(all); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("criterion %2zu %-28s %s  %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
