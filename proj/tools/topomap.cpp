// Command-line front end: one subcommand per pipeline stage.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "topomap/aof_skeleton.hpp"
#include "topomap/binarize.hpp"
#include "topomap/errors.hpp"
#include "topomap/grid_io.hpp"
#include "topomap/log.hpp"
#include "topomap/sim_world.hpp"
#include "topomap/spectral_match.hpp"
#include "topomap/svg.hpp"
#include "topomap/topo_distance.hpp"
#include "topomap/topo_graph.hpp"
#include "topomap/worlds.hpp"

namespace fs = std::filesystem;
using namespace topomap;
using json = nlohmann::ordered_json;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::string log_level = "warn";
  bool svg = false;
  CLI::Option* seed_opt = nullptr;
};

// Resolves `name` under the output directory; anything that would land
// outside it is rejected.
fs::path output_path(const Globals& g, const std::string& name) {
  const fs::path rel = fs::path(name).lexically_normal();
  if (name.empty() || rel.is_absolute() || rel.has_root_name() || *rel.begin() == "..") {
    throw ParameterError("output '" + name + "' must be a relative path inside --out-dir");
  }
  const fs::path p = fs::path(g.out_dir) / rel;
  fs::create_directories(p.parent_path());
  return p;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw InputError("cannot write " + p.string());
  f << text;
  log_info("wrote " + p.string());
}

std::string read_text(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw InputError("cannot read " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

TopoGraph read_graph(const fs::path& p) {
  try {
    return deserialize(read_text(p));
  } catch (const ParseError& e) {
    throw ParseError(p.string() + ": " + e.what());
  }
}

Point2d parse_point(const std::string& s) {
  double x = 0.0, y = 0.0;
  char comma = 0;
  std::istringstream in(s);
  if (!(in >> x >> comma >> y) || comma != ',' || !in.eof()) {
    throw ParameterError("expected a point as x,y but got '" + s + "'");
  }
  return {x, y};
}

// Module flags bound into a RunConfig. Flags given on the command line win
// over a --config file, which wins over built-in defaults.
class ConfigFlags {
 public:
  ConfigFlags(CLI::App* app, RunConfig& cfg) : app_(app), cfg_(cfg) {}

  template <typename Access>
  void add(const std::string& flag, Access access, const std::string& help) {
    CLI::Option* opt = app_->add_option(flag, access(cfg_), help)->capture_default_str();
    copies_.push_back({opt, [access](RunConfig& dst, RunConfig& src) { access(dst) = access(src); }});
  }

  void binarize() {
    add("--sigma", [](RunConfig& c) -> auto& { return c.binarize.sigma; },
        "Gaussian blur sigma in cells; negative picks max(1, round(0.6 / resolution / 20))");
    add("--thresh", [](RunConfig& c) -> auto& { return c.binarize.thresh; }, "Blurred free-fraction threshold in (0,1)");
    add("--min-area", [](RunConfig& c) -> auto& { return c.binarize.min_area; },
        "Free regions smaller than this many cells are dropped");
    add("--min-hole-area", [](RunConfig& c) -> auto& { return c.binarize.min_hole_area; },
        "Interior holes smaller than this many cells are filled (0 = none)");
  }

  void skeleton() {
    add("--eps", [](RunConfig& c) -> auto& { return c.skeleton.eps; }, "Flux circle radius in cells");
    add("--samples", [](RunConfig& c) -> auto& { return c.skeleton.n_samples; }, "Flux samples per circle");
    add("--tau", [](RunConfig& c) -> auto& { return c.skeleton.tau; }, "Skeletal flux threshold (aof < -tau)");
    add("--min-branch-area", [](RunConfig& c) -> auto& { return c.skeleton.min_branch_area; },
        "Skeleton end branches whose disks cover fewer unique cells are removed (0 = keep all)");
  }

  void prune() {
    add("--clearance", [](RunConfig& c) -> auto& { return c.prune.clearance; },
        "Extra radius in cells of the enclosure disk used for pruning");
    add("--frontier-radius", [](RunConfig& c) -> auto& { return c.frontier.radius; },
        "Extra radius in cells of the frontier disk");
    add("--frontier-min-unknown", [](RunConfig& c) -> auto& { return c.frontier.min_unknown; },
        "Unknown cells needed to call an endpoint a frontier");
  }

  void exploration() {
    add("--max-steps", [](RunConfig& c) -> auto& { return c.max_steps; }, "Planning steps before giving up");
    add("--scan-stride", [](RunConfig& c) -> auto& { return c.scan_stride; }, "Cells of travel between scans");
    add("--match-radius", [](RunConfig& c) -> auto& { return c.match_radius; },
        "Visited status carries to nodes within this many cells");
    add("--range-max", [](RunConfig& c) -> auto& { return c.scan.range_max; }, "Scanner range in meters");
    add("--fov", [](RunConfig& c) -> auto& { return c.scan.fov; }, "Scanner field of view in radians");
    add("--rays", [](RunConfig& c) -> auto& { return c.scan.n_rays; }, "Rays per scan");
    add("--noise", [](RunConfig& c) -> auto& { return c.scan.noise_sigma; }, "Range noise std in meters");
  }

  // Applies a config file underneath the flags that were given explicitly.
  void merge_file(const std::string& path) {
    if (path.empty()) return;
    RunConfig merged = parse_run_config(read_key_values(path));
    for (auto& [opt, copy] : copies_) {
      if (opt->count() > 0) copy(merged, cfg_);
    }
    cfg_ = merged;
  }

 private:
  CLI::App* app_;
  RunConfig& cfg_;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&, RunConfig&)>>> copies_;
};

void check(const RunConfig& c) {
  if (!(c.binarize.thresh > 0.0 && c.binarize.thresh < 1.0)) throw ParameterError("--thresh must lie in (0,1)");
  if (c.binarize.min_area < 0 || c.binarize.min_hole_area < 0) throw ParameterError("areas must be >= 0");
  if (c.skeleton.eps < 1.0) throw ParameterError("--eps must be >= 1");
  if (c.skeleton.n_samples < 8) throw ParameterError("--samples must be >= 8");
  if (!(c.skeleton.tau > 0.0)) throw ParameterError("--tau must be > 0");
  if (c.skeleton.min_branch_area < 0) throw ParameterError("--min-branch-area must be >= 0");
  if (c.max_steps < 0) throw ParameterError("--max-steps must be >= 0");
  if (!(c.scan_stride > 0.0)) throw ParameterError("--scan-stride must be > 0");
  validate(c.scan);
}

BinaryMap binarize_grid(const OccupancyGrid& grid, const RunConfig& cfg) {
  BinaryMap bm = binarize(grid, cfg.binarize);
  if (!(bm.mask != 0).any()) log_warn("binarized map has no free space");
  return bm;
}

// Empty free space gives an empty skeleton and graph rather than an error.
SkeletonFieldd skeleton_of(const Mask& mask, const SkeletonParams& p) {
  if (!(mask != 0).any() || !(mask == 0).any()) {
    SkeletonFieldd f;
    f.skeletal = Mask::Zero(mask.rows(), mask.cols());
    f.dist = Rasterd::Zero(mask.rows(), mask.cols());
    return f;
  }
  return compute_skeleton(mask, p);
}

void save_mask(const fs::path& p, const Mask& m, const OccupancyGrid& georef) {
  OccupancyGrid out = georef;
  out.cells = mask_to_image(m);
  save_grid(p, out);
}

// Skeleton image: skeletal cells white on black.
Raster<std::uint8_t> skeleton_image(const Mask& s) { return mask_to_image(s); }

json correspondence_json(const Correspondence& c, int stride) {
  json pairs = json::array();
  for (const auto& p : c.pairs) pairs.push_back({{"id_a", p.a}, {"id_b", p.b}, {"cost", p.cost}});
  return {{"pairs", pairs}, {"unmatched_a", c.unmatched_a}, {"unmatched_b", c.unmatched_b}, {"stride", stride}};
}

std::string correspondence_csv(const Correspondence& c) {
  std::ostringstream os;
  os << "id_a,id_b,cost\n";
  for (const auto& p : c.pairs) os << p.a << ',' << p.b << ',' << format_double(p.cost) << '\n';
  for (int a : c.unmatched_a) os << a << ",,\n";
  for (int b : c.unmatched_b) os << ',' << b << ",\n";
  return os.str();
}

Correspondence read_correspondence(const fs::path& p, int& stride) {
  const std::string text = read_text(p);
  Correspondence c;
  if (p.extension() == ".csv") {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    if (line != "id_a,id_b,cost") throw ParseError(p.string() + ": expected header id_a,id_b,cost");
    int lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::vector<std::string> f;
      std::stringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) f.push_back(cell);
      while (f.size() < 3) f.emplace_back();
      try {
        if (!f[0].empty() && !f[1].empty()) {
          c.pairs.push_back({std::stoi(f[0]), std::stoi(f[1]), f[2].empty() ? 0.0 : std::stod(f[2])});
        } else if (!f[0].empty()) {
          c.unmatched_a.push_back(std::stoi(f[0]));
        } else if (!f[1].empty()) {
          c.unmatched_b.push_back(std::stoi(f[1]));
        }
      } catch (const std::exception&) {
        throw ParseError(p.string() + ": line " + std::to_string(lineno) + ": bad row '" + line + "'");
      }
    }
    return c;
  }
  try {
    const json j = json::parse(text);
    for (const auto& jp : j.at("pairs")) {
      c.pairs.push_back({jp.at("id_a").get<int>(), jp.at("id_b").get<int>(), jp.at("cost").get<double>()});
    }
    c.unmatched_a = j.at("unmatched_a").get<std::vector<int>>();
    c.unmatched_b = j.at("unmatched_b").get<std::vector<int>>();
    if (j.contains("stride")) stride = j.at("stride").get<int>();
  } catch (const json::exception& e) {
    throw ParseError(p.string() + ": " + e.what());
  }
  return c;
}

void check_correspondence(const Correspondence& c, const MedialGraph& a, const MedialGraph& b) {
  auto in = [](int id, const MedialGraph& g) { return id >= 0 && id < g.size(); };
  for (const auto& p : c.pairs) {
    if (!in(p.a, a) || !in(p.b, b)) throw ParameterError("correspondence names a vertex the graphs do not have");
  }
}

World load_world(const std::string& path) {
  const OccupancyGrid g = load_grid(path);
  World w;
  w.truth = image_to_mask(g.cells);
  w.resolution = g.resolution;
  return w;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological maps from occupancy grids: skeletons, exploration and map matching"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  g.seed_opt = app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "Directory that receives all outputs")->capture_default_str();
  app.add_option("--log-level", g.log_level, "debug, info, warn, error or off")->capture_default_str();
  app.add_flag("--svg", g.svg, "Also write SVG renderings");

  // binarize
  RunConfig bin_cfg;
  std::string bin_in, bin_out = "binary.pgm";
  auto* bin = app.add_subcommand("binarize", "Occupancy grid to a free-space mask");
  bin->add_option("--input", bin_in, "Occupancy graymap (.meta sidecar optional)")->required();
  bin->add_option("--output", bin_out, "Mask graymap name inside --out-dir")->capture_default_str();
  ConfigFlags bin_flags(bin, bin_cfg);
  bin_flags.binarize();

  // skeletonize
  RunConfig sk_cfg;
  std::string sk_in, sk_graph = "graph.json", sk_skel = "skeleton.pgm";
  auto* sk = app.add_subcommand("skeletonize", "Free-space mask to a flux skeleton and its graph");
  sk->add_option("--input", sk_in, "Mask graymap, free space >= 128")->required();
  sk->add_option("--output-graph", sk_graph, "Graph file name inside --out-dir")->capture_default_str();
  sk->add_option("--output-skel", sk_skel, "Skeleton graymap name inside --out-dir")->capture_default_str();
  ConfigFlags sk_flags(sk, sk_cfg);
  sk_flags.skeleton();

  // prune
  RunConfig pr_cfg;
  std::string pr_graph, pr_map, pr_out = "pruned.json";
  auto* pr = app.add_subcommand("prune", "Remove enclosed dead-end branches and label frontiers");
  pr->add_option("--graph", pr_graph, "Graph file")->required();
  pr->add_option("--map", pr_map, "Occupancy graymap the graph was built from")->required();
  pr->add_option("--output", pr_out, "Graph file name inside --out-dir")->capture_default_str();
  ConfigFlags pr_flags(pr, pr_cfg);
  pr_flags.prune();

  // explore
  RunConfig ex_cfg;
  std::string ex_world, ex_start, ex_config;
  auto* ex = app.add_subcommand("explore", "Simulated frontier exploration of a ground-truth world");
  ex->add_option("--world", ex_world, "World graymap, free >= 128 (.meta sidecar optional)")->required();
  ex->add_option("--start", ex_start, "Start cell as x,y (default: widest free cell)");
  ex->add_option("--config", ex_config, "key: value run config; flags given here override it");
  ConfigFlags ex_flags(ex, ex_cfg);
  ex_flags.exploration();
  ex_flags.binarize();
  ex_flags.skeleton();
  ex_flags.prune();

  // match
  MatchParams mp;
  std::string m_a, m_b, m_out = "correspondence.json", m_metric = "inverse", m_features = "r";
  auto* mt = app.add_subcommand("match", "Vertex correspondences between two graphs");
  mt->add_option("--graph-a", m_a, "First graph file")->required();
  mt->add_option("--graph-b", m_b, "Second graph file")->required();
  mt->add_option("--out", m_out, "Output name inside --out-dir (.json or .csv)")->capture_default_str();
  mt->add_option("--metric", m_metric, "Edge weight: inverse or gaussian")->capture_default_str();
  mt->add_option("--sigma", mp.sigma, "Gaussian metric width in cells")->capture_default_str();
  mt->add_option("--gamma", mp.gamma, "Weight of vertex features against position")->capture_default_str();
  mt->add_option("--features", m_features, "Vertex features: r or r,theta")->capture_default_str();
  mt->add_flag("--radius-node-weights", mp.radius_node_weights, "Weight Laplacian nodes by radius");
  mt->add_option("--modes", mp.modes, "Spectral modes in the embedding")->capture_default_str();
  mt->add_option("--alpha", mp.alpha, "Eigenvalue term of mode alignment")->capture_default_str();
  mt->add_option("--beta", mp.beta, "Histogram term of mode alignment")->capture_default_str();
  mt->add_option("--spatial-weight", mp.spatial_weight, "Spatial term of mode alignment (0 = off)")
      ->capture_default_str();
  mt->add_option("--stride", mp.stride, "Keep every n-th skeleton sample along branches")->capture_default_str();
  mt->add_option("--p-min", mp.p_min, "Posteriors below this stay unmatched")->capture_default_str();
  mt->add_option("--cpd-w", mp.cpd.w, "CPD outlier weight")->capture_default_str();
  mt->add_option("--cpd-beta", mp.cpd.beta, "CPD coherence kernel width")->capture_default_str();
  mt->add_option("--cpd-lambda", mp.cpd.lambda, "CPD smoothness weight")->capture_default_str();

  // distance
  DistanceParams dp;
  std::string d_a, d_b, d_corr, d_out = "distance.json";
  int d_stride = 3;
  auto* ds = app.add_subcommand("distance", "Endpoint-path distance between two matched graphs");
  ds->add_option("--graph-a", d_a, "First graph file")->required();
  ds->add_option("--graph-b", d_b, "Second graph file")->required();
  ds->add_option("--corr", d_corr, "Correspondence written by match")->required();
  ds->add_option("--out", d_out, "Output name inside --out-dir")->capture_default_str();
  ds->add_option("--gamma", dp.gamma, "Weight of radius in path element costs")->capture_default_str();
  ds->add_option("--skip-cost", dp.skip_cost, "Skip penalty; negative picks one per path pair")
      ->capture_default_str();
  ds->add_option("--snap-radius", dp.snap_radius, "Unmatched endpoints borrow a matched vertex within this radius")
      ->capture_default_str();
  ds->add_option("--stride", d_stride, "Sample stride when a CSV correspondence is given")->capture_default_str();

  // pipeline
  RunConfig pl_cfg;
  std::string pl_in;
  auto* pl = app.add_subcommand("pipeline", "binarize -> skeletonize -> prune on one occupancy grid");
  pl->add_option("--input", pl_in, "Occupancy graymap")->required();
  ConfigFlags pl_flags(pl, pl_cfg);
  pl_flags.binarize();
  pl_flags.skeleton();
  pl_flags.prune();

  // make-world
  std::string mw_kind = "cave", mw_out = "world.pgm";
  auto* mw = app.add_subcommand("make-world", "Generate a ground-truth world (rooms, corridors or cave)");
  mw->add_option("--kind", mw_kind, "rooms, corridors or cave")->capture_default_str();
  mw->add_option("--output", mw_out, "World graymap name inside --out-dir")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    const auto used = app.get_subcommands();
    std::cerr << "error: " << e.what() << "\n\n" << (used.empty() ? app.help() : used.back()->help());
    return 2;
  }

  try {
    set_log_level(parse_log_level(g.log_level));

    if (*bin) {
      check(bin_cfg);
      const OccupancyGrid grid = load_grid(bin_in);
      const BinaryMap bm = binarize_grid(grid, bin_cfg);
      save_mask(output_path(g, bin_out), bm.mask, grid);
      if (g.svg) write_text(output_path(g, "binary.svg"), render_map_svg(mask_to_image(bm.mask)));
    } else if (*sk) {
      check(sk_cfg);
      const OccupancyGrid grid = load_grid(sk_in);
      const Mask mask = image_to_mask(grid.cells);
      const auto field = skeleton_of(mask, sk_cfg.skeleton);
      const TopoGraph graph = canonicalize(extract_graph(field.skeletal, field.dist));
      write_text(output_path(g, sk_graph), serialize(graph) + "\n");
      OccupancyGrid skel = grid;
      skel.cells = skeleton_image(field.skeletal);
      save_grid(output_path(g, sk_skel), skel);
      if (g.svg) {
        write_text(output_path(g, "skeleton.svg"),
                   render_map_svg(grid.cells, {&field.skeletal, &graph, nullptr}));
      }
    } else if (*pr) {
      check(pr_cfg);
      const OccupancyGrid grid = load_grid(pr_map);
      TopoGraph graph = read_graph(pr_graph);
      const TriState tri = classify_cells(grid);
      graph = label_frontiers(prune(std::move(graph), tri, pr_cfg.prune), tri, pr_cfg.frontier);
      write_text(output_path(g, pr_out), serialize(graph) + "\n");
      if (g.svg) write_text(output_path(g, "pruned.svg"), render_map_svg(grid.cells, {nullptr, &graph, nullptr}));
    } else if (*ex) {
      ex_flags.merge_file(ex_config);
      if (g.seed_opt->count() > 0 || ex_config.empty()) ex_cfg.seed = g.seed;
      check(ex_cfg);
      const World w = load_world(ex_world);
      const Point2d start = ex_start.empty() ? default_start(w) : parse_point(ex_start);
      const RunResult r = run_exploration(w, start, ex_cfg);
      fs::create_directories(g.out_dir);
      write_run_artifacts(g.out_dir, r);
      // Unpruned graph of the final map, the input for map matching.
      const BinaryMap bm = binarize(r.map, ex_cfg.binarize);
      const auto field = skeleton_of(bm.mask, ex_cfg.skeleton);
      const TopoGraph full = canonicalize(extract_graph(field.skeletal, field.dist));
      write_text(output_path(g, "final_skeleton_graph.json"), serialize(full) + "\n");
      const auto& last = r.steps.back();
      log_info("exploration " + std::string(r.done ? "finished" : "stopped") + " after " +
               std::to_string(last.step) + " steps with " + std::to_string(last.frontier_count) + " frontiers");
      if (!r.done) log_warn("exploration stopped at --max-steps before finishing");
      if (g.svg) {
        write_text(output_path(g, "exploration.svg"),
                   render_map_svg(r.map.cells, {&field.skeletal, &last.graph, &r.trajectory}));
      }
    } else if (*mt) {
      mp.metric = parse_metric(m_metric);
      if (m_features == "r") {
        mp.features = Features::Radius;
      } else if (m_features == "r,theta") {
        mp.features = Features::RadiusTheta;
      } else {
        throw ParameterError("--features must be r or r,theta");
      }
      if (mp.modes < 0) throw ParameterError("--modes must be >= 0");
      const TopoGraph a = read_graph(m_a), b = read_graph(m_b);
      const MatchResult r = match_graphs(a, b, mp);
      const fs::path out = output_path(g, m_out);
      if (out.extension() == ".csv") {
        write_text(out, correspondence_csv(r.correspondence));
      } else {
        write_text(out, correspondence_json(r.correspondence, mp.stride).dump(2) + "\n");
      }
      log_info("matched " + std::to_string(r.correspondence.pairs.size()) + " of " + std::to_string(r.a.size()) +
               " / " + std::to_string(r.b.size()) + " vertices");
      if (g.svg) {
        write_text(output_path(g, "correspondence.svg"),
                   render_correspondence_svg(r.a, r.b, r.correspondence));
      }
    } else if (*ds) {
      const TopoGraph a = read_graph(d_a), b = read_graph(d_b);
      int stride = d_stride;
      const Correspondence c = read_correspondence(d_corr, stride);
      const MedialGraph ma = medial_graph(a, stride), mb = medial_graph(b, stride);
      check_correspondence(c, ma, mb);
      const DistanceResult res = environment_distance(ma, mb, c, dp);
      json terms = json::array();
      for (const auto& t : res.terms) {
        terms.push_back({{"side", t.side == 0 ? "a" : "b"}, {"i", t.i}, {"j", t.j}, {"ti", t.ti}, {"tj", t.tj},
                         {"pd", t.pd}});
      }
      const json out = {{"d", res.d},
                        {"first_sum", res.first_sum},
                        {"second_sum", res.second_sum},
                        {"endpoints_a", res.n},
                        {"endpoints_b", res.m},
                        {"unmatched_a", res.unmatched_a},
                        {"unmatched_b", res.unmatched_b},
                        {"dropped_pairs", res.dropped_pairs},
                        {"pairs", terms}};
      write_text(output_path(g, d_out), out.dump(2) + "\n");
      log_info("d = " + format_double(res.d));
    } else if (*pl) {
      check(pl_cfg);
      const OccupancyGrid grid = load_grid(pl_in);
      const BinaryMap bm = binarize_grid(grid, pl_cfg);
      save_mask(output_path(g, "binary.pgm"), bm.mask, grid);
      const auto field = skeleton_of(bm.mask, pl_cfg.skeleton);
      OccupancyGrid skel = grid;
      skel.cells = skeleton_image(field.skeletal);
      save_grid(output_path(g, "skeleton.pgm"), skel);
      const TriState tri = classify_cells(grid);
      const TopoGraph raw = canonicalize(extract_graph(field.skeletal, field.dist));
      write_text(output_path(g, "skeleton_graph.json"), serialize(raw) + "\n");
      const TopoGraph graph = label_frontiers(prune(raw, tri, pl_cfg.prune), tri, pl_cfg.frontier);
      write_text(output_path(g, "graph.json"), serialize(graph) + "\n");
      write_text(output_path(g, "pipeline.svg"), render_map_svg(grid.cells, {&field.skeletal, &graph, nullptr}));
    } else if (*mw) {
      const World w = make_world(parse_world_kind(mw_kind), g.seed);
      OccupancyGrid grid;
      grid.cells = mask_to_image(w.truth);
      grid.resolution = w.resolution;
      const fs::path out = output_path(g, mw_out);
      save_grid(out, grid);
      const Point2d s1 = default_start(w), s2 = alternate_start(w, s1, 40.0);
      std::ostringstream starts;
      starts << "start_x: " << format_double(s1.x()) << "\nstart_y: " << format_double(s1.y())
             << "\nalternate_x: " << format_double(s2.x()) << "\nalternate_y: " << format_double(s2.y()) << "\n";
      write_text(fs::path(out).replace_extension(".start"), starts.str());
      if (g.svg) write_text(output_path(g, "world.svg"), render_map_svg(grid.cells));
    }
  } catch (const UnreachableFrontierError& e) {
    std::cerr << "error: " << e.what();
    if (e.step() >= 0) std::cerr << " (step " << e.step() << ")";
    std::cerr << '\n';
    return 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const InvariantError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
