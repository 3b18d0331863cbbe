#include "topomap/spectral_match.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <Eigen/Dense>

#include "topomap/assignment.hpp"
#include "topomap/errors.hpp"
#include "topomap/log.hpp"

namespace topomap {

MedialGraph medial_graph(const TopoGraph& g, int stride) {
  if (stride < 1) throw ParameterError("medial graph stride must be >= 1");
  MedialGraph out;
  for (const auto& n : g.nodes) {
    out.vertices.push_back({n.x, n.y, n.r, n.theta, n.id, n.kind == NodeKind::Endpoint});
  }
  std::set<std::pair<int, int>> links;
  auto link = [&](int i, int j) {
    if (i == j) return;
    links.insert({std::min(i, j), std::max(i, j)});
  };
  for (const auto& e : g.edges) {
    const int k = static_cast<int>(e.polyline.size()) - 1;
    int prev = e.u;
    for (int i = stride; i < k; i += stride) {
      const auto& s = e.polyline[i];
      out.vertices.push_back({s.x, s.y, s.r, s.theta, -1, false});
      const int id = out.size() - 1;
      link(prev, id);
      prev = id;
    }
    link(prev, e.v);
  }
  out.edges.assign(links.begin(), links.end());
  return out;
}

double feature_distance(const MedialVertex& a, const MedialVertex& b, double gamma, Features features) {
  const double dx = a.x - b.x, dy = a.y - b.y, dr = gamma * (a.r - b.r);
  double sq = dx * dx + dy * dy + dr * dr;
  if (features == Features::RadiusTheta) {
    const double dt = gamma * (a.theta - b.theta);
    sq += dt * dt;
  }
  return std::sqrt(sq);
}

Metric parse_metric(const std::string& name) {
  if (name == "inverse") return Metric::Inverse;
  if (name == "gaussian") return Metric::Gaussian;
  throw ParameterError("unknown metric '" + name + "' (expected inverse or gaussian)");
}

Eigen::MatrixXd weighted_adjacency(const MedialGraph& g, Metric metric, double sigma, double gamma,
                                   Features features) {
  if (metric == Metric::Gaussian && !(sigma > 0.0)) throw ParameterError("gaussian metric needs sigma > 0");
  const int n = g.size();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  bool clamped = false;
  for (const auto& [i, j] : g.edges) {
    double d = feature_distance(g.vertices[i], g.vertices[j], gamma, features);
    double v = 0.0;
    if (metric == Metric::Inverse) {
      if (d < 1e-6) {
        d = 1e-6;
        clamped = true;
      }
      v = 1.0 / d;
    } else {
      v = std::exp(-d * d / (2.0 * sigma * sigma));
    }
    w(i, j) = w(j, i) = v;
  }
  if (clamped) log_warn("inverse metric: coincident neighbors, distance clamped to 1e-6");
  return w;
}

Eigen::MatrixXd laplacian(const Eigen::MatrixXd& w, const Eigen::VectorXd& node_weights) {
  if (node_weights.size() != w.rows()) throw ParameterError("node weight count does not match the graph");
  if ((node_weights.array() <= 0.0).any()) throw ParameterError("node weights must be positive");
  Eigen::MatrixXd l = -w;
  l.diagonal() += w.rowwise().sum();
  return node_weights.cwiseInverse().asDiagonal() * l;
}

Spectrum spectrum(const Eigen::MatrixXd& w, const Eigen::VectorXd& node_weights, int m) {
  const int n = static_cast<int>(w.rows());
  if (node_weights.size() != n) throw ParameterError("node weight count does not match the graph");
  if ((node_weights.array() <= 0.0).any()) throw ParameterError("node weights must be positive");
  m = std::clamp(m, 0, std::max(n - 1, 0));
  Spectrum s;
  if (n == 0) return s;
  const Eigen::VectorXd inv_sqrt = node_weights.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd l = -w;
  l.diagonal() += w.rowwise().sum();
  const Eigen::MatrixXd sym = inv_sqrt.asDiagonal() * l * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) throw InvariantError("eigen-decomposition failed");
  s.eigenvalues = solver.eigenvalues();
  s.mode_values = s.eigenvalues.segment(1, m);
  s.modes = inv_sqrt.asDiagonal() * solver.eigenvectors().middleCols(1, m);
  for (int k = 0; k < m; ++k) {
    const double norm = s.modes.col(k).norm();
    if (norm > 0.0) s.modes.col(k) /= norm;
  }
  return s;
}

double histogram_emd(const Eigen::VectorXd& a, const Eigen::VectorXd& b, int bins) {
  auto hist = [bins](const Eigen::VectorXd& v) {
    std::vector<double> h(bins, 0.0);
    if (v.size() == 0) return h;
    const double lo = v.minCoeff(), hi = v.maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      int k = bins / 2;
      if (hi > lo) k = std::min(bins - 1, static_cast<int>((v[i] - lo) / (hi - lo) * bins));
      h[k] += 1.0 / static_cast<double>(v.size());
    }
    return h;
  };
  const auto ha = hist(a), hb = hist(b);
  double ca = 0.0, cb = 0.0, emd = 0.0;
  for (int k = 0; k + 1 < bins; ++k) {
    ca += ha[k];
    cb += hb[k];
    emd += std::abs(ca - cb);
  }
  return emd / (bins - 1);
}

namespace {

double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd da = a.array() - a.mean(), db = b.array() - b.mean();
  const double den = da.norm() * db.norm();
  return den > 0.0 ? da.dot(db) / den : 0.0;
}

}  // namespace

SpectralAlignment align_spectra(const Spectrum& s1, const Spectrum& s2, double alpha, double beta,
                                const SpatialCue* cue) {
  const int m = s1.m();
  if (s2.m() != m) throw ParameterError("spectra differ in mode count");
  SpectralAlignment out;
  if (m == 0) return out;
  double lmax = std::max(s1.mode_values.cwiseAbs().maxCoeff(), s2.mode_values.cwiseAbs().maxCoeff());
  if (!(lmax > 0.0)) lmax = 1.0;
  Eigen::MatrixXd cost(m, m);
  Eigen::MatrixXi sign(m, m);
  for (int k = 0; k < m; ++k) {
    for (int l = 0; l < m; ++l) {
      double pos = beta * histogram_emd(s1.modes.col(k), s2.modes.col(l));
      double neg = beta * histogram_emd(s1.modes.col(k), -s2.modes.col(l));
      if (cue) {
        Eigen::VectorXd pulled(s1.modes.rows());
        for (Eigen::Index i = 0; i < pulled.size(); ++i) pulled[i] = s2.modes(cue->nearest[i], l);
        const double c = correlation(s1.modes.col(k), pulled);
        pos += cue->weight * (1.0 - c) / 2;
        neg += cue->weight * (1.0 + c) / 2;
      }
      sign(k, l) = pos <= neg ? 1 : -1;
      cost(k, l) = alpha * std::abs(s1.mode_values[k] - s2.mode_values[l]) / lmax + std::min(pos, neg);
    }
  }
  out.perm = min_cost_assignment(cost);
  for (int k = 0; k < m; ++k) {
    out.signs.push_back(sign(k, out.perm[k]));
    out.cost += cost(k, out.perm[k]);
  }
  return out;
}

Spectrum apply_alignment(const Spectrum& s, const SpectralAlignment& a) {
  Spectrum out = s;
  for (int k = 0; k < static_cast<int>(a.perm.size()); ++k) {
    out.modes.col(k) = a.signs[k] * s.modes.col(a.perm[k]);
    out.mode_values[k] = s.mode_values[a.perm[k]];
  }
  return out;
}

int Correspondence::partner_of_a(int a) const {
  for (const auto& p : pairs) {
    if (p.a == a) return p.b;
  }
  return -1;
}

int Correspondence::partner_of_b(int b) const {
  for (const auto& p : pairs) {
    if (p.b == b) return p.a;
  }
  return -1;
}

Correspondence match_points(const Eigen::MatrixXd& ea, const Eigen::MatrixXd& eb, const CpdParams& cpd,
                            double p_min, Eigen::MatrixXd* moved) {
  if (ea.rows() == 0 || eb.rows() == 0) throw ParameterError("cannot match an empty point set");
  const CpdResult r = coherent_point_drift(ea, eb, cpd);
  if (moved) *moved = r.transformed;
  const Eigen::MatrixXd& post = r.posterior;  // rows: b, cols: a
  struct Cand {
    double p;
    int a, b;
  };
  std::vector<Cand> cands;
  for (int a = 0; a < post.cols(); ++a) {
    for (int b = 0; b < post.rows(); ++b) {
      if (post(b, a) >= p_min) cands.push_back({post(b, a), a, b});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
    if (x.p != y.p) return x.p > y.p;
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  std::vector<int> of_a(ea.rows(), -1), of_b(eb.rows(), -1);
  for (const auto& c : cands) {
    if (of_a[c.a] >= 0 || of_b[c.b] >= 0) continue;
    of_a[c.a] = c.b;
    of_b[c.b] = c.a;
  }
  Correspondence out;
  for (int a = 0; a < static_cast<int>(of_a.size()); ++a) {
    if (of_a[a] < 0) {
      out.unmatched_a.push_back(a);
    } else {
      out.pairs.push_back({a, of_a[a], (ea.row(a) - r.transformed.row(of_a[a])).norm()});
    }
  }
  for (int b = 0; b < static_cast<int>(of_b.size()); ++b) {
    if (of_b[b] < 0) out.unmatched_b.push_back(b);
  }
  return out;
}

namespace {

Point2d centroid(const std::vector<Point2d>& pts) {
  Point2d c = Point2d::Zero();
  for (const auto& p : pts) c += p;
  return pts.empty() ? c : Point2d(c / static_cast<double>(pts.size()));
}

// Principal axes as columns, major first, forming a proper rotation.
Eigen::Matrix2d principal_axes(const std::vector<Point2d>& pts, const Point2d& c) {
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : pts) cov += (p - c) * (p - c).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  Eigen::Matrix2d v;
  v.col(0) = es.eigenvectors().col(1);
  v.col(1) = es.eigenvectors().col(0);
  if (v.determinant() < 0) v.col(1) = -v.col(1);
  return v;
}

double mean_nearest(const std::vector<Point2d>& from, const std::vector<Point2d>& to) {
  double sum = 0.0;
  for (const auto& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : to) best = std::min(best, (p - q).squaredNorm());
    sum += std::sqrt(best);
  }
  return from.empty() ? 0.0 : sum / static_cast<double>(from.size());
}

std::vector<Point2d> positions(const MedialGraph& g) {
  std::vector<Point2d> out;
  for (const auto& v : g.vertices) out.push_back(v.position());
  return out;
}

}  // namespace

RigidAlignment prealign(const std::vector<Point2d>& a, const std::vector<Point2d>& b) {
  RigidAlignment best;
  if (a.empty() || b.empty()) return best;
  auto chamfer = [&](const RigidAlignment& t) {
    std::vector<Point2d> moved;
    for (const auto& p : b) moved.push_back(t.apply(p));
    return mean_nearest(a, moved) + mean_nearest(moved, a);
  };
  // The frames as given come first, so they win ties with the PCA candidates.
  double best_cost = chamfer(best);
  const Point2d ca = centroid(a), cb = centroid(b);
  const Eigen::Matrix2d va = principal_axes(a, ca), vb = principal_axes(b, cb);
  for (int k = 0; k < 4; ++k) {
    const double phi = k * std::numbers::pi / 2;
    Eigen::Matrix2d rot;
    rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    RigidAlignment cand;
    cand.rotation = va * rot * vb.transpose();
    cand.translation = ca - cand.rotation * cb;
    const double cost = chamfer(cand);
    if (cost < best_cost) {
      best_cost = cost;
      best = cand;
    }
  }
  return best;
}

Eigen::MatrixXd embed(const MedialGraph& g, const Spectrum& s, const RigidAlignment& rigid, const Point2d& center,
                      double scale, double gamma, Features features) {
  const int n = g.size();
  const int extra = features == Features::RadiusTheta ? 2 : 1;
  const int m = s.m();
  Eigen::MatrixXd e(n, 2 + extra + m);
  const double root_n = std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) {
    const auto& v = g.vertices[i];
    const Point2d p = (rigid.apply(v.position()) - center) / scale;
    e(i, 0) = p.x();
    e(i, 1) = p.y();
    e(i, 2) = gamma * v.r / scale;
    if (extra == 2) e(i, 3) = gamma * v.theta;
    for (int k = 0; k < m; ++k) e(i, 2 + extra + k) = root_n * s.modes(i, k) / (k + 1);
  }
  return e;
}

MatchResult match_graphs(const TopoGraph& a, const TopoGraph& b, const MatchParams& params) {
  MatchResult r;
  r.a = medial_graph(a, params.stride);
  r.b = medial_graph(b, params.stride);
  if (r.a.size() == 0 || r.b.size() == 0) throw ParameterError("cannot match an empty graph");
  auto node_weights = [&](const MedialGraph& g) {
    Eigen::VectorXd w = Eigen::VectorXd::Ones(g.size());
    if (params.radius_node_weights) {
      for (int i = 0; i < g.size(); ++i) w[i] = std::max(g.vertices[i].r, 1e-6);
    }
    return w;
  };
  const int m = std::max(0, std::min({params.modes, r.a.size() - 1, r.b.size() - 1}));
  r.spectrum_a = spectrum(weighted_adjacency(r.a, params.metric, params.sigma, params.gamma, params.features),
                          node_weights(r.a), m);
  const Spectrum sb = spectrum(weighted_adjacency(r.b, params.metric, params.sigma, params.gamma, params.features),
                               node_weights(r.b), m);
  const auto pa = positions(r.a), pb = positions(r.b);
  r.rigid = prealign(pa, pb);
  SpatialCue cue;
  cue.weight = params.spatial_weight;
  for (const auto& p : pa) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < static_cast<int>(pb.size()); ++j) {
      const double d = (r.rigid.apply(pb[j]) - p).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    cue.nearest.push_back(best);
  }
  r.alignment = align_spectra(r.spectrum_a, sb, params.alpha, params.beta,
                              params.spatial_weight > 0.0 ? &cue : nullptr);
  r.spectrum_b = apply_alignment(sb, r.alignment);

  const Point2d center = centroid(pa);
  double scale = 0.0;
  for (const auto& p : pa) scale += (p - center).squaredNorm();
  scale = std::sqrt(scale / static_cast<double>(pa.size()));
  if (!(scale > 1e-9)) scale = 1.0;
  r.embedding_a = embed(r.a, r.spectrum_a, RigidAlignment{}, center, scale, params.gamma, params.features);
  r.embedding_b = embed(r.b, r.spectrum_b, r.rigid, center, scale, params.gamma, params.features);
  r.correspondence = match_points(r.embedding_a, r.embedding_b, params.cpd, params.p_min);
  for (auto& p : r.correspondence.pairs) {
    MedialVertex vb = r.b.vertices[p.b];
    const Point2d moved = r.rigid.apply(vb.position());
    vb.x = moved.x();
    vb.y = moved.y();
    p.cost = feature_distance(r.a.vertices[p.a], vb, params.gamma, params.features);
  }
  return r;
}

}  // namespace topomap
