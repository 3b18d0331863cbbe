#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "topomap/cpd.hpp"
#include "topomap/topo_graph.hpp"

namespace topomap {

struct MedialVertex {
  double x = 0.0;
  double y = 0.0;
  double r = 0.0;
  double theta = 0.0;
  int node = -1;  // TopoGraph node id, -1 for polyline samples
  bool endpoint = false;

  Point2d position() const { return {x, y}; }
};

/// Skeleton points as a graph. The first vertices are the TopoGraph nodes in
/// id order; polyline samples follow, edge by edge.
struct MedialGraph {
  std::vector<MedialVertex> vertices;
  std::vector<std::pair<int, int>> edges;  // i < j, no duplicates

  int size() const { return static_cast<int>(vertices.size()); }
};

/// Keeps every `stride`-th interior polyline sample; consecutive kept samples
/// along an edge are linked.
MedialGraph medial_graph(const TopoGraph& g, int stride = 3);

enum class Features { Radius, RadiusTheta };

/// || (p_i, gamma F_i) - (p_j, gamma F_j) ||.
double feature_distance(const MedialVertex& a, const MedialVertex& b, double gamma,
                        Features features = Features::Radius);

enum class Metric { Inverse, Gaussian };

Metric parse_metric(const std::string& name);

/// w_ij = metric(dist(i, j)) on graph edges, zero elsewhere.
Eigen::MatrixXd weighted_adjacency(const MedialGraph& g, Metric metric, double sigma, double gamma,
                                   Features features = Features::Radius);

/// G^-1 (D - W) for diagonal node weights G.
Eigen::MatrixXd laplacian(const Eigen::MatrixXd& w, const Eigen::VectorXd& node_weights);

struct Spectrum {
  Eigen::VectorXd eigenvalues;  // all of them, ascending
  Eigen::VectorXd mode_values;  // eigenvalues of the m retained modes
  Eigen::MatrixXd modes;        // n x m, unit columns, skipping the first eigenvector

  int m() const { return static_cast<int>(modes.cols()); }
};

/// Eigen-decomposition of G^-1 (D - W) through the symmetric form
/// G^-1/2 (D - W) G^-1/2.
Spectrum spectrum(const Eigen::MatrixXd& w, const Eigen::VectorXd& node_weights, int m);

struct SpectralAlignment {
  std::vector<int> perm;   // mode k of the first spectrum pairs with mode perm[k] of the second
  std::vector<int> signs;  // +1 or -1 applied to that mode
  double cost = 0.0;
};

/// 1D earth mover's distance between 32-bin histograms of a and b, each over
/// its own value range; in [0, 1].
double histogram_emd(const Eigen::VectorXd& a, const Eigen::VectorXd& b, int bins = 32);

/// Optional cue for align_spectra: for each vertex of the first graph, the
/// spatially nearest vertex of the second after pre-alignment.
struct SpatialCue {
  std::vector<int> nearest;
  double weight = 0.5;
};

/// Pairs modes by minimizing, over an exact assignment,
///   alpha |l1_k - l2_l| / l_max + beta EMD(hist u1_k, hist s u2_l)
///   [+ weight (1 - corr(u1_k, s u2_l at the nearest vertices)) / 2],
/// with the sign s of each pair chosen to minimize the shape terms.
SpectralAlignment align_spectra(const Spectrum& s1, const Spectrum& s2, double alpha = 0.5, double beta = 0.5,
                                const SpatialCue* cue = nullptr);
/// Reorders and flips the modes of `s` as `a` prescribes.
Spectrum apply_alignment(const Spectrum& s, const SpectralAlignment& a);

struct Correspondence {
  struct Pair {
    int a = 0;
    int b = 0;
    double cost = 0.0;
  };
  std::vector<Pair> pairs;  // sorted by a
  std::vector<int> unmatched_a;
  std::vector<int> unmatched_b;

  /// Partner in b of vertex `a`, or -1.
  int partner_of_a(int a) const;
  int partner_of_b(int b) const;
};

/// CPD between two embeddings, then a one-to-one hard assignment taking the
/// highest posteriors first; posteriors below p_min stay unmatched.
Correspondence match_points(const Eigen::MatrixXd& ea, const Eigen::MatrixXd& eb, const CpdParams& cpd,
                            double p_min, Eigen::MatrixXd* moved = nullptr);

/// Rigid motion taking b's points into a's frame.
struct RigidAlignment {
  Eigen::Matrix2d rotation = Eigen::Matrix2d::Identity();
  Point2d translation = Point2d::Zero();

  Point2d apply(const Point2d& p) const { return rotation * p + translation; }
};

/// Candidates are the identity and centroid plus principal axes under the
/// four axis-preserving rotations; the one with the smallest symmetric
/// chamfer distance wins.
RigidAlignment prealign(const std::vector<Point2d>& a, const std::vector<Point2d>& b);

struct MatchParams {
  Metric metric = Metric::Inverse;
  double sigma = 3.0;  // gaussian metric width, cells
  double gamma = 1.0;
  Features features = Features::Radius;
  bool radius_node_weights = false;
  int modes = 6;
  double alpha = 0.5;
  double beta = 0.5;
  double spatial_weight = 0.5;  // 0 leaves mode alignment to spectra alone
  int stride = 3;
  double p_min = 0.05;
  CpdParams cpd;
};

struct MatchResult {
  MedialGraph a;
  MedialGraph b;
  Spectrum spectrum_a;
  Spectrum spectrum_b;  // aligned to spectrum_a
  SpectralAlignment alignment;
  RigidAlignment rigid;
  Eigen::MatrixXd embedding_a;
  Eigen::MatrixXd embedding_b;
  Correspondence correspondence;
};

MatchResult match_graphs(const TopoGraph& a, const TopoGraph& b, const MatchParams& params = {});

/// Spatial (pre-aligned, scaled by a's RMS radius) plus spectral coordinates,
/// the k-th mode scaled by sqrt(n) / k.
Eigen::MatrixXd embed(const MedialGraph& g, const Spectrum& s, const RigidAlignment& rigid, const Point2d& center,
                      double scale, double gamma, Features features);

}  // namespace topomap
