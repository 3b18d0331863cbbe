#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "topomap/binarize.hpp"
#include "topomap/errors.hpp"
#include "topomap/raster.hpp"
#include "topomap/topo_graph.hpp"

namespace topomap {

/// Dense medial computation over one binary map.
template <typename Scalar>
struct SkeletonField {
  Raster<Scalar> dist;         // Euclidean distance to nearest background cell
  VectorRaster<Scalar> grad;   // unit gradient of dist
  Raster<Scalar> aof;          // average outward flux, foreground only
  Mask skeletal;
};

using SkeletonFieldd = SkeletonField<double>;

struct SkeletonParams {
  double eps = 1.5;
  int n_samples = 60;
  double tau = 0.25;
  int min_branch_area = 0;  // cells; 0 keeps every branch
};

/// Exact Euclidean distance transform (in cells) to the nearest background
/// cell; cells outside the raster do not count as background.
///
/// Rows are first reduced to 1D distances, then each column takes the lower
/// envelope of the resulting parabolas. All arithmetic on squared distances is
/// integral, so the result equals a brute-force scan bit for bit.
template <typename Scalar = double>
Raster<Scalar> distance_transform(const Mask& mask) {
  const Eigen::Index rows = mask.rows(), cols = mask.cols();
  const bool any_fg = (mask != 0).any();
  const bool any_bg = (mask == 0).any();
  if (!any_fg) throw EmptyShapeError("distance transform: no foreground cells");
  if (!any_bg) throw EmptyShapeError("distance transform: no background cells");

  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
  Raster<std::int64_t> row_sq(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y) {
    std::int64_t last = -1;
    std::vector<std::int64_t> left(cols, -1);
    for (Eigen::Index x = 0; x < cols; ++x) {
      if (mask(y, x) == 0) last = x;
      left[x] = last;
    }
    last = -1;
    for (Eigen::Index x = cols - 1; x >= 0; --x) {
      if (mask(y, x) == 0) last = x;
      std::int64_t best = kInf;
      if (left[x] >= 0) best = x - left[x];
      if (last >= 0) best = std::min<std::int64_t>(best, last - x);
      row_sq(y, x) = best == kInf ? kInf : best * best;
    }
  }

  Raster<Scalar> out(rows, cols);
  std::vector<std::int64_t> v(rows);
  std::vector<double> z(rows + 1);
  for (Eigen::Index x = 0; x < cols; ++x) {
    int k = -1;
    for (Eigen::Index q = 0; q < rows; ++q) {
      const std::int64_t fq = row_sq(q, x);
      if (fq == kInf) continue;
      double s = 0.0;
      while (k >= 0) {
        const std::int64_t p = v[k];
        s = static_cast<double>((fq + q * q) - (row_sq(p, x) + p * p)) / static_cast<double>(2 * (q - p));
        if (s > z[k]) break;
        --k;
      }
      ++k;
      v[k] = q;
      z[k] = k == 0 ? -std::numeric_limits<double>::infinity() : s;
      z[k + 1] = std::numeric_limits<double>::infinity();
    }
    int j = 0;
    for (Eigen::Index q = 0; q < rows; ++q) {
      while (z[j + 1] < static_cast<double>(q)) ++j;
      const std::int64_t dy = q - v[j];
      out(q, x) = std::sqrt(static_cast<Scalar>(dy * dy + row_sq(v[j], x)));
    }
  }
  return out;
}

/// Unit gradient of the distance function. Central differences, falling back
/// to one-sided differences next to background or the raster edge; zero where
/// the raw gradient vanishes and on background cells.
template <typename Scalar>
VectorRaster<Scalar> gradient_field(const Raster<Scalar>& dist) {
  const Eigen::Index rows = dist.rows(), cols = dist.cols();
  VectorRaster<Scalar> g(rows, cols);
  auto valid = [&](Eigen::Index x, Eigen::Index y) {
    return x >= 0 && y >= 0 && x < cols && y < rows && dist(y, x) > Scalar(0);
  };
  auto diff = [&](Eigen::Index x, Eigen::Index y, int dx, int dy) -> Scalar {
    const bool fwd = valid(x + dx, y + dy), bwd = valid(x - dx, y - dy);
    if (fwd && bwd) return (dist(y + dy, x + dx) - dist(y - dy, x - dx)) / Scalar(2);
    if (fwd) return dist(y + dy, x + dx) - dist(y, x);
    if (bwd) return dist(y, x) - dist(y - dy, x - dx);
    return Scalar(0);
  };
  for (Eigen::Index y = 0; y < rows; ++y) {
    for (Eigen::Index x = 0; x < cols; ++x) {
      if (dist(y, x) <= Scalar(0)) continue;
      const Scalar gx = diff(x, y, 1, 0), gy = diff(x, y, 0, 1);
      const Scalar n = std::hypot(gx, gy);
      if (n > Scalar(1e-9)) {
        g.x(y, x) = gx / n;
        g.y(y, x) = gy / n;
      }
    }
  }
  return g;
}

/// Bilinear sample of a vector raster at continuous cell coordinates; cells
/// outside the raster contribute zero.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> sample_bilinear(const VectorRaster<Scalar>& f, Scalar px, Scalar py) {
  const Eigen::Index x0 = static_cast<Eigen::Index>(std::floor(px));
  const Eigen::Index y0 = static_cast<Eigen::Index>(std::floor(py));
  const Scalar fx = px - Scalar(x0), fy = py - Scalar(y0);
  Eigen::Matrix<Scalar, 2, 1> acc = Eigen::Matrix<Scalar, 2, 1>::Zero();
  for (int dy = 0; dy <= 1; ++dy) {
    for (int dx = 0; dx <= 1; ++dx) {
      const Eigen::Index x = x0 + dx, y = y0 + dy;
      if (x < 0 || y < 0 || x >= f.cols() || y >= f.rows()) continue;
      const Scalar w = (dx ? fx : 1 - fx) * (dy ? fy : 1 - fy);
      acc.x() += w * f.x(y, x);
      acc.y() += w * f.y(y, x);
    }
  }
  return acc;
}

/// Average outward flux of `grad` through a circle of radius `eps` around
/// each foreground cell of `mask`. Samples whose nearest cell is background
/// contribute zero.
template <typename Scalar>
Raster<Scalar> average_outward_flux(const VectorRaster<Scalar>& grad, const Mask& mask, Scalar eps,
                                    int n_samples) {
  if (eps < Scalar(1)) throw ParameterError("flux radius must be >= 1 cell");
  if (n_samples < 8) throw ParameterError("flux needs at least 8 samples");
  const Eigen::Index rows = mask.rows(), cols = mask.cols();
  std::vector<Scalar> cs(n_samples), sn(n_samples);
  for (int k = 0; k < n_samples; ++k) {
    const Scalar phi = Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(k) / Scalar(n_samples);
    cs[k] = std::cos(phi);
    sn[k] = std::sin(phi);
  }
  Raster<Scalar> aof = Raster<Scalar>::Zero(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y) {
    for (Eigen::Index x = 0; x < cols; ++x) {
      if (mask(y, x) == 0) continue;
      Scalar sum = 0;
      for (int k = 0; k < n_samples; ++k) {
        const Scalar px = Scalar(x) + eps * cs[k], py = Scalar(y) + eps * sn[k];
        const auto nx = static_cast<Eigen::Index>(std::lround(px));
        const auto ny = static_cast<Eigen::Index>(std::lround(py));
        if (nx < 0 || ny < 0 || nx >= cols || ny >= rows || mask(ny, nx) == 0) continue;
        const auto q = sample_bilinear(grad, px, py);
        sum += q.x() * cs[k] + q.y() * sn[k];
      }
      aof(y, x) = sum / Scalar(n_samples);
    }
  }
  return aof;
}

/// True when removing the center of a 3x3 neighborhood preserves topology
/// (8-connected foreground, 4-connected background). Bit k of `ring` is set
/// when kNeighbors8[k] is foreground.
bool is_simple_configuration(unsigned ring);

/// Homotopy-preserving thinning driven by flux. Foreground cells are peeled
/// in order of decreasing flux (ties by raster index) while they are simple;
/// a curve end is kept once its flux is below -tau. Components without any
/// cell below -tau are dropped. The result is unit width.
Mask detect_skeleton(const Rasterd& aof, const Mask& mask, double tau);

/// Repeatedly removes the curve-end tail (end cell up to the first junction,
/// or up to the widest cell of a junction-free arc) whose medial disks cover
/// fewer than `min_area` shape cells that no other skeletal disk, grown by
/// one cell, covers.
/// Only tails are removed, so topology is unchanged.
Mask prune_ligatures(Mask skeletal, const Rasterd& dist, const Mask& shape, int min_area);

/// Object angle per polyline vertex from the rate of change of radius along
/// arc length: theta = acos(|dr/ds|).
std::vector<double> object_angle(const std::vector<Point2d>& polyline, const std::vector<double>& r);

/// Branch/endpoint graph of a unit-width skeleton with (x, y, r, theta) on
/// every node and polyline vertex.
TopoGraph extract_graph(const Mask& skeletal, const Rasterd& dist);

/// distance -> gradient -> flux -> thinning.
SkeletonFieldd compute_skeleton(const Mask& mask, const SkeletonParams& params = {});

}  // namespace topomap
