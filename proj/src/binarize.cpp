#include "topomap/binarize.hpp"

#include <algorithm>
#include <deque>

namespace topomap {

double default_sigma(double resolution) {
  return std::max(1.0, std::round(0.6 / resolution / 20.0));
}

TriState classify_cells(const OccupancyGrid& g) {
  TriState tri(g.height(), g.width());
  for (Eigen::Index i = 0; i < g.cells.size(); ++i) {
    const auto v = g.cells.data()[i];
    const double occ = (255.0 - v) / 255.0;
    CellClass c = CellClass::Background;
    if (v == kUnknownValue) {
      c = CellClass::Background;
    } else if (occ > g.occupied_thresh) {
      c = CellClass::Obstacle;
    } else if (occ < g.free_thresh) {
      c = CellClass::Free;
    }
    tri.data()[i] = static_cast<std::uint8_t>(c);
  }
  return tri;
}

Mask blur_and_threshold(const TriState& tri, double sigma, double thresh) {
  if (!(thresh > 0.0 && thresh < 1.0)) throw ParameterError("threshold must lie in (0, 1)");
  if (sigma < 0.0) throw ParameterError("sigma must be >= 0");
  const Rasterd free = (tri == static_cast<std::uint8_t>(CellClass::Free)).cast<double>();
  const Rasterd blurred = gaussian_blur(free, sigma);
  return (blurred > thresh).cast<std::uint8_t>();
}

Components label_components(const Mask& mask, std::uint8_t value, int connectivity) {
  Components out;
  out.labels = Raster<int>::Constant(mask.rows(), mask.cols(), -1);
  std::deque<Cell> queue;
  const int w = static_cast<int>(mask.cols()), h = static_cast<int>(mask.rows());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask(y, x) != value || out.labels(y, x) >= 0) continue;
      const int label = static_cast<int>(out.areas.size());
      out.areas.push_back(0);
      out.touches_border.push_back(false);
      out.labels(y, x) = label;
      queue.emplace_back(x, y);
      while (!queue.empty()) {
        const Cell c = queue.front();
        queue.pop_front();
        ++out.areas[label];
        if (c.x() == 0 || c.y() == 0 || c.x() == w - 1 || c.y() == h - 1) out.touches_border[label] = true;
        for (int k = 0; k < 8; ++k) {
          if (connectivity == 4 && (k % 2) == 1) continue;
          const int nx = c.x() + kNeighbors8[k][0], ny = c.y() + kNeighbors8[k][1];
          if (!in_bounds(mask, nx, ny) || mask(ny, nx) != value || out.labels(ny, nx) >= 0) continue;
          out.labels(ny, nx) = label;
          queue.emplace_back(nx, ny);
        }
      }
    }
  }
  return out;
}

Mask filter_small_regions(const Mask& b, int min_area, int min_hole_area) {
  if (min_area < 0 || min_hole_area < 0) throw ParameterError("area limits must be >= 0");
  Mask out = (b != 0).cast<std::uint8_t>();
  if (min_area > 0) {
    const auto fg = label_components(out, 1, 8);
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      const int l = fg.labels.data()[i];
      if (l >= 0 && fg.areas[l] < min_area) out.data()[i] = 0;
    }
  }
  if (min_hole_area > 0) {
    const auto bg = label_components(out, 0, 4);
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      const int l = bg.labels.data()[i];
      if (l >= 0 && !bg.touches_border[l] && bg.areas[l] < min_hole_area) out.data()[i] = 1;
    }
  }
  return out;
}

BinaryMap binarize(const OccupancyGrid& g, const BinarizeParams& params) {
  const double sigma = params.sigma < 0.0 ? default_sigma(g.resolution) : params.sigma;
  BinaryMap out;
  out.transform = WorldTransform::of(g);

  TriState tri = classify_cells(g);
  if (params.crop) {
    // Bounding box of sensed cells, padded so the blur support and a
    // background border both fit.
    int x0 = g.width(), y0 = g.height(), x1 = -1, y1 = -1;
    for (int y = 0; y < g.height(); ++y) {
      for (int x = 0; x < g.width(); ++x) {
        if (g.cells(y, x) == kUnknownValue) continue;
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x);
        y1 = std::max(y1, y);
      }
    }
    if (x1 >= 0) {
      const int margin = static_cast<int>(std::ceil(3 * sigma)) + 2;
      x0 = std::max(0, x0 - margin);
      y0 = std::max(0, y0 - margin);
      x1 = std::min(g.width() - 1, x1 + margin);
      y1 = std::min(g.height() - 1, y1 + margin);
      tri = TriState(tri.block(y0, x0, y1 - y0 + 1, x1 - x0 + 1));
      out.transform.crop_offset = Point2d(x0, y0);
    }
  }

  Mask m = blur_and_threshold(tri, sigma, params.thresh);
  if (m.rows() > 0 && m.cols() > 0) {
    m.row(0).setZero();
    m.row(m.rows() - 1).setZero();
    m.col(0).setZero();
    m.col(m.cols() - 1).setZero();
  }
  out.mask = filter_small_regions(m, params.min_area, params.min_hole_area);
  return out;
}

Raster<std::uint8_t> mask_to_image(const Mask& m) {
  return (m != 0).select(Raster<std::uint8_t>::Constant(m.rows(), m.cols(), 255),
                         Raster<std::uint8_t>::Zero(m.rows(), m.cols()));
}

Mask image_to_mask(const Raster<std::uint8_t>& image) { return (image >= 128).cast<std::uint8_t>(); }

}  // namespace topomap
