#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "topomap/errors.hpp"
#include "topomap/grid_io.hpp"
#include "topomap/raster.hpp"

namespace topomap {

enum class CellClass : std::uint8_t { Background = 0, Free = 1, Obstacle = 2 };

/// Per-cell CellClass values.
using TriState = Raster<std::uint8_t>;

/// Free-space mask (1 = foreground) with its georeference.
struct BinaryMap {
  Mask mask;
  WorldTransform transform;

  int width() const { return static_cast<int>(mask.cols()); }
  int height() const { return static_cast<int>(mask.rows()); }
};

struct BinarizeParams {
  double sigma = -1.0;  // < 0 selects default_sigma(resolution)
  double thresh = 0.5;
  int min_area = 50;
  int min_hole_area = 0;
  bool crop = false;
};

/// max(1, round(0.6 / resolution / 20)) cells.
double default_sigma(double resolution);

TriState classify_cells(const OccupancyGrid& g);

/// Normalized 1D Gaussian truncated at 3 sigma. sigma == 0 gives the unit impulse.
template <typename Scalar>
std::vector<Scalar> gaussian_kernel(Scalar sigma) {
  if (sigma <= Scalar(0)) return {Scalar(1)};
  const int radius = static_cast<int>(std::ceil(3 * sigma));
  std::vector<Scalar> k(2 * radius + 1);
  Scalar sum = 0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-Scalar(i * i) / (2 * sigma * sigma));
    sum += k[i + radius];
  }
  for (auto& v : k) v /= sum;
  return k;
}

/// Separable Gaussian blur; cells outside the raster count as zero.
template <typename Scalar>
Raster<Scalar> gaussian_blur(const Raster<Scalar>& in, Scalar sigma) {
  const auto k = gaussian_kernel(sigma);
  const int radius = static_cast<int>(k.size() / 2);
  const Eigen::Index rows = in.rows(), cols = in.cols();
  Raster<Scalar> tmp = Raster<Scalar>::Zero(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y) {
    for (Eigen::Index x = 0; x < cols; ++x) {
      Scalar acc = 0;
      for (int d = -radius; d <= radius; ++d) {
        const Eigen::Index xx = x + d;
        if (xx >= 0 && xx < cols) acc += k[d + radius] * in(y, xx);
      }
      tmp(y, x) = acc;
    }
  }
  Raster<Scalar> out = Raster<Scalar>::Zero(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y) {
    for (Eigen::Index x = 0; x < cols; ++x) {
      Scalar acc = 0;
      for (int d = -radius; d <= radius; ++d) {
        const Eigen::Index yy = y + d;
        if (yy >= 0 && yy < rows) acc += k[d + radius] * tmp(yy, x);
      }
      out(y, x) = acc;
    }
  }
  return out;
}

/// Blurs the free mask of `tri` and keeps cells whose value exceeds `thresh`.
Mask blur_and_threshold(const TriState& tri, double sigma, double thresh);

struct Components {
  Raster<int> labels;      // -1 where the mask does not match
  std::vector<int> areas;  // indexed by label
  std::vector<bool> touches_border;
};

/// Connected components of cells equal to `value` (connectivity 4 or 8).
Components label_components(const Mask& mask, std::uint8_t value, int connectivity);

/// Drops 8-connected foreground components with area < min_area and fills
/// 4-connected interior holes with area < min_hole_area.
Mask filter_small_regions(const Mask& b, int min_area, int min_hole_area = 0);

/// Full classify -> blur -> threshold -> filter pipeline.
BinaryMap binarize(const OccupancyGrid& g, const BinarizeParams& params = {});

/// Encodes a mask as a graymap: foreground 255, background 0.
Raster<std::uint8_t> mask_to_image(const Mask& m);
/// Foreground where the value is >= 128.
Mask image_to_mask(const Raster<std::uint8_t>& image);

}  // namespace topomap
