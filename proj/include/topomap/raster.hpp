#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Core>

namespace topomap {

/// Dense row-major raster indexed as (row = y, col = x).
template <typename Scalar>
using Raster = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Mask = Raster<std::uint8_t>;
using Rasterd = Raster<double>;

/// Integer cell coordinates (x = column, y = row).
using Cell = Eigen::Vector2i;
using Point2d = Eigen::Vector2d;

/// Two-component vector raster.
template <typename Scalar>
struct VectorRaster {
  Raster<Scalar> x;
  Raster<Scalar> y;

  VectorRaster() = default;
  VectorRaster(Eigen::Index rows, Eigen::Index cols)
      : x(Raster<Scalar>::Zero(rows, cols)), y(Raster<Scalar>::Zero(rows, cols)) {}

  Eigen::Index rows() const { return x.rows(); }
  Eigen::Index cols() const { return x.cols(); }
};

template <typename Derived>
inline bool in_bounds(const Eigen::DenseBase<Derived>& r, int x, int y) {
  return x >= 0 && y >= 0 && x < r.cols() && y < r.rows();
}

// 8-neighborhood in clockwise order starting east.
inline constexpr std::array<std::array<int, 2>, 8> kNeighbors8 = {
    {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};

inline constexpr std::array<std::array<int, 2>, 4> kNeighbors4 = {
    {{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

}  // namespace topomap
