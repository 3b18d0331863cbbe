#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "topomap/raster.hpp"

namespace topomap {

// Map-server cell conventions.
inline constexpr std::uint8_t kOccupiedValue = 0;
inline constexpr std::uint8_t kUnknownValue = 205;
inline constexpr std::uint8_t kFreeValue = 254;

inline constexpr double kDefaultResolution = 0.05;

/// Occupancy raster with georeferencing metadata. Cell (0,0) is the first
/// stored pixel; x grows along columns and y along rows.
struct OccupancyGrid {
  Raster<std::uint8_t> cells;
  double resolution = kDefaultResolution;  // meters per cell
  Point2d origin = Point2d::Zero();        // world coordinates of cell (0,0)
  double occupied_thresh = 0.65;
  double free_thresh = 0.196;

  int width() const { return static_cast<int>(cells.cols()); }
  int height() const { return static_cast<int>(cells.rows()); }

  static OccupancyGrid filled(int width, int height, std::uint8_t value,
                              double resolution = kDefaultResolution);
};

/// Cell <-> world mapping. world = (p + crop_offset) * scale + translation.
struct WorldTransform {
  double scale = 1.0;
  Point2d translation = Point2d::Zero();
  Point2d crop_offset = Point2d::Zero();

  static WorldTransform of(const OccupancyGrid& g) { return {g.resolution, g.origin, Point2d::Zero()}; }
};

Point2d pixel_to_world(const WorldTransform& t, const Point2d& p);
Point2d world_to_pixel(const WorldTransform& t, const Point2d& w);

/// Reads a P2/P5 graymap with maxval 255.
Raster<std::uint8_t> read_pgm(const std::filesystem::path& path);
Raster<std::uint8_t> parse_pgm(const std::vector<std::uint8_t>& bytes);

/// Writes a canonical binary (P5) graymap.
void write_pgm(const std::filesystem::path& path, const Raster<std::uint8_t>& image);
std::vector<std::uint8_t> encode_pgm(const Raster<std::uint8_t>& image);

/// Sidecar path for a graymap: `<name>.meta` next to it.
std::filesystem::path sidecar_path(const std::filesystem::path& pgm);

/// Loads a graymap plus its optional `.meta` sidecar.
OccupancyGrid load_grid(const std::filesystem::path& path);
void save_grid(const std::filesystem::path& path, const OccupancyGrid& grid);

/// Plain-text key:value files (sidecars, run configs).
struct KeyValueFile {
  std::vector<std::pair<std::string, std::string>> entries;

  const std::string* find(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
};

KeyValueFile parse_key_values(const std::string& text, const std::string& source);
KeyValueFile read_key_values(const std::filesystem::path& path);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace topomap
