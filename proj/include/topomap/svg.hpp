#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "topomap/raster.hpp"
#include "topomap/spectral_match.hpp"
#include "topomap/topo_graph.hpp"

namespace topomap {

/// Overlays for render_map_svg; null members are not drawn.
struct MapOverlay {
  const Mask* skeletal = nullptr;
  const TopoGraph* graph = nullptr;
  const std::vector<Point2d>* trajectory = nullptr;
};

/// Grayscale raster (0 black .. 255 white) with optional skeleton cells,
/// graph edges and nodes, and a trajectory. One raster cell is `scale` pixels.
std::string render_map_svg(const Raster<std::uint8_t>& image, const MapOverlay& overlay = {}, double scale = 4.0);

/// Two medial graphs side by side; matched vertices share a color, unmatched
/// ones are grey.
std::string render_correspondence_svg(const MedialGraph& a, const MedialGraph& b, const Correspondence& c,
                                      double scale = 4.0);

}  // namespace topomap
