#pragma once

#include <cstdint>
#include <string>

#include "topomap/sim_world.hpp"

namespace topomap {

enum class WorldKind { Rooms, Corridors, Cave };

WorldKind parse_world_kind(const std::string& name);
const char* world_kind_name(WorldKind kind);

/// Procedural ground-truth world. Free space is one 4-connected region
/// surrounded by obstacle, with interior obstacles forming holes:
///  - rooms: a grid of rooms with one door per shared wall,
///  - corridors: a rectangular hall around a grid of solid blocks,
///  - cave: a lobed outline with 1 to 3 lobed pillars.
/// Deterministic in `seed`.
World make_world(WorldKind kind, std::uint64_t seed);

/// Free cell farthest from any obstacle (first in raster order on ties).
Point2d default_start(const World& w);

/// Farthest-from-obstacle free cell among those at least `min_separation`
/// cells from `other`.
Point2d alternate_start(const World& w, const Point2d& other, double min_separation);

/// Free 8-components and the 4-connected obstacle regions they enclose.
std::pair<int, int> free_space_topology(const Mask& free);

}  // namespace topomap
