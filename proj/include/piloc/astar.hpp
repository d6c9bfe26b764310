#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "piloc/grid_map.hpp"

namespace piloc {

using Traversable = std::function<bool(Position)>;

// Shortest 4-connected path from start to goal inclusive of both endpoints,
// or nullopt when the goal is unreachable. Manhattan heuristic; the open set
// is ordered by smaller f, then larger g, then row-major position.
std::optional<std::vector<Position>> astar(int width, int height, const Traversable& passable,
                                           Position start, Position goal);

}  // namespace piloc
