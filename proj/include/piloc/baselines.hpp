#pragma once

#include <vector>

#include "piloc/perception.hpp"
#include "piloc/rng.hpp"
#include "piloc/world.hpp"

namespace piloc {

// Known-free cells 4-adjacent to at least one Unknown cell, row-major.
std::vector<Position> frontier_cells(const KnowledgeMaps& maps);

// First step of an A* path to the nearest frontier (path distance over
// known-free cells, row-major ties). Without a frontier it heads for the
// stalest known cell; with nothing reachable it acts uniformly at random.
Action frontier_policy(const KnowledgeMaps& maps, Position pos, Rng& rng);

Action random_policy(Rng& rng);

}  // namespace piloc
