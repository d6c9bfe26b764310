#pragma once

#include <span>
#include <vector>

#include "piloc/grid_map.hpp"
#include "piloc/perception.hpp"

namespace piloc {

// Connected components of the "Euclidean distance <= range" graph, each
// sorted ascending, ordered by smallest member. Singletons included.
std::vector<std::vector<int>> comm_groups(std::span<const Position> positions, double range);

// Union of M_o and element-wise minimum of M_e time marks, written back to
// every member. Members end with identical maps.
void merge_group(std::span<KnowledgeMaps* const> members);

// Merges `src` into `dst` (union / min-mark). Throws std::logic_error on an
// obstacle/free conflict.
void merge_into(KnowledgeMaps& dst, const KnowledgeMaps& src);

// Runs one communication round over all agents and returns the groups.
// With `transitive` false each agent merges only with agents directly in
// range, using the pre-round snapshot of their maps.
std::vector<std::vector<int>> communicate(std::span<KnowledgeMaps* const> maps,
                                          std::span<const Position> positions,
                                          double range, bool transitive = true);

}  // namespace piloc
