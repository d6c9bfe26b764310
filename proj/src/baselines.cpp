#include "piloc/baselines.hpp"

#include <queue>

#include "piloc/astar.hpp"
#include "piloc/fallback.hpp"

namespace piloc {
namespace {

constexpr int kDx[4] = {-1, 0, 1, 0};
constexpr int kDy[4] = {0, -1, 0, 1};

bool is_frontier(const KnowledgeMaps& maps, Position p) {
  if (!maps.known_free(p)) return false;
  for (int d = 0; d < 4; ++d) {
    const Position n{p.x + kDx[d], p.y + kDy[d]};
    if (maps.in_bounds(n) && maps.obstacle(n) == Knowledge::Unknown) return true;
  }
  return false;
}

// Nearest frontier by BFS over known-free cells. The queue pops whole
// distance layers, so the row-major minimum within the first non-empty layer
// wins.
std::optional<Position> nearest_frontier(const KnowledgeMaps& maps, Position pos) {
  std::vector<bool> seen(maps.size(), false);
  std::vector<Position> layer{pos};
  seen[maps.index(pos)] = true;
  while (!layer.empty()) {
    std::optional<Position> best;
    std::vector<Position> next;
    for (const Position cur : layer) {
      if (cur != pos && is_frontier(maps, cur) && (!best || cur < *best)) best = cur;
      for (int d = 0; d < 4; ++d) {
        const Position n{cur.x + kDx[d], cur.y + kDy[d]};
        if (!maps.known_free(n) || seen[maps.index(n)]) continue;
        seen[maps.index(n)] = true;
        next.push_back(n);
      }
    }
    if (best) return best;
    layer = std::move(next);
  }
  return std::nullopt;
}

}  // namespace

std::vector<Position> frontier_cells(const KnowledgeMaps& maps) {
  std::vector<Position> out;
  for (int y = 0; y < maps.height(); ++y) {
    for (int x = 0; x < maps.width(); ++x) {
      if (is_frontier(maps, {x, y})) out.push_back({x, y});
    }
  }
  return out;
}

Action frontier_policy(const KnowledgeMaps& maps, Position pos, Rng& rng) {
  auto goal = nearest_frontier(maps, pos);
  if (!goal) goal = stalest_known_cell(maps, pos);
  if (goal) {
    const auto path = astar(maps.width(), maps.height(),
                            [&](Position p) { return maps.known_free(p); }, pos, *goal);
    if (path && path->size() >= 2) return direction_to((*path)[0], (*path)[1]);
  }
  return random_policy(rng);
}

Action random_policy(Rng& rng) {
  std::uniform_int_distribution<int> pick(0, kNumActions - 1);
  return static_cast<Action>(pick(rng));
}

}  // namespace piloc
