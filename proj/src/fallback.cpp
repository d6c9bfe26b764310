#include "piloc/fallback.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "piloc/astar.hpp"

namespace piloc {
namespace {

constexpr int kDx[4] = {-1, 0, 1, 0};
constexpr int kDy[4] = {0, -1, 0, 1};

// BFS distances from `start` over cells accepted by `passable`; -1 = unreached.
template <typename Pred>
std::vector<int> bfs_distances(const KnowledgeMaps& maps, Position start, Pred passable) {
  std::vector<int> dist(maps.size(), -1);
  std::queue<Position> queue;
  dist[maps.index(start)] = 0;
  queue.push(start);
  while (!queue.empty()) {
    const Position cur = queue.front();
    queue.pop();
    const int dc = dist[maps.index(cur)];
    for (int d = 0; d < 4; ++d) {
      const Position n{cur.x + kDx[d], cur.y + kDy[d]};
      if (!maps.in_bounds(n) || !passable(n) || dist[maps.index(n)] >= 0) continue;
      dist[maps.index(n)] = dc + 1;
      queue.push(n);
    }
  }
  return dist;
}

Position cell_at(const KnowledgeMaps& maps, std::size_t i) {
  return {static_cast<int>(i % maps.width()), static_cast<int>(i / maps.width())};
}

}  // namespace

bool is_trapped(std::span<const Position> recent) {
  for (std::size_t i = 0; i < recent.size(); ++i) {
    const auto visits = std::count(recent.begin(), recent.end(), recent[i]);
    if (visits > kTrapVisitThreshold) return true;
  }
  return false;
}

bool optimistic_passable(const KnowledgeMaps& maps, Position p) {
  return maps.in_bounds(p) && maps.obstacle(p) != Knowledge::Obstacle;
}

std::optional<Position> stalest_known_cell(const KnowledgeMaps& maps, Position pos) {
  const auto dist = bfs_distances(maps, pos, [&](Position p) { return maps.known_free(p); });
  std::optional<std::size_t> best;
  const std::size_t self = maps.index(pos);
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (i == self || dist[i] < 0) continue;
    const Position p = cell_at(maps, i);
    if (!maps.known_free(p)) continue;
    if (!best) {
      best = i;
      continue;
    }
    const double m = maps.mark(p);
    const double bm = maps.mark(cell_at(maps, *best));
    if (m > bm || (m == bm && dist[i] < dist[*best])) best = i;
  }
  if (!best) return std::nullopt;
  return cell_at(maps, *best);
}

std::optional<Position> select_recovery_goal(const KnowledgeMaps& maps, Position pos) {
  const auto dist = bfs_distances(maps, pos, [&](Position p) { return optimistic_passable(maps, p); });
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (dist[i] < 0 || maps.obstacle_cells()[i] != Knowledge::Unknown) continue;
    if (!best || dist[i] < dist[*best]) best = i;
  }
  if (best) return cell_at(maps, *best);
  return stalest_known_cell(maps, pos);
}

std::optional<Action> FallbackController::decide(const AgentState& agent) {
  const bool trapped = is_trapped(agent.recent);
  if (engaged_) {
    if (agent.pos == goal_) {
      disengage();
      return std::nullopt;
    }
    untrapped_ticks_ = trapped ? 0 : untrapped_ticks_ + 1;
    if (untrapped_ticks_ >= kDisengageTicks) {
      disengage();
      return std::nullopt;
    }
  } else {
    if (!trapped) return std::nullopt;
    engaged_ = true;
    untrapped_ticks_ = 0;
    if (!plan(agent)) {
      disengage();
      return std::nullopt;
    }
  }

  auto here = std::find(path_.begin(), path_.end(), agent.pos);
  if (here == path_.end() || here + 1 == path_.end() || !path_valid(agent.knowledge)) {
    ++replans_;
    if (!plan(agent)) {
      disengage();
      return std::nullopt;
    }
    here = path_.begin();
  }
  return direction_to(*here, *(here + 1));
}

bool FallbackController::plan(const AgentState& agent) {
  const auto goal = select_recovery_goal(agent.knowledge, agent.pos);
  if (!goal) return false;
  const KnowledgeMaps& maps = agent.knowledge;
  auto path = astar(maps.width(), maps.height(),
                    [&](Position p) { return optimistic_passable(maps, p); }, agent.pos, *goal);
  if (!path || path->size() < 2) return false;
  goal_ = *goal;
  path_ = std::move(*path);
  return true;
}

bool FallbackController::path_valid(const KnowledgeMaps& maps) const {
  return std::all_of(path_.begin(), path_.end(),
                     [&](Position p) { return optimistic_passable(maps, p); });
}

void FallbackController::disengage() {
  engaged_ = false;
  path_.clear();
  untrapped_ticks_ = 0;
}

}  // namespace piloc
