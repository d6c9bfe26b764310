#include "piloc/astar.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <tuple>

namespace piloc {

std::optional<std::vector<Position>> astar(int width, int height, const Traversable& passable,
                                           Position start, Position goal) {
  auto inside = [&](Position p) { return p.x >= 0 && p.y >= 0 && p.x < width && p.y < height; };
  if (!inside(start) || !inside(goal) || !passable(goal)) return std::nullopt;
  if (start == goal) return std::vector<Position>{start};

  const auto idx = [width](Position p) { return static_cast<std::size_t>(p.y) * width + p.x; };
  constexpr int kInf = std::numeric_limits<int>::max();
  std::vector<int> g(static_cast<std::size_t>(width) * height, kInf);
  std::vector<Position> parent(g.size());
  std::vector<bool> closed(g.size(), false);

  // (f, -g, row-major index): std::greater pops the smallest tuple.
  using Entry = std::tuple<int, int, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  g[idx(start)] = 0;
  open.emplace(manhattan(start, goal), 0, idx(start));

  constexpr int kDx[4] = {-1, 0, 1, 0};
  constexpr int kDy[4] = {0, -1, 0, 1};
  while (!open.empty()) {
    const auto [f, neg_g, ci] = open.top();
    open.pop();
    if (closed[ci]) continue;
    closed[ci] = true;
    const Position cur{static_cast<int>(ci % width), static_cast<int>(ci / width)};
    if (cur == goal) {
      std::vector<Position> path{cur};
      while (path.back() != start) path.push_back(parent[idx(path.back())]);
      std::reverse(path.begin(), path.end());
      return path;
    }
    const int gc = -neg_g;
    for (int d = 0; d < 4; ++d) {
      const Position n{cur.x + kDx[d], cur.y + kDy[d]};
      if (!inside(n) || !passable(n)) continue;
      const std::size_t ni = idx(n);
      if (closed[ni] || gc + 1 >= g[ni]) continue;
      g[ni] = gc + 1;
      parent[ni] = cur;
      open.emplace(gc + 1 + manhattan(n, goal), -(gc + 1), ni);
    }
  }
  return std::nullopt;
}

}  // namespace piloc
