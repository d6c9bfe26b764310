#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "piloc/grid_map.hpp"

namespace piloc::testing {

inline GridMap open_map(int w, int h) {
  return GridMap(w, h, std::vector<Cell>(static_cast<std::size_t>(w) * h, Cell::Free));
}

inline std::shared_ptr<const GridMap> shared_open_map(int w, int h) {
  return std::make_shared<const GridMap>(open_map(w, h));
}

// Builds a map from rows of '#' and '.'.
inline GridMap map_from_rows(const std::vector<std::string>& rows) {
  std::string text = std::to_string(rows.front().size()) + " " + std::to_string(rows.size()) + "\n";
  for (const auto& r : rows) text += r + "\n";
  return load_map(text);
}

// Breadth-first distances over an arbitrary passability grid; -1 unreachable.
template <typename Pass>
std::vector<int> bfs_distances(int w, int h, Position start, Pass&& passable) {
  std::vector<int> dist(static_cast<std::size_t>(w) * h, -1);
  if (!passable(start)) return dist;
  std::deque<Position> queue{start};
  dist[static_cast<std::size_t>(start.y) * w + start.x] = 0;
  const int dx[] = {-1, 0, 1, 0};
  const int dy[] = {0, -1, 0, 1};
  while (!queue.empty()) {
    const Position p = queue.front();
    queue.pop_front();
    for (int k = 0; k < 4; ++k) {
      const Position q{p.x + dx[k], p.y + dy[k]};
      if (q.x < 0 || q.y < 0 || q.x >= w || q.y >= h || !passable(q)) continue;
      auto& d = dist[static_cast<std::size_t>(q.y) * w + q.x];
      if (d >= 0) continue;
      d = dist[static_cast<std::size_t>(p.y) * w + p.x] + 1;
      queue.push_back(q);
    }
  }
  return dist;
}

inline std::vector<int> bfs_on_map(const GridMap& m, Position start) {
  return bfs_distances(m.width(), m.height(), start, [&](Position p) { return m.is_free(p); });
}

}  // namespace piloc::testing
