#include "piloc/perception.hpp"

#include <algorithm>
#include <stdexcept>

namespace piloc {

KnowledgeMaps::KnowledgeMaps(int width, int height)
    : width_(width),
      height_(height),
      obstacle_(static_cast<std::size_t>(width) * height, Knowledge::Unknown),
      marks_(static_cast<std::size_t>(width) * height, -1.0) {}

bool KnowledgeMaps::record(Position p, Cell truth) {
  const std::size_t i = index(p);
  const Knowledge k = truth == Cell::Free ? Knowledge::Free : Knowledge::Obstacle;
  const bool fresh = obstacle_[i] == Knowledge::Unknown;
  if (!fresh && obstacle_[i] != k) {
    throw std::logic_error("knowledge conflict: cell recorded as both obstacle and free");
  }
  obstacle_[i] = k;
  marks_[i] = 0.0;
  return fresh;
}

void KnowledgeMaps::set_mark(Position p, double mark) {
  if (!known(p)) throw std::logic_error("time mark on an unknown cell");
  if (!(mark >= 0.0 && mark <= kMaxTimeMark)) {
    throw std::invalid_argument("time mark outside [0, 0.3]");
  }
  marks_[index(p)] = mark;
}

std::size_t KnowledgeMaps::unknown_count() const {
  return static_cast<std::size_t>(
      std::count(obstacle_.begin(), obstacle_.end(), Knowledge::Unknown));
}

void KnowledgeMaps::age_marks(double increment) {
  for (double& m : marks_) {
    if (m >= 0.0) m = std::min(kMaxTimeMark, m + increment);
  }
}

ObservationUpdate observe(const GridMap& map, KnowledgeMaps& maps, Position pos, int radius) {
  ObservationUpdate update;
  const int y0 = std::max(0, pos.y - radius);
  const int y1 = std::min(map.height() - 1, pos.y + radius);
  const int x0 = std::max(0, pos.x - radius);
  const int x1 = std::min(map.width() - 1, pos.x + radius);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const Position p{x, y};
      const Cell truth = map.at(p);
      if (truth == Cell::Free && maps.explored(p)) update.prior_marks.push_back(maps.mark(p));
      const bool fresh = maps.record(p, truth);
      if (fresh && truth == Cell::Free) ++update.new_free_cells;
    }
  }
  return update;
}

ObservationStack encode(const KnowledgeMaps& maps, Position pos,
                        const std::array<Position, 2>& history,
                        const PheromoneField& field, int pheromone_side,
                        bool include_pheromone) {
  ObservationStack stack;
  stack.height = maps.height();
  stack.width = maps.width();
  stack.pheromone_side = pheromone_side;
  stack.obstacle.resize(maps.size());
  stack.exploration.resize(maps.size());

  const auto obstacle = maps.obstacle_cells();
  const auto marks = maps.mark_cells();
  for (std::size_t i = 0; i < maps.size(); ++i) {
    switch (obstacle[i]) {
      case Knowledge::Unknown: stack.obstacle[i] = encoding::kUnknown; break;
      case Knowledge::Obstacle: stack.obstacle[i] = encoding::kObstacle; break;
      case Knowledge::Free: stack.obstacle[i] = encoding::kFree; break;
    }
    stack.exploration[i] = marks[i] < 0.0 ? encoding::kUnexplored : marks[i] / kMaxTimeMark;
  }

  // Oldest first so the most recent position wins on overlap.
  const std::array<std::pair<Position, double>, 3> trail = {{
      {history[1], encoding::kBeforePrevious},
      {history[0], encoding::kPrevious},
      {pos, encoding::kCurrent},
  }};
  for (const auto& [p, value] : trail) {
    if (!maps.in_bounds(p)) continue;
    stack.obstacle[maps.index(p)] = value;
    stack.exploration[maps.index(p)] = value;
  }

  stack.pheromone.assign(static_cast<std::size_t>(pheromone_side) * pheromone_side, 0.0);
  if (include_pheromone) {
    field.window_into(pos, pheromone_side, stack.pheromone);
    const double scale = 1.0 / field.params().p_max;
    for (double& v : stack.pheromone) v *= scale;
  }
  return stack;
}

}  // namespace piloc
