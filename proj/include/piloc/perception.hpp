#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "piloc/grid_map.hpp"
#include "piloc/pheromone.hpp"

namespace piloc {

enum class Knowledge : std::uint8_t { Unknown, Obstacle, Free };

inline constexpr double kMaxTimeMark = 0.3;
inline constexpr double kTimeMarkIncrement = 0.003;

// Per-agent obstacle map M_o and exploration map M_e. A cell is explored in
// M_e exactly when it is known in M_o; its time mark lies in [0, 0.3].
class KnowledgeMaps {
 public:
  KnowledgeMaps(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return obstacle_.size(); }
  std::size_t index(Position p) const {
    return static_cast<std::size_t>(p.y) * width_ + p.x;
  }
  bool in_bounds(Position p) const {
    return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_;
  }

  Knowledge obstacle(Position p) const { return obstacle_[index(p)]; }
  bool known(Position p) const { return obstacle(p) != Knowledge::Unknown; }
  bool known_free(Position p) const { return in_bounds(p) && obstacle(p) == Knowledge::Free; }
  bool explored(Position p) const { return marks_[index(p)] >= 0.0; }
  // Time mark of an explored cell.
  double mark(Position p) const { return marks_[index(p)]; }

  // Records ground truth and resets the time mark. Returns true when the
  // cell was previously unknown. A conflicting value throws std::logic_error.
  bool record(Position p, Cell truth);
  // Direct mark write for tests and merges; cell must already be known.
  void set_mark(Position p, double mark);

  std::span<const Knowledge> obstacle_cells() const { return obstacle_; }
  std::span<const double> mark_cells() const { return marks_; }
  std::size_t unknown_count() const;

  void age_marks(double increment = kTimeMarkIncrement);

  friend bool operator==(const KnowledgeMaps&, const KnowledgeMaps&) = default;

 private:
  friend void merge_into(KnowledgeMaps& dst, const KnowledgeMaps& src);

  int width_;
  int height_;
  std::vector<Knowledge> obstacle_;
  std::vector<double> marks_;  // negative: unexplored
};

struct ObservationUpdate {
  int new_free_cells = 0;
  // Time marks of free cells in view that were already explored before this
  // observation refreshed them.
  std::vector<double> prior_marks;
};

// Writes the true status of every in-bounds cell within Chebyshev `radius`
// and resets its time mark to 0.
ObservationUpdate observe(const GridMap& map, KnowledgeMaps& maps, Position pos, int radius);

// v_m <- min(0.3, v_m + increment) on every explored cell.
inline void age_marks(KnowledgeMaps& maps, double increment = kTimeMarkIncrement) {
  maps.age_marks(increment);
}

// Network input. Channels are row-major; every value lies in [0, 1].
struct ObservationStack {
  int height = 0;
  int width = 0;
  int pheromone_side = 0;
  std::vector<double> obstacle;
  std::vector<double> exploration;
  std::vector<double> pheromone;

  friend bool operator==(const ObservationStack&, const ObservationStack&) = default;
};

namespace encoding {
inline constexpr double kUnknown = 0.5;
inline constexpr double kObstacle = 1.0;
inline constexpr double kFree = 0.0;
inline constexpr double kUnexplored = 1.0;
inline constexpr double kCurrent = 0.9;
inline constexpr double kPrevious = 0.8;
inline constexpr double kBeforePrevious = 0.7;
}  // namespace encoding

// history[0] is the position one tick ago, history[1] two ticks ago. When
// `include_pheromone` is false the pheromone channel is all zeros.
ObservationStack encode(const KnowledgeMaps& maps, Position pos,
                        const std::array<Position, 2>& history,
                        const PheromoneField& field, int pheromone_side,
                        bool include_pheromone = true);

}  // namespace piloc
