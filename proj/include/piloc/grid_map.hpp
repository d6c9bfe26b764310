#pragma once

#include <algorithm>
#include <compare>
#include <cstdlib>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace piloc {

// Grid coordinate: x is the column, y is the row. Ordering is row-major.
struct Position {
  int x = 0;
  int y = 0;

  friend bool operator==(const Position&, const Position&) = default;
  friend std::strong_ordering operator<=>(const Position& a, const Position& b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

inline int manhattan(Position a, Position b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

inline int chebyshev(Position a, Position b) {
  return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

enum class Cell : std::uint8_t { Obstacle, Free };

inline constexpr int kMinMapSide = 5;
inline constexpr double kMaxObstacleDensity = 0.45;

class MapError : public std::runtime_error {
 public:
  enum class Kind {
    BadHeader,
    TooSmall,
    RaggedRow,
    UnknownCharacter,
    RowCount,
    NoFreeCells,
    Disconnected,
    BadArgument,
  };

  MapError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Immutable rectangular occupancy grid whose free cells form one 4-connected
// component. Construction validates every invariant.
class GridMap {
 public:
  GridMap(int width, int height, std::vector<Cell> cells);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return cells_.size(); }
  std::span<const Cell> cells() const { return cells_; }

  bool in_bounds(Position p) const {
    return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_;
  }
  std::size_t index(Position p) const {
    return static_cast<std::size_t>(p.y) * width_ + p.x;
  }
  Position position(std::size_t index) const {
    return {static_cast<int>(index % width_), static_cast<int>(index / width_)};
  }

  // Out-of-bounds queries answer false.
  bool is_free(Position p) const {
    return in_bounds(p) && cells_[index(p)] == Cell::Free;
  }
  Cell at(Position p) const { return cells_[index(p)]; }

  // In-bounds free cells among the von Neumann neighbours, in action order
  // (left, up, right, down).
  std::vector<Position> neighbors4(Position p) const;

  std::vector<Position> free_cells() const;
  std::size_t free_count() const { return free_count_; }
  double obstacle_fraction() const {
    return 1.0 - static_cast<double>(free_count_) / static_cast<double>(size());
  }

  friend bool operator==(const GridMap&, const GridMap&) = default;

 private:
  int width_;
  int height_;
  std::vector<Cell> cells_;
  std::size_t free_count_ = 0;
};

// Seeded random obstacle placement followed by connectivity repair.
GridMap generate_map(int width, int height, double obstacle_density,
                     std::uint64_t seed);

// Text format: "W H\n" then H rows of W characters ('#' obstacle, '.' free),
// each terminated by '\n'.
GridMap load_map(std::string_view text);
std::string save_map(const GridMap& map);

GridMap read_map_file(const std::filesystem::path& path);
void write_map_file(const std::filesystem::path& path, const GridMap& map);

// All `*.map` files in a directory, sorted by file name.
std::vector<std::filesystem::path> list_map_files(
    const std::filesystem::path& dir);
std::vector<GridMap> read_map_dir(const std::filesystem::path& dir);

}  // namespace piloc
