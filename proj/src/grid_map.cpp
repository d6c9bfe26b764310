#include "piloc/grid_map.hpp"

#include <deque>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "piloc/io.hpp"

namespace piloc {
namespace {

constexpr int kDx[4] = {-1, 0, 1, 0};
constexpr int kDy[4] = {0, -1, 0, 1};

// Labels 4-connected components of free cells; obstacle cells get -1.
// Returns the number of components.
int label_components(int width, int height, const std::vector<Cell>& cells,
                     std::vector<int>& labels) {
  labels.assign(cells.size(), -1);
  int count = 0;
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < cells.size(); ++seed) {
    if (cells[seed] != Cell::Free || labels[seed] >= 0) continue;
    labels[seed] = count;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      const int x = static_cast<int>(cur % width);
      const int y = static_cast<int>(cur / width);
      for (int d = 0; d < 4; ++d) {
        const int nx = x + kDx[d];
        const int ny = y + kDy[d];
        if (nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
        const std::size_t ni = static_cast<std::size_t>(ny) * width + nx;
        if (cells[ni] == Cell::Free && labels[ni] < 0) {
          labels[ni] = count;
          stack.push_back(ni);
        }
      }
    }
    ++count;
  }
  return count;
}

// Joins the component closest to the largest one by clearing the obstacles on
// a minimum-obstacle path between them (0-1 BFS). Returns false when already
// connected.
bool connect_one_component(int width, int height, std::vector<Cell>& cells) {
  std::vector<int> labels;
  const int count = label_components(width, height, cells, labels);
  if (count <= 1) return false;

  std::vector<std::size_t> sizes(count, 0);
  for (int l : labels)
    if (l >= 0) ++sizes[l];
  const int main_label = static_cast<int>(
      std::max_element(sizes.begin(), sizes.end()) - sizes.begin());

  constexpr int kInf = std::numeric_limits<int>::max();
  std::vector<int> dist(cells.size(), kInf);
  std::vector<std::size_t> parent(cells.size(), cells.size());
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (labels[i] == main_label) {
      dist[i] = 0;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    const int x = static_cast<int>(cur % width);
    const int y = static_cast<int>(cur / width);
    for (int d = 0; d < 4; ++d) {
      const int nx = x + kDx[d];
      const int ny = y + kDy[d];
      if (nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
      const std::size_t ni = static_cast<std::size_t>(ny) * width + nx;
      const int w = cells[ni] == Cell::Obstacle ? 1 : 0;
      if (dist[cur] + w < dist[ni]) {
        dist[ni] = dist[cur] + w;
        parent[ni] = cur;
        if (w == 0) {
          queue.push_front(ni);
        } else {
          queue.push_back(ni);
        }
      }
    }
  }

  // Nearest non-main free cell, row-major ties.
  std::size_t best = cells.size();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (labels[i] < 0 || labels[i] == main_label) continue;
    if (best == cells.size() || dist[i] < dist[best]) best = i;
  }
  for (std::size_t cur = best; cur < cells.size() && labels[cur] != main_label;
       cur = parent[cur]) {
    cells[cur] = Cell::Free;
  }
  return true;
}

}  // namespace

GridMap::GridMap(int width, int height, std::vector<Cell> cells)
    : width_(width), height_(height), cells_(std::move(cells)) {
  if (width < kMinMapSide || height < kMinMapSide) {
    throw MapError(MapError::Kind::TooSmall,
                   "map is " + std::to_string(width) + "x" + std::to_string(height) +
                       ", minimum is 5x5");
  }
  if (cells_.size() != static_cast<std::size_t>(width) * height) {
    throw MapError(MapError::Kind::BadArgument, "cell count does not match dimensions");
  }
  free_count_ = static_cast<std::size_t>(
      std::count(cells_.begin(), cells_.end(), Cell::Free));
  if (free_count_ == 0) {
    throw MapError(MapError::Kind::NoFreeCells, "map has no free cells");
  }
  std::vector<int> labels;
  if (label_components(width_, height_, cells_, labels) != 1) {
    throw MapError(MapError::Kind::Disconnected,
                   "free cells do not form a single 4-connected region");
  }
}

std::vector<Position> GridMap::neighbors4(Position p) const {
  std::vector<Position> out;
  out.reserve(4);
  for (int d = 0; d < 4; ++d) {
    const Position n{p.x + kDx[d], p.y + kDy[d]};
    if (is_free(n)) out.push_back(n);
  }
  return out;
}

std::vector<Position> GridMap::free_cells() const {
  std::vector<Position> out;
  out.reserve(free_count_);
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i] == Cell::Free) out.push_back(position(i));
  }
  return out;
}

GridMap generate_map(int width, int height, double obstacle_density,
                     std::uint64_t seed) {
  if (width < kMinMapSide || height < kMinMapSide) {
    throw MapError(MapError::Kind::TooSmall, "map dimensions must be at least 5x5");
  }
  if (!(obstacle_density >= 0.0) || obstacle_density > kMaxObstacleDensity) {
    throw MapError(MapError::Kind::BadArgument,
                   "obstacle density must lie in [0, 0.45]");
  }
  const std::size_t n = static_cast<std::size_t>(width) * height;
  const auto obstacles =
      static_cast<std::size_t>(std::llround(obstacle_density * static_cast<double>(n)));

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < obstacles; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  std::vector<Cell> cells(n, Cell::Free);
  for (std::size_t i = 0; i < obstacles; ++i) cells[order[i]] = Cell::Obstacle;

  while (connect_one_component(width, height, cells)) {
  }
  return GridMap(width, height, std::move(cells));
}

GridMap load_map(std::string_view text) {
  const std::size_t header_end = text.find('\n');
  if (header_end == std::string_view::npos) {
    throw MapError(MapError::Kind::BadHeader, "missing header line");
  }
  int width = 0;
  int height = 0;
  {
    std::istringstream header{std::string(text.substr(0, header_end))};
    std::string extra;
    if (!(header >> width >> height) || (header >> extra)) {
      throw MapError(MapError::Kind::BadHeader, "header must be \"W H\"");
    }
  }
  if (width < kMinMapSide || height < kMinMapSide) {
    throw MapError(MapError::Kind::TooSmall,
                   "map is " + std::to_string(width) + "x" + std::to_string(height) +
                       ", minimum is 5x5");
  }

  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(width) * height);
  std::size_t pos = header_end + 1;
  int rows = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view row = text.substr(pos, end - pos);
    if (rows == height) {
      throw MapError(MapError::Kind::RowCount, "more than " + std::to_string(height) + " rows");
    }
    if (row.size() != static_cast<std::size_t>(width)) {
      throw MapError(MapError::Kind::RaggedRow,
                     "row " + std::to_string(rows) + " has " + std::to_string(row.size()) +
                         " characters, expected " + std::to_string(width));
    }
    for (char c : row) {
      if (c == '#') {
        cells.push_back(Cell::Obstacle);
      } else if (c == '.') {
        cells.push_back(Cell::Free);
      } else {
        throw MapError(MapError::Kind::UnknownCharacter,
                       std::string("unknown map character '") + c + "' in row " +
                           std::to_string(rows));
      }
    }
    ++rows;
    pos = end + 1;
  }
  if (rows != height) {
    throw MapError(MapError::Kind::RowCount, "expected " + std::to_string(height) +
                                                 " rows, found " + std::to_string(rows));
  }
  return GridMap(width, height, std::move(cells));
}

std::string save_map(const GridMap& map) {
  std::string out = std::to_string(map.width()) + " " + std::to_string(map.height()) + "\n";
  out.reserve(out.size() + map.size() + map.height());
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      out.push_back(map.at({x, y}) == Cell::Free ? '.' : '#');
    }
    out.push_back('\n');
  }
  return out;
}

GridMap read_map_file(const std::filesystem::path& path) {
  return load_map(read_file(path));
}

void write_map_file(const std::filesystem::path& path, const GridMap& map) {
  write_file_atomic(path, save_map(map));
}

std::vector<std::filesystem::path> list_map_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".map") {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<GridMap> read_map_dir(const std::filesystem::path& dir) {
  std::vector<GridMap> maps;
  for (const auto& path : list_map_files(dir)) maps.push_back(read_map_file(path));
  if (maps.empty()) throw std::runtime_error("no .map files in " + dir.string());
  return maps;
}

}  // namespace piloc
