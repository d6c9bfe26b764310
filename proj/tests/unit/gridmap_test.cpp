#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "piloc/grid_map.hpp"
#include "support.hpp"

using namespace piloc;
using piloc::testing::bfs_on_map;
using piloc::testing::map_from_rows;
using piloc::testing::open_map;

namespace {

bool connected(const GridMap& m) {
  const auto free = m.free_cells();
  const auto dist = bfs_on_map(m, free.front());
  for (Position p : free) {
    if (dist[m.index(p)] < 0) return false;
  }
  return true;
}

MapError::Kind load_error(const std::string& text) {
  try {
    load_map(text);
  } catch (const MapError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected a MapError";
  return MapError::Kind::BadArgument;
}

}  // namespace

TEST(GridMap, ZeroDensityGivesOpenMap) {
  for (std::uint64_t seed : {0u, 5u, 99u}) {
    const GridMap m = generate_map(5, 5, 0.0, seed);
    EXPECT_EQ(m.free_count(), 25u);
  }
}

TEST(GridMap, GenerationIsDeterministic) {
  EXPECT_EQ(generate_map(60, 60, 0.2, 7), generate_map(60, 60, 0.2, 7));
  EXPECT_NE(generate_map(60, 60, 0.2, 7), generate_map(60, 60, 0.2, 8));
}

TEST(GridMap, GeneratedMapsAreConnectedAndNearRequestedDensity) {
  EXPECT_TRUE(connected(generate_map(20, 20, 0.3, 1)));
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    for (double d : {0.1, 0.25, 0.45}) {
      const GridMap m = generate_map(17 + static_cast<int>(seed % 5), 23, d, seed);
      ASSERT_TRUE(connected(m)) << "seed " << seed << " density " << d;
      EXPECT_NEAR(m.obstacle_fraction(), d, 0.1);
    }
  }
}

TEST(GridMap, RejectsBadGeneratorArguments) {
  EXPECT_THROW(generate_map(20, 20, 0.46, 1), MapError);
  EXPECT_THROW(generate_map(4, 20, 0.1, 1), MapError);
  EXPECT_THROW(generate_map(20, 20, -0.1, 1), MapError);
}

TEST(GridMap, TextRoundTrip) {
  const GridMap m = generate_map(20, 20, 0.3, 1);
  const std::string text = save_map(m);
  EXPECT_EQ(load_map(text), m);
  EXPECT_EQ(save_map(load_map(text)), text);
  EXPECT_EQ(text.substr(0, 6), "20 20\n");
  EXPECT_EQ(text.back(), '\n');
}

TEST(GridMap, LoadErrorsAreDistinct) {
  EXPECT_EQ(load_error("2 2\n..\n..\n"), MapError::Kind::TooSmall);
  EXPECT_EQ(load_error("5 5\n.....\n.....\n#####\n.....\n.....\n"), MapError::Kind::Disconnected);
  EXPECT_EQ(load_error("5 5\n.....\n....\n.....\n.....\n.....\n"), MapError::Kind::RaggedRow);
  EXPECT_EQ(load_error("5 5\n.....\n..x..\n.....\n.....\n.....\n"), MapError::Kind::UnknownCharacter);
  EXPECT_EQ(load_error("5 5\n.....\n.....\n.....\n.....\n"), MapError::Kind::RowCount);
  EXPECT_EQ(load_error("5 5\n#####\n#####\n#####\n#####\n#####\n"), MapError::Kind::NoFreeCells);
  EXPECT_EQ(load_error("five 5\n"), MapError::Kind::BadHeader);
}

TEST(GridMap, NeighboursAndBorders) {
  const GridMap m = open_map(5, 5);
  EXPECT_EQ(m.neighbors4({0, 0}).size(), 2u);
  EXPECT_EQ(m.neighbors4({2, 2}).size(), 4u);
  EXPECT_FALSE(m.is_free({-1, 0}));
  EXPECT_FALSE(m.is_free({0, 5}));

  const GridMap ringed = map_from_rows({
      ".....",
      "..#..",
      ".###.",
      "..#..",
      ".....",
  });
  EXPECT_TRUE(ringed.neighbors4({2, 2}).empty());
}

TEST(GridMap, RingedCellMakesMapDisconnected) {
  // The centre cell above is isolated; the loader must reject the split region.
  EXPECT_THROW(map_from_rows({".....", "..#..", ".#.#.", "..#..", "....."}), MapError);
}

TEST(GridMap, DirectoryListingIsSorted) {
  const auto dir = std::filesystem::temp_directory_path() / "piloc_gridmap_dir";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  write_map_file(dir / "b.map", generate_map(6, 6, 0.1, 2));
  write_map_file(dir / "a.map", generate_map(6, 6, 0.1, 1));
  std::ofstream(dir / "notes.txt") << "x";
  const auto files = list_map_files(dir);
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(files[0].filename(), "a.map");
  EXPECT_EQ(read_map_dir(dir)[0], generate_map(6, 6, 0.1, 1));
  std::filesystem::remove_all(dir);
}
