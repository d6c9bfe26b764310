#include <gtest/gtest.h>

#include <algorithm>

#include "piloc/comms.hpp"
#include "piloc/rng.hpp"
#include "support.hpp"

using namespace piloc;
using piloc::testing::open_map;

TEST(CommGroups, RangeIsInclusiveAndTransitive) {
  const std::vector<Position> pair = {{0, 0}, {0, 10}};
  EXPECT_EQ(comm_groups(pair, 10.0), (std::vector<std::vector<int>>{{0, 1}}));
  const std::vector<Position> chain = {{0, 0}, {0, 10}, {0, 20}};
  EXPECT_EQ(comm_groups(chain, 10.0), (std::vector<std::vector<int>>{{0, 1, 2}}));
  const std::vector<Position> apart = {{0, 0}, {11, 0}, {0, 11}};
  EXPECT_EQ(comm_groups(apart, 10.0), (std::vector<std::vector<int>>{{0}, {1}, {2}}));
  const std::vector<Position> diag = {{0, 0}, {8, 6}, {20, 20}};
  EXPECT_EQ(comm_groups(diag, 10.0), (std::vector<std::vector<int>>{{0, 1}, {2}}));
  const std::vector<Position> euclid = {{0, 0}, {8, 7}};
  EXPECT_EQ(comm_groups(euclid, 10.0), (std::vector<std::vector<int>>{{0}, {1}}));
}

TEST(MergeGroup, UnionAndMinMarks) {
  const GridMap m = open_map(10, 6);
  KnowledgeMaps a(10, 6), b(10, 6);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 5; ++x) a.record({x, y}, Cell::Free);
    for (int x = 5; x < 10; ++x) b.record({x, y}, Cell::Free);
  }
  a.record({5, 0}, Cell::Free);
  a.set_mark({5, 0}, 0.1);
  b.set_mark({5, 0}, 0.25);
  std::vector<KnowledgeMaps*> group = {&a, &b};
  merge_group(group);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.unknown_count(), 0u);
  EXPECT_EQ(a.mark({5, 0}), 0.1);

  const KnowledgeMaps before = a;
  merge_group(group);
  EXPECT_EQ(a, before);
}

TEST(MergeGroup, ConflictIsALogicError) {
  KnowledgeMaps a(5, 5), b(5, 5);
  a.record({1, 1}, Cell::Free);
  b.record({1, 1}, Cell::Obstacle);
  EXPECT_THROW(merge_into(a, b), std::logic_error);
}

TEST(Communicate, NonTransitiveUsesDirectNeighbours) {
  KnowledgeMaps a(30, 5), b(30, 5), c(30, 5);
  a.record({0, 0}, Cell::Free);
  c.record({29, 4}, Cell::Free);
  std::vector<KnowledgeMaps*> maps = {&a, &b, &c};
  const std::vector<Position> pos = {{0, 0}, {10, 0}, {20, 0}};
  communicate(maps, pos, 10.0, false);
  EXPECT_TRUE(b.known({0, 0}));
  EXPECT_TRUE(b.known({29, 4}));
  EXPECT_FALSE(a.known({29, 4}));
  EXPECT_FALSE(c.known({0, 0}));

  KnowledgeMaps d(30, 5), e(30, 5), f(30, 5);
  d.record({0, 0}, Cell::Free);
  f.record({29, 4}, Cell::Free);
  std::vector<KnowledgeMaps*> maps2 = {&d, &e, &f};
  communicate(maps2, pos, 10.0, true);
  EXPECT_TRUE(d.known({29, 4}));
  EXPECT_TRUE(f.known({0, 0}));
}
