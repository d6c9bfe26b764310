#include <gtest/gtest.h>

#include "piloc/astar.hpp"
#include "piloc/fallback.hpp"
#include "piloc/rng.hpp"
#include "support.hpp"

using namespace piloc;
using piloc::testing::bfs_on_map;
using piloc::testing::map_from_rows;
using piloc::testing::open_map;

namespace {

bool valid_path(const GridMap& m, const std::vector<Position>& path, Position s, Position g) {
  if (path.empty() || path.front() != s || path.back() != g) return false;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (!m.is_free(path[i])) return false;
    if (i > 0 && manhattan(path[i - 1], path[i]) != 1) return false;
  }
  return true;
}

KnowledgeMaps fully_known(const GridMap& m) {
  KnowledgeMaps k(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) k.record({x, y}, m.at({x, y}));
  }
  return k;
}

}  // namespace

TEST(Trap, Threshold) {
  std::vector<Position> four = {{1, 1}, {2, 1}, {1, 1}, {2, 1}, {1, 1}, {2, 1}, {1, 1}};
  EXPECT_TRUE(is_trapped(four));
  std::vector<Position> three = {{1, 1}, {2, 1}, {1, 1}, {2, 1}, {1, 1}, {3, 1}};
  EXPECT_FALSE(is_trapped(three));
  std::vector<Position> distinct;
  for (int i = 0; i < 10; ++i) distinct.push_back({i, 0});
  EXPECT_FALSE(is_trapped(distinct));
}

TEST(AStar, Basics) {
  const GridMap m = open_map(10, 10);
  auto pass = [&](Position p) { return m.is_free(p); };
  EXPECT_EQ(*astar(10, 10, pass, {3, 3}, {3, 3}), (std::vector<Position>{{3, 3}}));
  const auto corridor = astar(10, 10, pass, {0, 0}, {4, 0});
  ASSERT_TRUE(corridor);
  EXPECT_EQ(corridor->size(), 5u);
}

TEST(AStar, MatchesBfsOnRandomMaps) {
  Rng rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const GridMap m = generate_map(15, 15, 0.3, trial);
    const auto free = m.free_cells();
    std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
    const Position s = free[pick(rng)];
    const Position g = free[pick(rng)];
    const auto dist = bfs_on_map(m, s);
    const auto path = astar(15, 15, [&](Position p) { return m.is_free(p); }, s, g);
    ASSERT_TRUE(path);
    EXPECT_TRUE(valid_path(m, *path, s, g));
    EXPECT_EQ(static_cast<int>(path->size()) - 1, dist[m.index(g)]);
  }
}

TEST(AStar, UnreachableGoal) {
  const GridMap m = open_map(9, 9);
  auto pass = [&](Position p) {
    const bool wall = (p.x == 5 && p.y >= 3 && p.y <= 7) || (p.x == 7 && p.y >= 3 && p.y <= 7) ||
                      ((p.y == 3 || p.y == 7) && p.x >= 5 && p.x <= 7);
    return m.is_free(p) && !wall;
  };
  EXPECT_FALSE(astar(9, 9, pass, {0, 0}, {6, 5}));
  EXPECT_FALSE(astar(9, 9, pass, {0, 0}, {5, 5}));
}

TEST(RecoveryGoal, AdjacentUnknown) {
  KnowledgeMaps partial(6, 6);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 6; ++x) {
      if (!(x == 3 && y == 2)) partial.record({x, y}, Cell::Free);
    }
  }
  EXPECT_EQ(*select_recovery_goal(partial, {2, 2}), (Position{3, 2}));
}

TEST(RecoveryGoal, StalestCellWhenFullyExplored) {
  const GridMap m = open_map(6, 6);
  KnowledgeMaps k = fully_known(m);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 6; ++x) k.set_mark({x, y}, 0.1);
  }
  k.set_mark({5, 4}, 0.3);
  EXPECT_EQ(*select_recovery_goal(k, {0, 0}), (Position{5, 4}));
}

TEST(RecoveryGoal, RowMajorTieBreak) {
  KnowledgeMaps k(7, 7);
  for (int y = 0; y < 7; ++y) {
    for (int x = 0; x < 7; ++x) {
      const bool unknown = (x == 3 && y == 1) || (x == 1 && y == 3) || (x == 5 && y == 3);
      if (!unknown) k.record({x, y}, Cell::Free);
    }
  }
  EXPECT_EQ(*select_recovery_goal(k, {3, 3}), (Position{3, 1}));
}

TEST(Fallback, EngagesFollowsPathAndDisengages) {
  const GridMap m = open_map(10, 10);
  AgentState agent{{2, 2}, {Position{2, 2}, Position{2, 2}}, KnowledgeMaps(10, 10), {}};
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 10; ++x) {
      if (!(x == 3 && y == 2)) agent.knowledge.record({x, y}, Cell::Free);
    }
  }
  FallbackController fb;
  EXPECT_FALSE(fb.decide(agent).has_value());
  for (int i = 0; i < 4; ++i) agent.push_recent({2, 2});
  const auto a = fb.decide(agent);
  ASSERT_TRUE(a);
  EXPECT_EQ(*a, Action::Right);
  EXPECT_TRUE(fb.engaged());
  EXPECT_EQ(*fb.goal(), (Position{3, 2}));

  agent.pos = {3, 2};
  agent.knowledge.record({3, 2}, Cell::Free);
  agent.recent.clear();
  agent.push_recent({3, 2});
  EXPECT_FALSE(fb.decide(agent).has_value());
  EXPECT_FALSE(fb.engaged());
}

TEST(Fallback, ReplansOnNewObstacle) {
  const GridMap truth = map_from_rows({
      "..........",
      "..........",
      "..........",
      "..........",
      ".....#....",
  });
  AgentState agent{{0, 4}, {Position{0, 4}, Position{0, 4}}, KnowledgeMaps(10, 5), {}};
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 9; ++x) {
      if (!(x == 5 && y == 4)) agent.knowledge.record({x, y}, truth.at({x, y}));
    }
  }
  for (int i = 0; i < 4; ++i) agent.push_recent({0, 4});
  FallbackController fb;
  ASSERT_TRUE(fb.decide(agent));
  const auto first = fb.path();
  ASSERT_EQ(first.back(), (Position{5, 4}));
  agent.knowledge.record({5, 4}, Cell::Obstacle);
  const int before = fb.replans();
  ASSERT_TRUE(fb.decide(agent));
  EXPECT_GT(fb.replans(), before);
  EXPECT_EQ(fb.goal()->x, 9);
  for (Position p : fb.path()) EXPECT_NE(p, (Position{5, 4}));
}

TEST(Fallback, PathStepDirection) {
  EXPECT_EQ(direction_to({2, 2}, {3, 2}), Action::Right);
  EXPECT_EQ(direction_to({2, 2}, {2, 1}), Action::Up);
}
