#include <gtest/gtest.h>

#include <array>

#include "piloc/baselines.hpp"
#include "piloc/world.hpp"
#include "support.hpp"

using namespace piloc;
using piloc::testing::open_map;
using piloc::testing::shared_open_map;

TEST(Frontier, StepsTowardOnlyFrontier) {
  KnowledgeMaps k(8, 8);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      if (x == 7 && (y == 2 || y == 4)) {
        k.record({x, y}, Cell::Obstacle);
      } else if (!(x == 7 && y == 3)) {
        k.record({x, y}, Cell::Free);
      }
    }
  }
  EXPECT_EQ(frontier_cells(k), (std::vector<Position>{{6, 3}}));
  Rng rng(1);
  EXPECT_EQ(frontier_policy(k, {5, 3}, rng), Action::Right);
  EXPECT_EQ(frontier_policy(k, {6, 2}, rng), Action::Down);
}

TEST(Frontier, FullyExploredHeadsForStalestCell) {
  KnowledgeMaps k(8, 8);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      k.record({x, y}, Cell::Free);
      k.set_mark({x, y}, 0.05);
    }
  }
  k.set_mark({0, 7}, 0.3);
  Rng rng(1);
  const Action a = frontier_policy(k, {0, 0}, rng);
  EXPECT_EQ(a, Action::Down);
}

TEST(Frontier, RowMajorTie) {
  KnowledgeMaps k(9, 9);
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 9; ++x) {
      const bool unknown = (x == 4 && y == 0) || (x == 4 && y == 8);
      if (!unknown) k.record({x, y}, Cell::Free);
    }
  }
  Rng rng(1);
  EXPECT_EQ(frontier_policy(k, {4, 4}, rng), Action::Up);
}

TEST(Frontier, DeterministicGivenMaps) {
  KnowledgeMaps k(12, 12);
  const GridMap m = generate_map(12, 12, 0.2, 3);
  observe(m, k, m.free_cells()[0], 3);
  Rng a(1), b(999);
  EXPECT_EQ(frontier_policy(k, m.free_cells()[0], a), frontier_policy(k, m.free_cells()[0], b));
}

TEST(Frontier, ExpandsExplorationOnOpenMap) {
  const auto map = std::make_shared<const GridMap>(generate_map(20, 20, 0.2, 6));
  EpisodeConfig c;
  c.num_agents = 1;
  c.num_targets = 1;
  c.perception_radius = 2;
  c.step_limit = 400;
  WorldState s = reset(map, c, 2);
  s.targets.clear();
  s.targets.push_back({0, map->free_cells().back()});
  Rng env(3), pol(4);
  std::size_t unknown = s.agents[0].knowledge.unknown_count();
  for (int t = 0; t < 300 && is_done(s, c) == Status::Running; ++t) {
    const std::vector<Action> a = {frontier_policy(s.agents[0].knowledge, s.agents[0].pos, pol)};
    step(s, a, env);
    const std::size_t now = s.agents[0].knowledge.unknown_count();
    EXPECT_LE(now, unknown);
    unknown = now;
  }
  EXPECT_TRUE(is_done(s, c) == Status::AllFound || frontier_cells(s.agents[0].knowledge).empty());
}

TEST(Random, UniformAndSeeded) {
  Rng rng(123);
  std::array<int, 4> counts{};
  for (int i = 0; i < 10000; ++i) ++counts[static_cast<int>(random_policy(rng))];
  for (int n : counts) EXPECT_NEAR(n / 10000.0, 0.25, 0.02);
  Rng a(9), b(9);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(random_policy(a), random_policy(b));
}
