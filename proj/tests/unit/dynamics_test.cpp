#include <gtest/gtest.h>

#include <map>
#include <set>

#include "piloc/world.hpp"
#include "support.hpp"

using namespace piloc;
using piloc::testing::map_from_rows;
using piloc::testing::shared_open_map;

namespace {

EpisodeConfig config(int agents, int targets) {
  EpisodeConfig c;
  c.num_agents = agents;
  c.num_targets = targets;
  return c;
}

void check_invariants(const WorldState& s) {
  for (const auto& a : s.agents) {
    EXPECT_TRUE(s.map->is_free(a.pos));
    EXPECT_LE(a.recent.size(), kRecentWindow);
  }
  for (const auto& t : s.targets) EXPECT_TRUE(s.map->is_free(t.pos));
  EXPECT_EQ(s.found_count + static_cast<int>(s.targets.size()), s.initial_targets);
  EXPECT_LE(s.step, s.config.step_limit);
}

}  // namespace

TEST(Reset, SeededAndDistinct) {
  const auto map = shared_open_map(10, 10);
  const WorldState a = reset(map, config(2, 2), 3);
  const WorldState b = reset(map, config(2, 2), 3);
  EXPECT_EQ(a.agent_positions(), b.agent_positions());
  ASSERT_EQ(a.targets.size(), 2u);
  std::set<Position> cells;
  for (const auto& ag : a.agents) {
    cells.insert(ag.pos);
    EXPECT_EQ(ag.history[0], ag.pos);
    EXPECT_EQ(ag.history[1], ag.pos);
    EXPECT_EQ(ag.knowledge.unknown_count(), 100u);
  }
  for (const auto& t : a.targets) {
    cells.insert(t.pos);
    EXPECT_EQ(t.pos, b.targets[&t - a.targets.data()].pos);
  }
  EXPECT_EQ(cells.size(), 4u);
  EXPECT_EQ(a.pheromone.max_value(), 0.0);
  EXPECT_EQ(a.step, 0);
}

TEST(Reset, PigeonholeAndShortage) {
  const auto four = std::make_shared<const GridMap>(map_from_rows({
      "#####",
      "#....",
      "#####",
      "#####",
      "#####",
  }));
  const WorldState s = reset(four, config(2, 2), 11);
  std::set<Position> cells;
  for (const auto& a : s.agents) cells.insert(a.pos);
  for (const auto& t : s.targets) cells.insert(t.pos);
  EXPECT_EQ(cells.size(), 4u);

  const auto three = std::make_shared<const GridMap>(map_from_rows({
      "#####",
      "#...#",
      "#####",
      "#####",
      "#####",
  }));
  EXPECT_THROW(reset(three, config(2, 2), 1), std::invalid_argument);
}

TEST(StepTargets, TargetWithoutFreeNeighbourStays) {
  // single free cell
  const auto map = std::make_shared<const GridMap>(map_from_rows({
      "#####",
      "#####",
      "##.##",
      "#####",
      "#####",
  }));
  WorldState s{map, config(1, 1), {}, {{0, {2, 2}}}, PheromoneField(5, 5), 0, 0, 1};
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    step_targets(s, rng);
    EXPECT_EQ(s.targets[0].pos, (Position{2, 2}));
  }
}

TEST(StepTargets, UniformOverLegalMoves) {
  const auto open = shared_open_map(9, 9);
  WorldState s = reset(open, config(1, 1), 1);
  Rng rng(42);
  std::map<Position, int> counts;
  const Position centre{4, 4};
  for (int i = 0; i < 10000; ++i) {
    s.targets[0].pos = centre;
    step_targets(s, rng);
    ++counts[s.targets[0].pos];
  }
  ASSERT_EQ(counts.size(), 4u);
  for (const auto& [p, n] : counts) {
    EXPECT_EQ(manhattan(p, centre), 1);
    EXPECT_NEAR(n / 10000.0, 0.25, 0.02);
  }

  const auto corridor = std::make_shared<const GridMap>(map_from_rows({
      "#####",
      ".....",
      "#####",
      "#####",
      "#####",
  }));
  WorldState c = reset(corridor, config(1, 1), 2);
  std::map<Position, int> corr;
  for (int i = 0; i < 10000; ++i) {
    c.targets[0].pos = {2, 1};
    step_targets(c, rng);
    ++corr[c.targets[0].pos];
  }
  ASSERT_EQ(corr.size(), 2u);
  for (const auto& [p, n] : corr) EXPECT_NEAR(n / 10000.0, 0.5, 0.03);
}

TEST(StepAgents, CollisionsBordersAndCoLocation) {
  const auto map = std::make_shared<const GridMap>(map_from_rows({
      ".....",
      ".#...",
      ".....",
      ".....",
      ".....",
  }));
  WorldState s = reset(map, config(2, 1), 1);
  s.agents[0].pos = {0, 1};
  s.agents[1].pos = {0, 0};
  const std::vector<Action> bump = {Action::Right, Action::Up};
  auto out = step_agents(s, bump);
  EXPECT_EQ(out[0], MoveOutcome::Collided);
  EXPECT_EQ(out[1], MoveOutcome::Collided);
  EXPECT_EQ(s.agents[0].pos, (Position{0, 1}));
  EXPECT_EQ(s.agents[1].pos, (Position{0, 0}));

  s.agents[0].pos = {2, 2};
  s.agents[1].pos = {4, 2};
  const std::vector<Action> meet = {Action::Right, Action::Left};
  out = step_agents(s, meet);
  EXPECT_EQ(out[0], MoveOutcome::Moved);
  EXPECT_EQ(out[1], MoveOutcome::Moved);
  EXPECT_EQ(s.agents[0].pos, s.agents[1].pos);
  EXPECT_EQ(s.agents[0].history[0], (Position{2, 2}));

  const std::vector<Action> one = {Action::Left};
  EXPECT_THROW(step_agents(s, one), std::invalid_argument);
}

TEST(Detect, BoundaryAndTies) {
  const auto map = shared_open_map(20, 20);
  WorldState s = reset(map, config(2, 3), 1);
  s.agents[0].pos = {5, 5};
  s.agents[1].pos = {15, 5};
  s.targets = {{0, {10, 5}}, {1, {5, 11}}, {2, {5, 10}}};
  const auto found = detect_targets(s);
  ASSERT_EQ(found.size(), 2u);
  EXPECT_EQ(found[0].target_id, 0);
  EXPECT_EQ(found[0].agent, 0);  // equidistant, lowest index
  EXPECT_EQ(found[1].target_id, 2);
  ASSERT_EQ(s.targets.size(), 1u);
  EXPECT_EQ(s.targets[0].id, 1);
  EXPECT_EQ(s.found_count, 2);
}

TEST(IsDone, Statuses) {
  const auto map = shared_open_map(10, 10);
  EpisodeConfig c = config(1, 1);
  c.step_limit = 250;
  WorldState s = reset(map, c, 1);
  s.step = 10;
  EXPECT_EQ(is_done(s, c), Status::Running);
  s.step = 250;
  EXPECT_EQ(is_done(s, c), Status::StepLimit);
  s.targets.clear();
  EXPECT_EQ(is_done(s, c), Status::AllFound);
}

TEST(Step, DeterministicPipeline) {
  const auto map = std::make_shared<const GridMap>(generate_map(10, 10, 0.2, 4));
  auto run = [&] {
    WorldState s = reset(map, config(2, 2), 9);
    Rng rng(9);
    std::vector<std::vector<Position>> trace;
    for (int t = 0; t < 30 && is_done(s, s.config) == Status::Running; ++t) {
      const std::vector<Action> acts = {kAllActions[t % 4], kAllActions[(t / 3) % 4]};
      step(s, acts, rng);
      check_invariants(s);
      trace.push_back(s.agent_positions());
      for (const auto& tg : s.targets) trace.back().push_back(tg.pos);
    }
    return trace;
  };
  EXPECT_EQ(run(), run());
}

TEST(Step, CollidingAgentsStillDeposit) {
  const auto map = shared_open_map(10, 10);
  EpisodeConfig c = config(2, 1);
  c.perception_radius = 1;
  WorldState s = reset(map, c, 1);
  s.agents[0].pos = {0, 0};
  s.agents[1].pos = {9, 9};
  s.targets = {{0, {5, 5}}};
  Rng rng(1);
  const std::vector<Action> out = {Action::Left, Action::Right};
  const StepInfo info = step(s, out, rng);
  EXPECT_EQ(s.agents[0].pos, (Position{0, 0}));
  EXPECT_EQ(info.agents[0].outcome, MoveOutcome::Collided);
  EXPECT_DOUBLE_EQ(s.pheromone.at({0, 0}), 0.98);
  EXPECT_DOUBLE_EQ(s.pheromone.at({9, 9}), 0.98);
  EXPECT_DOUBLE_EQ(info.agents[0].reward.r_co, 3.0);
}

TEST(Step, LastDetectionEndsTick) {
  const auto map = shared_open_map(10, 10);
  WorldState s = reset(map, config(1, 1), 1);
  s.agents[0].pos = {2, 2};
  s.targets = {{0, {3, 3}}};
  Rng rng(1);
  const std::vector<Action> a = {Action::Right};
  const StepInfo info = step(s, a, rng);
  EXPECT_EQ(info.status, Status::AllFound);
  EXPECT_EQ(info.agents[0].detections, 1);
  EXPECT_DOUBLE_EQ(info.agents[0].reward.r_re, 0.1);
  EXPECT_THROW(step(s, a, rng), std::logic_error);
}

TEST(Step, ObservedCellsHaveZeroMarkAndOlderCellsAge) {
  const auto map = shared_open_map(30, 5);
  EpisodeConfig c = config(1, 1);
  c.perception_radius = 2;
  WorldState s = reset(map, c, 1);
  s.agents[0].pos = {5, 2};
  s.targets = {{0, {29, 0}}};
  Rng rng(3);
  const std::vector<Action> right = {Action::Right};
  step(s, right, rng);
  step(s, right, rng);
  const KnowledgeMaps& k = s.agents[0].knowledge;
  EXPECT_EQ(k.mark({7, 2}), 0.0);
  EXPECT_EQ(k.mark({9, 2}), 0.0);
  EXPECT_DOUBLE_EQ(k.mark({4, 2}), 0.003);
  EXPECT_FALSE(k.explored({3, 2}));
}
