#include <gtest/gtest.h>

#include <cmath>

#include "piloc/pheromone.hpp"
#include "piloc/rng.hpp"

using namespace piloc;

TEST(Pheromone, DepositClampsAndStacks) {
  PheromoneField f(10, 10);
  f.set({1, 1}, 9.5);
  f.set({2, 2}, 3.0);
  const std::vector<Position> agents = {{1, 1}, {2, 2}, {2, 2}};
  f.deposit(agents);
  EXPECT_EQ(f.at({1, 1}), 10.0);
  EXPECT_EQ(f.at({2, 2}), 5.0);
  EXPECT_EQ(f.at({3, 3}), 0.0);
}

TEST(Pheromone, Evaporation) {
  PheromoneField f(5, 5);
  f.set({0, 0}, 10.0);
  f.evaporate();
  EXPECT_EQ(f.at({0, 0}), 9.8);
  EXPECT_EQ(f.at({1, 1}), 0.0);
  f.evaporate();
  EXPECT_NEAR(f.at({0, 0}), 10.0 * std::pow(0.98, 2), 1e-12);
  EXPECT_NEAR(f.at({0, 0}), 9.604, 1e-12);
}

TEST(Pheromone, DepositThenEvaporateOrder) {
  PheromoneField f(5, 5);
  f.set({2, 2}, 9.5);
  const std::vector<Position> one = {{2, 2}};
  f.deposit(one);
  f.evaporate();
  EXPECT_EQ(f.at({2, 2}), 9.8);
}

TEST(Pheromone, SetRejectsOutOfRange) {
  PheromoneField f(5, 5);
  EXPECT_THROW(f.set({0, 0}, 10.5), std::invalid_argument);
  EXPECT_THROW(f.set({0, 0}, -1.0), std::invalid_argument);
}

TEST(Pheromone, Windows) {
  PheromoneField f(20, 20);
  const auto zero = f.window({10, 10}, 11);
  ASSERT_EQ(zero.size(), 121u);
  for (double v : zero) EXPECT_EQ(v, 0.0);

  const auto corner = f.window({0, 0}, 11);
  int off = 0;
  for (int dy = -5; dy <= 5; ++dy) {
    for (int dx = -5; dx <= 5; ++dx) {
      const double v = corner[(dy + 5) * 11 + (dx + 5)];
      if (dx < 0 || dy < 0) {
        EXPECT_EQ(v, 10.0);
        ++off;
      } else {
        EXPECT_EQ(v, 0.0);
      }
    }
  }
  EXPECT_EQ(off, 121 - 36);

  const std::vector<Position> agent = {{10, 10}};
  f.deposit(agent);
  const auto w = f.window({10, 10}, 11);
  EXPECT_EQ(w[60], 1.0);
  EXPECT_EQ(f.window_sum({10, 10}, 5), 1.0);
  EXPECT_THROW(f.window({10, 10}, 4), std::invalid_argument);
}

TEST(Pheromone, WindowSums) {
  PheromoneField f(20, 20);
  EXPECT_EQ(f.window_sum({10, 10}, 5), 0.0);
  f.set({12, 9}, 4.0);
  EXPECT_EQ(f.window_sum({10, 10}, 5), 4.0);
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 20; ++x) f.set({x, y}, 1.0);
  }
  EXPECT_EQ(f.window_sum({10, 10}, 5), 121.0);
  EXPECT_EQ(f.window_sum({0, 0}, 5), 36.0);
}

TEST(Pheromone, EvaporationNeverIncreases) {
  PheromoneField f(8, 8);
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) f.set({x, y}, u(rng));
  }
  const std::vector<double> before(f.values().begin(), f.values().end());
  f.evaporate();
  for (std::size_t i = 0; i < before.size(); ++i) EXPECT_LE(f.values()[i], before[i]);
}
