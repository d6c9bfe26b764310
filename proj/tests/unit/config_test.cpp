#include <gtest/gtest.h>

#include "piloc/config.hpp"
#include "piloc/io.hpp"

using namespace piloc;

TEST(Config, DefaultsRoundTrip) {
  const RunConfig defaults;
  const std::string text = format_config(defaults);
  const RunConfig back = parse_config(text);
  EXPECT_EQ(format_config(back), text);
  for (const char* key : {"[episode]", "agents = 2", "targets = 6", "perception_radius = 5",
                          "comm_range = 10", "pheromone_window = 11", "step_limit = 250",
                          "p_max = 10", "evaporation = 0.02", "collision_penalty = 3",
                          "alpha = 0.1", "gamma = 0.99", "clip = 0.2", "start = 10",
                          "increment = 10", "cap = 260", "patience = 50", "density = 0.2",
                          "learning_rate = 3e-04", "max_grad_norm = 0.5"}) {
    EXPECT_NE(text.find(key), std::string::npos) << key;
  }
}

TEST(Config, FileOverridesDefaults) {
  const RunConfig c = parse_config("[episode]\nagents = 3\npheromone = false\n[curriculum]\ncap = 120\n");
  EXPECT_EQ(c.episode.num_agents, 3);
  EXPECT_FALSE(c.episode.pheromone_enabled);
  EXPECT_EQ(c.train.curriculum.cap, 120);
  EXPECT_EQ(c.episode.num_targets, 6);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config("[episode]\nagnets = 3\n"), ConfigError);
  EXPECT_THROW(parse_config("[nope]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[episode]\nagents = three\n"), ConfigError);
  EXPECT_THROW(parse_config("[episode]\nagents = 0\n"), ConfigError);
  EXPECT_THROW(parse_config("[episode]\npheromone = maybe\n"), ConfigError);
  EXPECT_THROW(parse_config("[train]\ngamma = 2\n"), ConfigError);
  EXPECT_THROW(parse_config("[reward]\nre_exploration_form = other\n"), ConfigError);
}

TEST(Config, ShippedDefaultsMatchBuiltIns) {
  const std::string shipped = read_file(PILOC_SOURCE_DIR "/config/default.ini");
  EXPECT_EQ(format_config(parse_config(shipped)), format_config(RunConfig{}));
  EXPECT_EQ(shipped, format_config(RunConfig{}));
}
