#pragma once

#include <filesystem>
#include <string>

#include "piloc/metrics.hpp"
#include "piloc/trainer.hpp"
#include "piloc/world.hpp"

namespace piloc {

struct MapGenConfig {
  int width = 20;
  int height = 20;
  double density = 0.2;
};

struct EvalConfig {
  int episodes = 250;
  int workers = 1;
  StepAveraging step_averaging = StepAveraging::AllEpisodes;
};

struct RunConfig {
  EpisodeConfig episode;
  TrainConfig train;
  MapGenConfig maps;
  EvalConfig eval;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// INI text with sections [episode], [pheromone], [reward], [train],
// [curriculum], [maps], [eval]. Keys absent from the text keep the values of
// `base`; unknown sections or keys are rejected.
RunConfig parse_config(const std::string& text, const RunConfig& base = {});
RunConfig load_config(const std::filesystem::path& path, const RunConfig& base = {});

// Every key, in the same format parse_config reads.
std::string format_config(const RunConfig& config);

}  // namespace piloc
