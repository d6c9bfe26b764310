#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace piloc {

struct EpisodeResult {
  bool success = false;
  int steps = 0;
  int targets_found = 0;
  int targets_total = 0;
  std::vector<double> tick_rewards;  // summed over agents
  int fallback_ticks = 0;

  friend bool operator==(const EpisodeResult&, const EpisodeResult&) = default;
};

struct BatchMetrics {
  double sr = 0.0;
  double as = 0.0;
  std::optional<double> sv;  // absent with fewer than two successes
  double anto = 0.0;
  int episodes = 0;

  friend bool operator==(const BatchMetrics&, const BatchMetrics&) = default;
};

enum class StepAveraging { AllEpisodes, SuccessesOnly };

// SR, AS (failures count at the steps they ran, i.e. the cap), SV as the
// population variance over successes, ANTO over every episode.
BatchMetrics aggregate(std::span<const EpisodeResult> results,
                       StepAveraging averaging = StepAveraging::AllEpisodes);

nlohmann::json to_json(const BatchMetrics& m);
nlohmann::json to_json(const EpisodeResult& r);
EpisodeResult episode_from_json(const nlohmann::json& j);

// Aligned table with columns name, SR, AS, SV, ANTO, episodes.
std::string format_table(std::span<const std::pair<std::string, BatchMetrics>> rows);

}  // namespace piloc
