#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "piloc/episode.hpp"
#include "piloc/metrics.hpp"

namespace piloc {

using MapSet = std::vector<std::shared_ptr<const GridMap>>;

MapSet load_map_set(const std::filesystem::path& dir);

// Episode e runs on maps[e % maps.size()] with seed derive_seed(seed, e), so
// results do not depend on the worker count. Replays go to
// replay_dir/episode_<e>.jsonl when requested.
std::vector<EpisodeResult> evaluate(const MapSet& maps, const EpisodeConfig& config,
                                    const PolicyHandle& policy, int episodes, std::uint64_t seed,
                                    int workers = 1,
                                    const std::optional<std::filesystem::path>& replay_dir = std::nullopt);

struct AblationVariant {
  std::string name;
  bool pheromone = false;
  bool comms = false;
};

// Neither mechanism, communication only, pheromone only, both.
const std::vector<AblationVariant>& ablation_variants();

EpisodeConfig apply_variant(EpisodeConfig config, const AblationVariant& variant);

}  // namespace piloc
