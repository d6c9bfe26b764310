#include "piloc/experiments.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "piloc/io.hpp"
#include "piloc/rng.hpp"

namespace piloc {

MapSet load_map_set(const std::filesystem::path& dir) {
  MapSet out;
  for (GridMap& m : read_map_dir(dir)) out.push_back(std::make_shared<const GridMap>(std::move(m)));
  if (out.empty()) throw std::runtime_error("no .map files in " + dir.string());
  return out;
}

std::vector<EpisodeResult> evaluate(const MapSet& maps, const EpisodeConfig& config,
                                    const PolicyHandle& policy, int episodes, std::uint64_t seed,
                                    int workers,
                                    const std::optional<std::filesystem::path>& replay_dir) {
  if (maps.empty()) throw std::invalid_argument("evaluation needs at least one map");
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  if (replay_dir) std::filesystem::create_directories(*replay_dir);
  std::vector<EpisodeResult> results(episodes);
  auto run = [&](int e) {
    const auto& map = maps[static_cast<std::size_t>(e) % maps.size()];
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(e));
    if (replay_dir) {
      std::ostringstream log;
      results[e] = run_episode(map, config, policy, s, &log);
      char name[40];
      std::snprintf(name, sizeof name, "episode_%04d.jsonl", e);
      write_file_atomic(*replay_dir / name, log.str());
    } else {
      results[e] = run_episode(map, config, policy, s);
    }
  };
  workers = std::max(1, std::min(workers, episodes));
  if (workers == 1) {
    for (int e = 0; e < episodes; ++e) run(e);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int e = w; e < episodes; e += workers) run(e);
      });
    }
  }
  return results;
}

const std::vector<AblationVariant>& ablation_variants() {
  static const std::vector<AblationVariant> variants = {
      {"PILOC-com-ph", false, false},
      {"PILOC-ph", false, true},
      {"PILOC-com", true, false},
      {"PILOC", true, true},
  };
  return variants;
}

EpisodeConfig apply_variant(EpisodeConfig config, const AblationVariant& variant) {
  config.pheromone_enabled = variant.pheromone;
  config.comms_enabled = variant.comms;
  return config;
}

}  // namespace piloc
