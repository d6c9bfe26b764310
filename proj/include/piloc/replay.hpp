#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "piloc/grid_map.hpp"
#include "piloc/metrics.hpp"
#include "piloc/world.hpp"

namespace piloc {

struct ReplayFrame {
  int step = 0;
  std::vector<Position> agents;
  std::vector<Position> targets;
  std::vector<bool> fallback;
};

struct ReplayLog {
  nlohmann::json header;
  GridMap map;
  PheromoneParams pheromone;
  std::vector<ReplayFrame> frames;  // frames[0] is the reset state
  EpisodeResult summary;
};

// Parses a JSON-lines replay; throws std::runtime_error on malformed input.
ReplayLog parse_replay(std::string_view text);

// Pheromone field after each frame, recomputed from the agent positions.
std::vector<PheromoneField> pheromone_history(const ReplayLog& log);

// Character grid per frame: '#' obstacle, 'A'.. agents ('a'.. under
// fallback control), 'T' targets, pheromone heat " .:-=+*%" on free cells.
std::vector<std::string> render_text(const ReplayLog& log);

// Binary PPM per frame, `scale` pixels per cell, written as frame_0000.ppm...
void write_ppm_frames(const ReplayLog& log, const std::filesystem::path& dir, int scale = 8);

}  // namespace piloc
