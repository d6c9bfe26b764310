#include "piloc/replay.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "piloc/io.hpp"

namespace piloc {
namespace {

using nlohmann::json;

Position to_pos(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

std::vector<Position> to_positions(const json& j) {
  std::vector<Position> out;
  for (const auto& p : j) out.push_back(to_pos(p));
  return out;
}

std::vector<Position> target_positions(const json& j) {
  std::vector<Position> out;
  for (const auto& t : j) out.push_back(to_pos(t.at("pos")));
  return out;
}

GridMap map_from_header(const json& header) {
  const json& m = header.at("map");
  std::string text = std::to_string(m.at("width").get<int>()) + " " +
                     std::to_string(m.at("height").get<int>()) + "\n";
  for (const auto& row : m.at("rows")) text += row.get<std::string>() + "\n";
  return load_map(text);
}

constexpr std::string_view kHeat = " .:-=+*%";

}  // namespace

ReplayLog parse_replay(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<json> records;
  try {
    while (std::getline(in, line)) {
      if (!line.empty()) records.push_back(json::parse(line));
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed replay line: ") + e.what());
  }
  if (records.size() < 3 || records.front().value("type", "") != "header" ||
      records[1].value("type", "") != "reset" || records.back().value("type", "") != "summary") {
    throw std::runtime_error("replay must hold a header, a reset record and a summary");
  }
  try {
    const json& header = records.front();
    ReplayLog log{header, map_from_header(header), {}, {}, {}};
    const json& cfg = header.at("config");
    log.pheromone.p_max = cfg.at("p_max").get<double>();
    log.pheromone.evaporation = cfg.at("evaporation").get<double>();
    const std::size_t agents = records[1].at("agents").size();
    log.frames.push_back({0, to_positions(records[1].at("agents")),
                          target_positions(records[1].at("targets")),
                          std::vector<bool>(agents, false)});
    for (std::size_t i = 2; i + 1 < records.size(); ++i) {
      const json& r = records[i];
      if (r.at("type") != "tick") throw std::runtime_error("unexpected record type");
      log.frames.push_back({r.at("step").get<int>(), to_positions(r.at("agents")),
                            target_positions(r.at("targets")),
                            r.at("fallback").get<std::vector<bool>>()});
    }
    log.summary = episode_from_json(records.back());
    return log;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed replay record: ") + e.what());
  }
}

std::vector<PheromoneField> pheromone_history(const ReplayLog& log) {
  std::vector<PheromoneField> out;
  PheromoneField field(log.map.width(), log.map.height(), log.pheromone);
  out.push_back(field);
  for (std::size_t f = 1; f < log.frames.size(); ++f) {
    field.deposit(log.frames[f].agents);
    field.evaporate();
    out.push_back(field);
  }
  return out;
}

std::vector<std::string> render_text(const ReplayLog& log) {
  const auto fields = pheromone_history(log);
  std::vector<std::string> frames;
  const int w = log.map.width();
  const int h = log.map.height();
  for (std::size_t f = 0; f < log.frames.size(); ++f) {
    const ReplayFrame& frame = log.frames[f];
    std::vector<std::string> grid(h, std::string(w, ' '));
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const Position p{x, y};
        if (!log.map.is_free(p)) {
          grid[y][x] = '#';
          continue;
        }
        const double level = fields[f].at(p) / log.pheromone.p_max;
        const auto idx = std::min<std::size_t>(kHeat.size() - 1,
                                               static_cast<std::size_t>(level * kHeat.size()));
        grid[y][x] = kHeat[idx];
      }
    }
    for (Position t : frame.targets) grid[t.y][t.x] = 'T';
    for (std::size_t a = 0; a < frame.agents.size(); ++a) {
      const Position p = frame.agents[a];
      const char base = (a < frame.fallback.size() && frame.fallback[a]) ? 'a' : 'A';
      grid[p.y][p.x] = static_cast<char>(base + static_cast<int>(a % 26));
    }
    std::string text = "step " + std::to_string(frame.step) + "\n";
    for (const auto& row : grid) text += row + "\n";
    frames.push_back(std::move(text));
  }
  return frames;
}

void write_ppm_frames(const ReplayLog& log, const std::filesystem::path& dir, int scale) {
  if (scale < 1) throw std::invalid_argument("scale must be >= 1");
  std::filesystem::create_directories(dir);
  const auto fields = pheromone_history(log);
  const int w = log.map.width();
  const int h = log.map.height();
  for (std::size_t f = 0; f < log.frames.size(); ++f) {
    std::vector<std::array<unsigned char, 3>> cells(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const Position p{x, y};
        auto& c = cells[static_cast<std::size_t>(y) * w + x];
        if (!log.map.is_free(p)) {
          c = {40, 40, 40};
        } else {
          const double level = std::clamp(fields[f].at(p) / log.pheromone.p_max, 0.0, 1.0);
          const auto fade = static_cast<unsigned char>(255 - 155 * level);
          c = {255, fade, fade};
        }
      }
    }
    for (Position t : log.frames[f].targets) cells[static_cast<std::size_t>(t.y) * w + t.x] = {0, 170, 0};
    for (std::size_t a = 0; a < log.frames[f].agents.size(); ++a) {
      const Position p = log.frames[f].agents[a];
      const bool fb = a < log.frames[f].fallback.size() && log.frames[f].fallback[a];
      cells[static_cast<std::size_t>(p.y) * w + p.x] =
          fb ? std::array<unsigned char, 3>{230, 140, 0} : std::array<unsigned char, 3>{0, 60, 220};
    }
    std::string data = "P6\n" + std::to_string(w * scale) + " " + std::to_string(h * scale) + "\n255\n";
    for (int py = 0; py < h * scale; ++py) {
      for (int px = 0; px < w * scale; ++px) {
        const auto& c = cells[static_cast<std::size_t>(py / scale) * w + px / scale];
        data.append(reinterpret_cast<const char*>(c.data()), 3);
      }
    }
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04zu.ppm", f);
    write_file_atomic(dir / name, data);
  }
}

}  // namespace piloc
