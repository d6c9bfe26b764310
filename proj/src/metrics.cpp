#include "piloc/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace piloc {

BatchMetrics aggregate(std::span<const EpisodeResult> results, StepAveraging averaging) {
  if (results.empty()) throw std::invalid_argument("cannot aggregate an empty batch");
  BatchMetrics m;
  m.episodes = static_cast<int>(results.size());
  double steps_all = 0.0;
  double found = 0.0;
  std::vector<double> success_steps;
  for (const EpisodeResult& r : results) {
    steps_all += r.steps;
    found += r.targets_found;
    if (r.success) success_steps.push_back(r.steps);
  }
  const double n = static_cast<double>(results.size());
  m.sr = static_cast<double>(success_steps.size()) / n;
  m.anto = found / n;
  double success_sum = 0.0;
  for (double s : success_steps) success_sum += s;
  if (averaging == StepAveraging::AllEpisodes) {
    m.as = steps_all / n;
  } else {
    m.as = success_steps.empty() ? 0.0 : success_sum / static_cast<double>(success_steps.size());
  }
  if (success_steps.size() >= 2) {
    const double mean = success_sum / static_cast<double>(success_steps.size());
    double var = 0.0;
    for (double s : success_steps) var += (s - mean) * (s - mean);
    m.sv = var / static_cast<double>(success_steps.size());
  }
  return m;
}

nlohmann::json to_json(const BatchMetrics& m) {
  nlohmann::json j = {{"sr", m.sr}, {"as", m.as}, {"anto", m.anto}, {"episodes", m.episodes}};
  j["sv"] = m.sv ? nlohmann::json(*m.sv) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const EpisodeResult& r) {
  return {{"success", r.success},
          {"steps", r.steps},
          {"targets_found", r.targets_found},
          {"targets_total", r.targets_total},
          {"tick_rewards", r.tick_rewards},
          {"fallback_ticks", r.fallback_ticks}};
}

EpisodeResult episode_from_json(const nlohmann::json& j) {
  EpisodeResult r;
  r.success = j.at("success").get<bool>();
  r.steps = j.at("steps").get<int>();
  r.targets_found = j.at("targets_found").get<int>();
  r.targets_total = j.at("targets_total").get<int>();
  r.tick_rewards = j.at("tick_rewards").get<std::vector<double>>();
  r.fallback_ticks = j.at("fallback_ticks").get<int>();
  return r;
}

std::string format_table(std::span<const std::pair<std::string, BatchMetrics>> rows) {
  std::size_t name_width = 6;
  for (const auto& [name, _] : rows) name_width = std::max(name_width, name.size());
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-*s %8s %9s %11s %7s %9s\n", static_cast<int>(name_width),
                "Method", "SR", "AS", "SV", "ANTO", "episodes");
  out += buf;
  for (const auto& [name, m] : rows) {
    char sv[32];
    if (m.sv) {
      std::snprintf(sv, sizeof sv, "%.2f", *m.sv);
    } else {
      std::snprintf(sv, sizeof sv, "-");
    }
    std::snprintf(buf, sizeof buf, "%-*s %7.1f%% %9.2f %11s %7.3f %9d\n",
                  static_cast<int>(name_width), name.c_str(), 100.0 * m.sr, m.as, sv, m.anto,
                  m.episodes);
    out += buf;
  }
  return out;
}

}  // namespace piloc
