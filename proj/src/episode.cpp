#include "piloc/episode.hpp"

#include <sstream>
#include <stdexcept>

#include "piloc/baselines.hpp"
#include "piloc/fallback.hpp"
#include "piloc/rng.hpp"

namespace piloc {
namespace {

using nlohmann::json;

json pos_json(Position p) { return json::array({p.x, p.y}); }

json positions_json(std::span<const Position> ps) {
  json out = json::array();
  for (Position p : ps) out.push_back(pos_json(p));
  return out;
}

json targets_json(const std::vector<Target>& targets) {
  json out = json::array();
  for (const Target& t : targets) out.push_back({{"id", t.id}, {"pos", pos_json(t.pos)}});
  return out;
}

json map_rows(const GridMap& map) {
  json rows = json::array();
  std::istringstream in(save_map(map));
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) rows.push_back(line);
  return rows;
}

json reward_json(const RewardBreakdown& r) {
  return {{"r_e", r.r_e}, {"r_re", r.r_re}, {"r_co", r.r_co},
          {"r_ph", r.r_ph}, {"bonus", r.bonus}, {"total", r.total}};
}

}  // namespace

std::string_view policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Piloc: return "piloc";
    case PolicyKind::Frontier: return "frontier";
    case PolicyKind::Random: return "random";
  }
  return "?";
}

PolicyKind parse_policy(std::string_view name) {
  if (name == "piloc") return PolicyKind::Piloc;
  if (name == "frontier") return PolicyKind::Frontier;
  if (name == "random") return PolicyKind::Random;
  throw std::invalid_argument("unknown policy '" + std::string(name) + "'");
}

json to_json(const EpisodeConfig& c) {
  return {{"num_agents", c.num_agents},
          {"num_targets", c.num_targets},
          {"perception_radius", c.perception_radius},
          {"comm_range", c.comm_range},
          {"pheromone_window", c.pheromone_window},
          {"step_limit", c.step_limit},
          {"pheromone", c.pheromone_enabled},
          {"comms", c.comms_enabled},
          {"fallback", c.fallback_enabled},
          {"transitive_comms", c.transitive_comms},
          {"time_mark_increment", c.time_mark_increment},
          {"p_max", c.pheromone.p_max},
          {"evaporation", c.pheromone.evaporation}};
}

EpisodeResult run_episode(std::shared_ptr<const GridMap> map, const EpisodeConfig& config,
                          const PolicyHandle& policy, std::uint64_t seed, std::ostream* replay) {
  if (policy.kind == PolicyKind::Piloc && policy.net == nullptr) {
    throw std::invalid_argument("the learned policy needs a network");
  }
  Rng env(derive_seed(seed, 0));
  Rng act(derive_seed(seed, 1));
  WorldState world = reset(map, config, env);
  const std::size_t n = world.agents.size();
  const bool use_fallback = policy.kind == PolicyKind::Piloc && config.fallback_enabled;
  std::vector<FallbackController> fallback(n);

  if (replay) {
    const json header = {{"type", "header"},
                         {"version", 1},
                         {"policy", policy_name(policy.kind)},
                         {"seed", seed},
                         {"map", {{"width", map->width()}, {"height", map->height()}, {"rows", map_rows(*map)}}},
                         {"config", to_json(config)}};
    const json start = {{"type", "reset"},
                        {"agents", positions_json(world.agent_positions())},
                        {"targets", targets_json(world.targets)}};
    *replay << header.dump() << '\n' << start.dump() << '\n';
  }

  EpisodeResult result;
  result.targets_total = world.initial_targets;
  std::vector<Action> actions(n);
  std::vector<bool> overridden(n);
  Status status = Status::Running;
  while (status == Status::Running) {
    for (std::size_t i = 0; i < n; ++i) {
      const AgentState& a = world.agents[i];
      overridden[i] = false;
      if (use_fallback) {
        if (auto forced = fallback[i].decide(a)) {
          actions[i] = *forced;
          overridden[i] = true;
          ++result.fallback_ticks;
          continue;
        }
      }
      switch (policy.kind) {
        case PolicyKind::Piloc: {
          const ObservationStack obs = encode(a.knowledge, a.pos, a.history, world.pheromone,
                                              config.pheromone_window, config.pheromone_enabled);
          actions[i] = sample_action(policy.net->forward(policy.params, obs), act).first;
          break;
        }
        case PolicyKind::Frontier:
          actions[i] = frontier_policy(a.knowledge, a.pos, act);
          break;
        case PolicyKind::Random:
          actions[i] = random_policy(act);
          break;
      }
    }
    const StepInfo info = step(world, actions, env);
    status = info.status;
    double tick_reward = 0.0;
    for (const AgentStepInfo& a : info.agents) tick_reward += a.reward.total;
    result.tick_rewards.push_back(tick_reward);

    if (replay) {
      json acts = json::array(), rewards = json::array(), windows = json::array(),
           flags = json::array(), detections = json::array();
      for (std::size_t i = 0; i < n; ++i) {
        acts.push_back(action_name(actions[i]));
        rewards.push_back(reward_json(info.agents[i].reward));
        windows.push_back({info.agents[i].window_before, info.agents[i].window_after});
        flags.push_back(static_cast<bool>(overridden[i]));
      }
      for (const Detection& d : info.detections) {
        detections.push_back({{"agent", d.agent}, {"target", d.target_id}, {"pos", pos_json(d.where)}});
      }
      const json tick = {{"type", "tick"},
                         {"step", world.step},
                         {"actions", acts},
                         {"agents", positions_json(world.agent_positions())},
                         {"targets", targets_json(world.targets)},
                         {"rewards", rewards},
                         {"detections", detections},
                         {"groups", info.groups},
                         {"fallback", flags},
                         {"window_sums", windows},
                         {"status", status_name(status)}};
      *replay << tick.dump() << '\n';
    }
  }
  result.success = status == Status::AllFound;
  result.steps = world.step;
  result.targets_found = world.found_count;
  if (replay) {
    json summary = to_json(result);
    summary["type"] = "summary";
    *replay << summary.dump() << '\n';
  }
  return result;
}

}  // namespace piloc
