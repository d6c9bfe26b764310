#include "piloc/world.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "piloc/comms.hpp"

namespace piloc {

std::string_view action_name(Action a) {
  switch (a) {
    case Action::Left: return "left";
    case Action::Up: return "up";
    case Action::Right: return "right";
    case Action::Down: return "down";
  }
  return "?";
}

Action action_from_index(int index) {
  if (index < 0 || index >= kNumActions) {
    throw std::out_of_range("action index " + std::to_string(index));
  }
  return static_cast<Action>(index);
}

Action direction_to(Position from, Position to) {
  for (Action a : kAllActions) {
    if (apply(from, a) == to) return a;
  }
  throw std::invalid_argument("cells are not 4-adjacent");
}

std::string_view status_name(Status s) {
  switch (s) {
    case Status::Running: return "running";
    case Status::AllFound: return "all_found";
    case Status::StepLimit: return "step_limit";
  }
  return "?";
}

void EpisodeConfig::validate() const {
  if (num_agents < 1) throw std::invalid_argument("num_agents must be >= 1");
  if (num_targets < 1) throw std::invalid_argument("num_targets must be >= 1");
  if (perception_radius < 1) throw std::invalid_argument("perception radius must be >= 1");
  if (pheromone_window < 3 || pheromone_window % 2 == 0) {
    throw std::invalid_argument("pheromone window must be odd and >= 3");
  }
  if (step_limit < 1) throw std::invalid_argument("step_limit must be >= 1");
  if (comm_range < 0.0) throw std::invalid_argument("comm_range must be >= 0");
}

void AgentState::push_recent(Position p) {
  if (recent.size() == kRecentWindow) recent.erase(recent.begin());
  recent.push_back(p);
}

std::vector<Position> WorldState::agent_positions() const {
  std::vector<Position> out;
  out.reserve(agents.size());
  for (const auto& a : agents) out.push_back(a.pos);
  return out;
}

WorldState reset(std::shared_ptr<const GridMap> map, const EpisodeConfig& config,
                 std::uint64_t seed) {
  Rng rng(seed);
  return reset(std::move(map), config, rng);
}

WorldState reset(std::shared_ptr<const GridMap> map, const EpisodeConfig& config, Rng& rng) {
  config.validate();
  const auto needed = static_cast<std::size_t>(config.num_agents + config.num_targets);
  auto cells = map->free_cells();
  if (cells.size() < needed) {
    throw std::invalid_argument("map has " + std::to_string(cells.size()) +
                                " free cells, need " + std::to_string(needed));
  }
  for (std::size_t i = 0; i < needed; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, cells.size() - 1);
    std::swap(cells[i], cells[pick(rng)]);
  }

  WorldState state{
      .map = map,
      .config = config,
      .agents = {},
      .targets = {},
      .pheromone = PheromoneField(map->width(), map->height(), config.pheromone),
      .step = 0,
      .found_count = 0,
      .initial_targets = config.num_targets,
  };
  for (int a = 0; a < config.num_agents; ++a) {
    const Position p = cells[a];
    AgentState agent{p, {p, p}, KnowledgeMaps(map->width(), map->height()), {}};
    agent.push_recent(p);
    state.agents.push_back(std::move(agent));
  }
  for (int t = 0; t < config.num_targets; ++t) {
    state.targets.push_back({t, cells[config.num_agents + t]});
  }
  return state;
}

void step_targets(WorldState& state, Rng& rng) {
  for (Target& t : state.targets) {
    const auto options = state.map->neighbors4(t.pos);
    if (options.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
    t.pos = options[pick(rng)];
  }
}

std::vector<MoveOutcome> step_agents(WorldState& state, std::span<const Action> actions) {
  if (actions.size() != state.agents.size()) {
    throw std::invalid_argument("expected " + std::to_string(state.agents.size()) +
                                " actions, got " + std::to_string(actions.size()));
  }
  std::vector<MoveOutcome> outcomes(actions.size());
  for (std::size_t i = 0; i < actions.size(); ++i) {
    AgentState& agent = state.agents[i];
    const Position target = apply(agent.pos, actions[i]);
    agent.history[1] = agent.history[0];
    agent.history[0] = agent.pos;
    if (state.map->is_free(target)) {
      agent.pos = target;
      outcomes[i] = MoveOutcome::Moved;
    } else {
      outcomes[i] = MoveOutcome::Collided;
    }
    agent.push_recent(agent.pos);
  }
  return outcomes;
}

std::vector<Detection> detect_targets(WorldState& state) {
  std::vector<Detection> detections;
  const int v = state.config.perception_radius;
  std::vector<Target> remaining;
  remaining.reserve(state.targets.size());
  for (const Target& t : state.targets) {
    int best = -1;
    int best_dist = 0;
    for (std::size_t a = 0; a < state.agents.size(); ++a) {
      const int d = chebyshev(state.agents[a].pos, t.pos);
      if (d <= v && (best < 0 || d < best_dist)) {
        best = static_cast<int>(a);
        best_dist = d;
      }
    }
    if (best >= 0) {
      detections.push_back({best, t.id, t.pos});
    } else {
      remaining.push_back(t);
    }
  }
  state.found_count += static_cast<int>(detections.size());
  state.targets = std::move(remaining);
  return detections;
}

Status is_done(const WorldState& state, const EpisodeConfig& config) {
  if (state.targets.empty()) return Status::AllFound;
  if (state.step >= config.step_limit) return Status::StepLimit;
  return Status::Running;
}

StepInfo step(WorldState& state, std::span<const Action> actions, Rng& rng) {
  if (is_done(state, state.config) != Status::Running) {
    throw std::logic_error("step called on a finished episode");
  }
  const EpisodeConfig& cfg = state.config;
  const GridMap& map = *state.map;
  StepInfo info;
  info.agents.resize(state.agents.size());
  for (std::size_t i = 0; i < state.agents.size(); ++i) {
    info.agents[i].previous = state.agents[i].pos;
  }

  const auto outcomes = step_agents(state, actions);
  step_targets(state, rng);

  const auto positions = state.agent_positions();
  state.pheromone.deposit(positions);
  state.pheromone.evaporate();

  for (std::size_t i = 0; i < state.agents.size(); ++i) {
    AgentState& agent = state.agents[i];
    agent.knowledge.age_marks(cfg.time_mark_increment);
    ObservationUpdate update = observe(map, agent.knowledge, agent.pos, cfg.perception_radius);
    info.agents[i].action = actions[i];
    info.agents[i].outcome = outcomes[i];
    info.agents[i].new_free_cells = update.new_free_cells;
    info.agents[i].prior_marks = std::move(update.prior_marks);
  }

  info.detections = detect_targets(state);
  for (const Detection& d : info.detections) ++info.agents[d.agent].detections;

  if (cfg.comms_enabled) {
    std::vector<KnowledgeMaps*> maps;
    maps.reserve(state.agents.size());
    for (auto& a : state.agents) maps.push_back(&a.knowledge);
    info.groups = communicate(maps, positions, cfg.comm_range, cfg.transitive_comms);
  } else {
    for (std::size_t i = 0; i < state.agents.size(); ++i) {
      info.groups.push_back({static_cast<int>(i)});
    }
  }

  for (std::size_t i = 0; i < state.agents.size(); ++i) {
    AgentStepInfo& a = info.agents[i];
    const bool found = a.detections > 0;
    const double r_e = exploration_reward(a.new_free_cells, cfg.reward);
    const double r_re = re_exploration_reward(a.prior_marks, found, cfg.reward);
    const double r_co = collision_penalty(a.outcome == MoveOutcome::Collided, cfg.reward);
    double r_ph = 0.0;
    if (cfg.pheromone_enabled) {
      a.window_before = state.pheromone.window_sum(a.previous, cfg.perception_radius);
      a.window_after = state.pheromone.window_sum(state.agents[i].pos, cfg.perception_radius);
      r_ph = pheromone_reward(a.window_before, a.window_after, cfg.reward);
    }
    const double bonus = cfg.reward.target_found_bonus * a.detections;
    a.reward = compose_reward(r_e, r_re, r_co, r_ph, bonus);
  }

  ++state.step;
  info.status = is_done(state, cfg);
  return info;
}

}  // namespace piloc
