#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "piloc/grid_map.hpp"
#include "piloc/perception.hpp"
#include "piloc/pheromone.hpp"
#include "piloc/reward.hpp"
#include "piloc/rng.hpp"

namespace piloc {

// Index-stable: the network's output i corresponds to Action(i).
enum class Action : std::uint8_t { Left = 0, Up = 1, Right = 2, Down = 3 };
inline constexpr int kNumActions = 4;
inline constexpr std::array<Action, kNumActions> kAllActions = {Action::Left, Action::Up,
                                                                Action::Right, Action::Down};

inline Position apply(Position p, Action a) {
  switch (a) {
    case Action::Left: return {p.x - 1, p.y};
    case Action::Up: return {p.x, p.y - 1};
    case Action::Right: return {p.x + 1, p.y};
    case Action::Down: return {p.x, p.y + 1};
  }
  return p;
}

std::string_view action_name(Action a);
Action action_from_index(int index);

// Action moving `from` onto the 4-adjacent cell `to`.
Action direction_to(Position from, Position to);

struct EpisodeConfig {
  int num_agents = 2;
  int num_targets = 6;
  int perception_radius = 5;
  double comm_range = 10.0;
  int pheromone_window = 11;
  int step_limit = 250;
  bool pheromone_enabled = true;
  bool comms_enabled = true;
  bool fallback_enabled = true;
  bool transitive_comms = true;
  double time_mark_increment = kTimeMarkIncrement;
  PheromoneParams pheromone;
  RewardParams reward;

  // Throws std::invalid_argument on a violated invariant.
  void validate() const;
};

inline constexpr std::size_t kRecentWindow = 10;

struct AgentState {
  Position pos;
  std::array<Position, 2> history;  // [0] one tick ago, [1] two ticks ago
  KnowledgeMaps knowledge;
  std::vector<Position> recent;  // last <= 10 positions, oldest first

  void push_recent(Position p);
};

struct Target {
  int id = 0;
  Position pos;
};

struct WorldState {
  std::shared_ptr<const GridMap> map;
  EpisodeConfig config;
  std::vector<AgentState> agents;
  std::vector<Target> targets;  // live targets only
  PheromoneField pheromone;
  int step = 0;
  int found_count = 0;
  int initial_targets = 0;

  std::vector<Position> agent_positions() const;
};

enum class MoveOutcome : std::uint8_t { Moved, Collided };

enum class Status : std::uint8_t { Running, AllFound, StepLimit };
std::string_view status_name(Status s);

struct Detection {
  int agent = 0;
  int target_id = 0;
  Position where;
};

struct AgentStepInfo {
  Position previous;
  Action action = Action::Left;
  MoveOutcome outcome = MoveOutcome::Moved;
  int new_free_cells = 0;
  std::vector<double> prior_marks;
  int detections = 0;
  double window_before = 0.0;
  double window_after = 0.0;
  RewardBreakdown reward;
};

struct StepInfo {
  std::vector<AgentStepInfo> agents;
  std::vector<Detection> detections;
  std::vector<std::vector<int>> groups;
  Status status = Status::Running;
};

// Places agents then targets uniformly on distinct free cells. Knowledge maps
// start all-unknown and the pheromone field all-zero.
WorldState reset(std::shared_ptr<const GridMap> map, const EpisodeConfig& config,
                 std::uint64_t seed);
WorldState reset(std::shared_ptr<const GridMap> map, const EpisodeConfig& config, Rng& rng);

// Each live target moves to a uniformly chosen free neighbour, or stays put
// when it has none.
void step_targets(WorldState& state, Rng& rng);

// Obstacles and the border block moves; agents never block each other.
std::vector<MoveOutcome> step_agents(WorldState& state, std::span<const Action> actions);

// Removes every target within Chebyshev distance v of some agent, crediting
// the nearest agent (lowest index on ties).
std::vector<Detection> detect_targets(WorldState& state);

Status is_done(const WorldState& state, const EpisodeConfig& config);

// One synchronous tick: agents move, targets move, pheromone deposit then
// evaporation, aging and perception, detection, communication, rewards,
// termination.
StepInfo step(WorldState& state, std::span<const Action> actions, Rng& rng);

}  // namespace piloc
