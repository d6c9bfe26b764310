#pragma once

#include <optional>
#include <span>
#include <vector>

#include "piloc/grid_map.hpp"
#include "piloc/perception.hpp"
#include "piloc/world.hpp"

namespace piloc {

inline constexpr int kTrapVisitThreshold = 3;
inline constexpr int kDisengageTicks = 10;

// True when some position occurs more than 3 times in the buffer.
bool is_trapped(std::span<const Position> recent);

// Cells that are Free or Unknown in M_o (optimistic planning).
bool optimistic_passable(const KnowledgeMaps& maps, Position p);

// Known-free cell (other than `pos`) with the largest time mark, reachable
// over known-free cells; ties by path distance, then row-major.
std::optional<Position> stalest_known_cell(const KnowledgeMaps& maps, Position pos);

// Nearest Unknown cell by optimistic path distance (row-major ties); when no
// Unknown cell is reachable, the stalest known-free cell.
std::optional<Position> select_recovery_goal(const KnowledgeMaps& maps, Position pos);

// Test-time override of the network: engages when the agent is trapped,
// follows an A* path to the recovery goal, and disengages at the goal or
// after 10 consecutive untrapped ticks.
class FallbackController {
 public:
  // Override action for this tick, or nullopt to use the network.
  std::optional<Action> decide(const AgentState& agent);

  bool engaged() const { return engaged_; }
  std::optional<Position> goal() const {
    return engaged_ ? std::optional<Position>(goal_) : std::nullopt;
  }
  const std::vector<Position>& path() const { return path_; }
  int replans() const { return replans_; }

 private:
  bool plan(const AgentState& agent);
  bool path_valid(const KnowledgeMaps& maps) const;
  void disengage();

  bool engaged_ = false;
  Position goal_;
  std::vector<Position> path_;
  int untrapped_ticks_ = 0;
  int replans_ = 0;
};

}  // namespace piloc
