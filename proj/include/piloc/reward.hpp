#pragma once

#include <span>

namespace piloc {

// How the -1 in the re-exploration term binds.
enum class ReExplorationForm {
  // 0.01 * sum(1 + v/0.3) - 1
  OffsetAfterSum,
  // 0.01 * sum((1 + v/0.3) - 1)
  OffsetInsideSum,
};

struct RewardParams {
  double exploration_per_cell = 0.5;
  double found_reward = 0.1;
  double mark_weight = 0.01;
  double collision_penalty = 3.0;
  double alpha = 0.1;
  double beta = 0.1;
  double target_found_bonus = 0.0;
  ReExplorationForm re_exploration_form = ReExplorationForm::OffsetAfterSum;
};

inline constexpr double kPheromoneEpsilon = 1e-9;

struct RewardBreakdown {
  double r_e = 0.0;
  double r_re = 0.0;
  double r_co = 0.0;  // magnitude; subtracted in the total
  double r_ph = 0.0;
  double bonus = 0.0;
  double total = 0.0;
};

double exploration_reward(int new_free_cells, const RewardParams& params = {});

// `marks` are the time marks of explored free cells in view; `found` means
// the agent was credited a detection this tick.
double re_exploration_reward(std::span<const double> marks, bool found,
                             const RewardParams& params = {});

double collision_penalty(bool collided, const RewardParams& params = {});

// Window sums before and after the move, read from the same field snapshot.
// The relative term is dropped when the previous sum is ~0.
double pheromone_reward(double previous, double current, const RewardParams& params = {});

// total = r_e + r_re - r_co + r_ph + bonus (bonus defaults to 0).
RewardBreakdown compose_reward(double r_e, double r_re, double r_co, double r_ph,
                               double bonus = 0.0);

}  // namespace piloc
