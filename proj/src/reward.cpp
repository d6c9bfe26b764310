#include "piloc/reward.hpp"

namespace piloc {

double exploration_reward(int new_free_cells, const RewardParams& params) {
  return params.exploration_per_cell * new_free_cells;
}

double re_exploration_reward(std::span<const double> marks, bool found,
                             const RewardParams& params) {
  if (found) return params.found_reward;
  double sum = 0.0;
  switch (params.re_exploration_form) {
    case ReExplorationForm::OffsetAfterSum:
      for (double v : marks) sum += 1.0 + v / 0.3;
      return params.mark_weight * sum - 1.0;
    case ReExplorationForm::OffsetInsideSum:
      for (double v : marks) sum += v / 0.3;
      return params.mark_weight * sum;
  }
  return 0.0;
}

double collision_penalty(bool collided, const RewardParams& params) {
  return collided ? params.collision_penalty : 0.0;
}

double pheromone_reward(double previous, double current, const RewardParams& params) {
  const double drop = previous - current;
  if (previous > kPheromoneEpsilon) {
    return params.alpha * drop / previous + params.beta * drop;
  }
  return params.beta * drop;
}

RewardBreakdown compose_reward(double r_e, double r_re, double r_co, double r_ph,
                               double bonus) {
  return {r_e, r_re, r_co, r_ph, bonus, r_e + r_re - r_co + r_ph + bonus};
}

}  // namespace piloc
