#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "piloc/network.hpp"
#include "piloc/perception.hpp"

namespace piloc {

// Discounted returns of one trajectory: R_t = r_t + gamma * R_{t+1}, cut at
// steps flagged done, seeded with `bootstrap` (V(s_T)) after the last step
// unless that step is done.
std::vector<double> compute_returns(std::span<const double> rewards,
                                    std::span<const std::uint8_t> dones, double bootstrap,
                                    double gamma);

// Generalized advantage estimation (off by default; see TrainConfig).
std::vector<double> compute_gae(std::span<const double> rewards, std::span<const double> values,
                                std::span<const std::uint8_t> dones, double bootstrap,
                                double gamma, double lambda);

// A_t = R_t - V(s_t).
std::vector<double> compute_advantages(std::span<const double> returns,
                                       std::span<const double> values);

// In-place standardisation to mean 0, std 1 (population std, floored at 1e-8).
void normalize_advantages(std::span<double> advantages);

// min(r A, clip(r, 1-eps, 1+eps) A).
double clipped_surrogate(double ratio, double advantage, double eps);

// max((V - R)^2, (clip(V, V_old - eps, V_old + eps) - R)^2).
double clipped_value_error(double value, double value_old, double ret, double eps);

struct PolicyLossResult {
  double loss = 0.0;
  int skipped = 0;
};

// -(1/n) sum clipped_surrogate - entropy_coef * mean(entropy). Samples whose
// ratio is non-finite are skipped and counted.
PolicyLossResult policy_loss(std::span<const double> log_probs_new,
                             std::span<const double> log_probs_old,
                             std::span<const double> advantages, double eps,
                             double entropy_coef = 0.0,
                             std::span<const double> entropies = {});

double value_loss(std::span<const double> values_new, std::span<const double> values_old,
                  std::span<const double> returns, double eps);

// One per-agent decision recorded during a rollout.
struct PpoSample {
  const ObservationStack* obs = nullptr;
  int action = 0;
  double log_prob_old = 0.0;
  double value_old = 0.0;
  double ret = 0.0;
  double advantage = 0.0;
};

struct LossWeights {
  double clip = 0.2;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
};

struct ObjectiveTerms {
  double total = 0.0;
  double policy = 0.0;  // clipped surrogate part, already negated
  double value = 0.0;
  double entropy = 0.0;
  int skipped = 0;
};

// total = policy_loss + value_coef * value_loss - entropy_coef * entropy over
// the batch. When `grad` is non-empty, accumulates d total / d params into it.
ObjectiveTerms ppo_objective(const Network& net, std::span<const double> params,
                             std::span<const PpoSample> batch, const LossWeights& weights,
                             std::span<double> grad = {});

// One agent's trajectory within one episode.
struct Trajectory {
  std::vector<ObservationStack> observations;
  std::vector<int> actions;
  std::vector<double> log_probs;
  std::vector<double> values;
  std::vector<double> rewards;
  std::vector<std::uint8_t> dones;
  double bootstrap_value = 0.0;  // V(s_T) on truncation, 0 on termination
};

// Running mean and variance of value targets, merged batch by batch. With no
// data it is the identity.
class ValueNormalizer {
 public:
  void update(std::span<const double> targets);
  double normalize(double value) const { return (value - mean_) / stddev(); }
  double denormalize(double value) const { return value * stddev() + mean_; }
  double mean() const { return mean_; }
  double stddev() const;
  double count() const { return count_; }

 private:
  double mean_ = 0.0;
  double m2_ = 0.0;
  double count_ = 0.0;
};

// Per-step transitions of a rollout wave.
class RolloutBuffer {
 public:
  void add(Trajectory trajectory);
  std::size_t size() const;
  std::size_t trajectory_count() const { return trajectories_.size(); }
  const std::vector<Trajectory>& trajectories() const { return trajectories_; }

  // Returns, advantages (normalized across the whole buffer) and flattened
  // samples. Pointers stay valid while the buffer lives.
  std::vector<PpoSample> build_samples(double gamma, bool use_gae, double gae_lambda) const;

 private:
  std::vector<Trajectory> trajectories_;
};

}  // namespace piloc
