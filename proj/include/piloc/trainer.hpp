#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "piloc/adam.hpp"
#include "piloc/curriculum.hpp"
#include "piloc/grid_map.hpp"
#include "piloc/mappo.hpp"
#include "piloc/network.hpp"
#include "piloc/world.hpp"

namespace piloc {

struct TrainConfig {
  double gamma = 0.99;
  LossWeights loss;
  AdamConfig adam;
  double max_grad_norm = 0.5;
  int epochs = 4;
  int minibatch = 256;
  CurriculumConfig curriculum;
  int episodes_per_update = 8;
  int max_updates = 0;  // 0: run until the curriculum finishes
  int checkpoint_every = 10;
  bool use_gae = false;
  double gae_lambda = 0.95;
  bool shared_trunk = true;
  // Critic regresses running-normalized targets; value clipping then acts in
  // normalized units.
  bool value_norm = true;
  int workers = 1;

  void validate() const;
};

struct UpdateRecord {
  int update = 0;
  int n_s = 0;
  double mean_return = 0.0;
  double sr = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double grad_norm = 0.0;
  int samples = 0;
  int skipped = 0;
  bool aborted = false;
  std::string error;  // diagnostics of an aborted update
};

// One collected episode: a trajectory per agent plus its outcome.
struct Rollout {
  std::vector<Trajectory> trajectories;
  double mean_return = 0.0;  // undiscounted, averaged over agents
  bool success = false;
  int steps = 0;
};

// Plays one training episode with the stochastic policy. Every agent uses the
// same parameters; the fallback controller is never consulted. Stored values
// are denormalized through `value_norm` when given.
Rollout collect_episode(const Network& net, std::span<const double> params,
                        std::shared_ptr<const GridMap> map, const EpisodeConfig& config,
                        std::uint64_t seed, const ValueNormalizer* value_norm = nullptr);

class Trainer {
 public:
  Trainer(std::vector<std::shared_ptr<const GridMap>> maps, EpisodeConfig episode,
          TrainConfig config, std::uint64_t seed);

  // One rollout wave, K epochs of minibatch updates, then a curriculum check.
  UpdateRecord update();

  bool finished() const;
  int updates_done() const { return updates_; }
  const Network& network() const { return net_; }
  const PolicyParams& params() const { return params_; }
  const AdamState& optimizer() const { return adam_; }
  const Curriculum& curriculum() const { return curriculum_; }
  const ValueNormalizer& value_normalizer() const { return value_norm_; }

  // Replaces parameters and optimizer state, e.g. when resuming. Value
  // normalization statistics restart from the next wave.
  void restore(const Checkpoint& checkpoint);

 private:
  std::vector<Rollout> collect(int n_s);

  std::vector<std::shared_ptr<const GridMap>> maps_;
  EpisodeConfig episode_;
  TrainConfig config_;
  std::uint64_t seed_;
  Network net_;
  PolicyParams params_;
  AdamState adam_;
  Curriculum curriculum_;
  ValueNormalizer value_norm_;
  int updates_ = 0;
  std::uint64_t episodes_started_ = 0;
};

using UpdateCallback = std::function<void(const UpdateRecord&, const Trainer&)>;

// Runs updates until the curriculum or the update budget ends. When `out_dir`
// is set, writes metrics.jsonl, periodic checkpoint_<n>.bin and final.bin.
PolicyParams train_loop(std::vector<std::shared_ptr<const GridMap>> maps,
                        const EpisodeConfig& episode, const TrainConfig& config,
                        std::uint64_t seed,
                        const std::optional<std::filesystem::path>& out_dir = std::nullopt,
                        const UpdateCallback& on_update = {});

LayerSpec layer_spec_for(const GridMap& map, const EpisodeConfig& episode, bool shared_trunk);

}  // namespace piloc
