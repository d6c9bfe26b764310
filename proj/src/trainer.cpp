#include "piloc/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "piloc/io.hpp"
#include "piloc/rng.hpp"

namespace piloc {

void TrainConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  if (!(loss.clip > 0.0)) throw std::invalid_argument("clip epsilon must be positive");
  if (!(adam.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (minibatch < 1) throw std::invalid_argument("minibatch must be >= 1");
  if (episodes_per_update < 1) throw std::invalid_argument("episodes_per_update must be >= 1");
  if (max_updates < 0) throw std::invalid_argument("max_updates must be >= 0");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (gae_lambda < 0.0 || gae_lambda > 1.0) throw std::invalid_argument("gae_lambda must lie in [0, 1]");
  curriculum.validate();
}

LayerSpec layer_spec_for(const GridMap& map, const EpisodeConfig& episode, bool shared_trunk) {
  LayerSpec spec = LayerSpec::defaults(map.height(), map.width(), episode.pheromone_window);
  spec.shared_trunk = shared_trunk;
  return spec;
}

Rollout collect_episode(const Network& net, std::span<const double> params,
                        std::shared_ptr<const GridMap> map, const EpisodeConfig& config,
                        std::uint64_t seed, const ValueNormalizer* value_norm) {
  EpisodeConfig cfg = config;
  cfg.fallback_enabled = false;
  Rng env(derive_seed(seed, 0));
  Rng policy(derive_seed(seed, 1));
  WorldState world = reset(std::move(map), cfg, env);
  const std::size_t n = world.agents.size();

  Rollout rollout;
  rollout.trajectories.resize(n);
  std::vector<Action> actions(n);
  std::vector<double> totals(n, 0.0);
  Status status = Status::Running;
  auto value_of = [&](double raw) { return value_norm ? value_norm->denormalize(raw) : raw; };
  auto observation = [&](std::size_t i) {
    const AgentState& a = world.agents[i];
    return encode(a.knowledge, a.pos, a.history, world.pheromone, cfg.pheromone_window,
                  cfg.pheromone_enabled);
  };

  while (status == Status::Running) {
    for (std::size_t i = 0; i < n; ++i) {
      Trajectory& t = rollout.trajectories[i];
      t.observations.push_back(observation(i));
      const NetOutput out = net.forward(params, t.observations.back());
      const auto [action, logp] = sample_action(out, policy);
      actions[i] = action;
      t.actions.push_back(static_cast<int>(action));
      t.log_probs.push_back(logp);
      t.values.push_back(value_of(out.value));
    }
    const StepInfo info = step(world, actions, env);
    status = info.status;
    for (std::size_t i = 0; i < n; ++i) {
      Trajectory& t = rollout.trajectories[i];
      t.rewards.push_back(info.agents[i].reward.total);
      t.dones.push_back(status == Status::AllFound ? 1 : 0);
      totals[i] += info.agents[i].reward.total;
    }
  }
  if (status == Status::StepLimit) {
    for (std::size_t i = 0; i < n; ++i) {
      rollout.trajectories[i].bootstrap_value = value_of(net.forward(params, observation(i)).value);
    }
  }
  rollout.success = status == Status::AllFound;
  rollout.steps = world.step;
  rollout.mean_return = std::accumulate(totals.begin(), totals.end(), 0.0) / static_cast<double>(n);
  return rollout;
}

Trainer::Trainer(std::vector<std::shared_ptr<const GridMap>> maps, EpisodeConfig episode,
                 TrainConfig config, std::uint64_t seed)
    : maps_(std::move(maps)),
      episode_(std::move(episode)),
      config_(config),
      seed_(seed),
      net_([&] {
        if (maps_.empty()) throw std::invalid_argument("training needs at least one map");
        return layer_spec_for(*maps_.front(), episode_, config.shared_trunk);
      }()),
      params_(net_.initialize(derive_seed(seed, 0x5eed))),
      curriculum_(config.curriculum) {
  config_.validate();
  episode_.validate();
  for (const auto& m : maps_) {
    if (m->width() != maps_.front()->width() || m->height() != maps_.front()->height()) {
      throw std::invalid_argument("training maps must share one size");
    }
  }
}

bool Trainer::finished() const {
  if (curriculum_.finished()) return true;
  return config_.max_updates > 0 && updates_ >= config_.max_updates;
}

void Trainer::restore(const Checkpoint& checkpoint) {
  if (!(checkpoint.params.spec == params_.spec)) {
    throw std::invalid_argument("checkpoint layer spec does not match the trainer");
  }
  params_ = checkpoint.params;
  adam_ = checkpoint.optimizer.value_or(AdamState{});
  value_norm_ = ValueNormalizer{};
}

std::vector<Rollout> Trainer::collect(int n_s) {
  EpisodeConfig cfg = episode_;
  cfg.step_limit = n_s;
  const int count = config_.episodes_per_update;
  std::vector<Rollout> rollouts(count);
  const std::uint64_t first = episodes_started_;
  episodes_started_ += count;

  auto run = [&](int e) {
    const std::uint64_t s = derive_seed(seed_, first + e);
    const auto& map = maps_[derive_seed(s, 2) % maps_.size()];
    rollouts[e] = collect_episode(net_, params_.values, map, cfg, s,
                                  config_.value_norm ? &value_norm_ : nullptr);
  };
  const int workers = std::min(config_.workers, count);
  if (workers <= 1) {
    for (int e = 0; e < count; ++e) run(e);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int e = w; e < count; e += workers) run(e);
      });
    }
  }
  return rollouts;
}

UpdateRecord Trainer::update() {
  if (finished()) throw std::logic_error("training already finished");
  UpdateRecord record;
  record.update = updates_;
  record.n_s = curriculum_.step_cap();

  std::vector<Rollout> rollouts = collect(record.n_s);
  RolloutBuffer buffer;
  double return_sum = 0.0;
  int successes = 0;
  for (Rollout& r : rollouts) {
    return_sum += r.mean_return;
    successes += r.success ? 1 : 0;
    for (Trajectory& t : r.trajectories) buffer.add(std::move(t));
  }
  record.mean_return = return_sum / static_cast<double>(rollouts.size());
  record.sr = static_cast<double>(successes) / static_cast<double>(rollouts.size());

  std::vector<PpoSample> samples =
      buffer.build_samples(config_.gamma, config_.use_gae, config_.gae_lambda);
  if (config_.value_norm) {
    std::vector<double> targets(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) targets[i] = samples[i].ret;
    value_norm_.update(targets);
    for (PpoSample& s : samples) {
      s.ret = value_norm_.normalize(s.ret);
      s.value_old = value_norm_.normalize(s.value_old);
    }
  }
  record.samples = static_cast<int>(samples.size());

  const std::vector<double> params_snapshot = params_.values;
  const AdamState adam_snapshot = adam_;
  Rng shuffle(derive_seed(seed_, 0xb0000000ULL + static_cast<std::uint64_t>(updates_)));
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(params_.values.size());
  std::vector<PpoSample> batch;
  int batches = 0;

  try {
    for (int epoch = 0; epoch < config_.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), shuffle);
      for (std::size_t begin = 0; begin < order.size();
           begin += static_cast<std::size_t>(config_.minibatch)) {
        const std::size_t end =
            std::min(order.size(), begin + static_cast<std::size_t>(config_.minibatch));
        batch.clear();
        for (std::size_t k = begin; k < end; ++k) batch.push_back(samples[order[k]]);
        std::fill(grad.begin(), grad.end(), 0.0);
        const ObjectiveTerms terms = ppo_objective(net_, params_.values, batch, config_.loss, grad);
        if (!std::isfinite(terms.total)) {
          throw std::runtime_error("non-finite loss");
        }
        if (auto bad = first_non_finite(grad)) throw NonFiniteGradient(*bad);
        record.grad_norm += clip_grad_norm(grad, config_.max_grad_norm);
        adam_step(adam_, config_.adam, params_.values, grad);
        record.policy_loss += terms.policy;
        record.value_loss += terms.value;
        record.entropy += terms.entropy;
        record.skipped += terms.skipped;
        ++batches;
      }
    }
  } catch (const std::runtime_error& e) {
    params_.values = params_snapshot;
    adam_ = adam_snapshot;
    record.aborted = true;
    record.error = e.what();
  }
  if (batches > 0) {
    record.policy_loss /= batches;
    record.value_loss /= batches;
    record.entropy /= batches;
    record.grad_norm /= batches;
  }

  curriculum_.observe(record.mean_return);
  ++updates_;
  return record;
}

namespace {

nlohmann::json record_json(const UpdateRecord& r) {
  nlohmann::json j = {{"update", r.update},           {"n_s", r.n_s},
          {"mean_return", r.mean_return}, {"sr", r.sr},
          {"policy_loss", r.policy_loss}, {"value_loss", r.value_loss},
          {"entropy", r.entropy},         {"grad_norm", r.grad_norm},
          {"samples", r.samples},         {"skipped", r.skipped},
          {"aborted", r.aborted}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

}  // namespace

PolicyParams train_loop(std::vector<std::shared_ptr<const GridMap>> maps,
                        const EpisodeConfig& episode, const TrainConfig& config,
                        std::uint64_t seed, const std::optional<std::filesystem::path>& out_dir,
                        const UpdateCallback& on_update) {
  Trainer trainer(std::move(maps), episode, config, seed);
  std::ofstream metrics;
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    metrics.open(*out_dir / "metrics.jsonl", std::ios::trunc);
    if (!metrics) throw std::runtime_error("cannot open " + (*out_dir / "metrics.jsonl").string());
  }
  while (!trainer.finished()) {
    const UpdateRecord record = trainer.update();
    if (out_dir) {
      metrics << record_json(record).dump() << '\n';
      metrics.flush();
      if (config.checkpoint_every > 0 && trainer.updates_done() % config.checkpoint_every == 0) {
        save_checkpoint(*out_dir / ("checkpoint_" + std::to_string(trainer.updates_done()) + ".bin"),
                        trainer.params(), &trainer.optimizer());
      }
    }
    if (on_update) on_update(record, trainer);
  }
  if (out_dir) save_checkpoint(*out_dir / "final.bin", trainer.params(), &trainer.optimizer());
  return trainer.params();
}

}  // namespace piloc
