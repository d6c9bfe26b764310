#include "piloc/mappo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace piloc {
namespace {

void require_aligned(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string("misaligned arrays: ") + what);
}

}  // namespace

std::vector<double> compute_returns(std::span<const double> rewards,
                                    std::span<const std::uint8_t> dones, double bootstrap,
                                    double gamma) {
  require_aligned(rewards.size(), dones.size(), "rewards/dones");
  std::vector<double> out(rewards.size());
  double running = bootstrap;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    if (dones[t]) running = 0.0;
    running = rewards[t] + gamma * running;
    out[t] = running;
  }
  return out;
}

std::vector<double> compute_gae(std::span<const double> rewards, std::span<const double> values,
                                std::span<const std::uint8_t> dones, double bootstrap,
                                double gamma, double lambda) {
  require_aligned(rewards.size(), dones.size(), "rewards/dones");
  require_aligned(rewards.size(), values.size(), "rewards/values");
  std::vector<double> adv(rewards.size());
  double next_value = bootstrap;
  double gae = 0.0;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    const double live = dones[t] ? 0.0 : 1.0;
    const double delta = rewards[t] + gamma * next_value * live - values[t];
    gae = delta + gamma * lambda * live * gae;
    adv[t] = gae;
    next_value = values[t];
  }
  return adv;
}

std::vector<double> compute_advantages(std::span<const double> returns,
                                       std::span<const double> values) {
  require_aligned(returns.size(), values.size(), "returns/values");
  std::vector<double> out(returns.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = returns[i] - values[i];
  return out;
}

void normalize_advantages(std::span<double> advantages) {
  if (advantages.empty()) return;
  const double n = static_cast<double>(advantages.size());
  const double mean = std::accumulate(advantages.begin(), advantages.end(), 0.0) / n;
  double var = 0.0;
  for (double a : advantages) var += (a - mean) * (a - mean);
  const double std = std::max(std::sqrt(var / n), 1e-8);
  for (double& a : advantages) a = (a - mean) / std;
}

double clipped_surrogate(double ratio, double advantage, double eps) {
  const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
  return std::min(ratio * advantage, clipped * advantage);
}

double clipped_value_error(double value, double value_old, double ret, double eps) {
  const double clipped = std::clamp(value, value_old - eps, value_old + eps);
  const double a = (value - ret) * (value - ret);
  const double b = (clipped - ret) * (clipped - ret);
  return std::max(a, b);
}

PolicyLossResult policy_loss(std::span<const double> log_probs_new,
                             std::span<const double> log_probs_old,
                             std::span<const double> advantages, double eps,
                             double entropy_coef, std::span<const double> entropies) {
  require_aligned(log_probs_new.size(), log_probs_old.size(), "log-probs");
  require_aligned(log_probs_new.size(), advantages.size(), "log-probs/advantages");
  if (!entropies.empty()) require_aligned(entropies.size(), advantages.size(), "entropies");
  PolicyLossResult result;
  const std::size_t n = advantages.size();
  if (n == 0) return result;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ratio = std::exp(log_probs_new[i] - log_probs_old[i]);
    if (!std::isfinite(ratio)) {
      ++result.skipped;
      continue;
    }
    sum += clipped_surrogate(ratio, advantages[i], eps);
  }
  result.loss = -sum / static_cast<double>(n);
  if (!entropies.empty()) {
    result.loss -= entropy_coef *
                   std::accumulate(entropies.begin(), entropies.end(), 0.0) /
                   static_cast<double>(n);
  }
  return result;
}

double value_loss(std::span<const double> values_new, std::span<const double> values_old,
                  std::span<const double> returns, double eps) {
  require_aligned(values_new.size(), values_old.size(), "values");
  require_aligned(values_new.size(), returns.size(), "values/returns");
  if (values_new.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < values_new.size(); ++i) {
    sum += clipped_value_error(values_new[i], values_old[i], returns[i], eps);
  }
  return sum / static_cast<double>(values_new.size());
}

ObjectiveTerms ppo_objective(const Network& net, std::span<const double> params,
                             std::span<const PpoSample> batch, const LossWeights& weights,
                             std::span<double> grad) {
  ObjectiveTerms terms;
  if (batch.empty()) return terms;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  const double eps = weights.clip;
  thread_local ForwardCache cache;
  std::array<double, kNumActions> d_logits{};

  for (const PpoSample& s : batch) {
    const NetOutput out = net.forward(params, *s.obs, grad.empty() ? nullptr : &cache);
    const double logp = out.log_probs[s.action];
    const double ratio = std::exp(logp - s.log_prob_old);
    const double h = entropy(out);
    d_logits.fill(0.0);

    if (std::isfinite(ratio)) {
      const double unclipped = ratio * s.advantage;
      const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps) * s.advantage;
      terms.policy -= std::min(unclipped, clipped) * inv_n;
      // d(-min)/d logp: the unclipped branch carries ratio*A, the clipped
      // branch is flat.
      const double d_logp = unclipped <= clipped ? -unclipped * inv_n : 0.0;
      for (int a = 0; a < kNumActions; ++a) {
        d_logits[a] += d_logp * ((a == s.action ? 1.0 : 0.0) - out.probs[a]);
      }
    } else {
      ++terms.skipped;
    }

    terms.entropy += h * inv_n;
    // d(-c H)/dz_j = c * p_j (log p_j + H)
    for (int a = 0; a < kNumActions; ++a) {
      d_logits[a] += weights.entropy_coef * inv_n * out.probs[a] * (out.log_probs[a] + h);
    }

    const double v = out.value;
    const double vc = std::clamp(v, s.value_old - eps, s.value_old + eps);
    const double e1 = (v - s.ret) * (v - s.ret);
    const double e2 = (vc - s.ret) * (vc - s.ret);
    terms.value += std::max(e1, e2) * inv_n;
    const double d_value = e1 >= e2 ? weights.value_coef * inv_n * 2.0 * (v - s.ret) : 0.0;

    if (!grad.empty()) net.backward(params, cache, d_logits, d_value, grad);
  }
  terms.total = terms.policy + weights.value_coef * terms.value - weights.entropy_coef * terms.entropy;
  return terms;
}

void ValueNormalizer::update(std::span<const double> targets) {
  if (targets.empty()) return;
  const double n = static_cast<double>(targets.size());
  const double batch_mean = std::accumulate(targets.begin(), targets.end(), 0.0) / n;
  double batch_m2 = 0.0;
  for (double t : targets) batch_m2 += (t - batch_mean) * (t - batch_mean);
  const double total = count_ + n;
  const double delta = batch_mean - mean_;
  mean_ += delta * n / total;
  m2_ += batch_m2 + delta * delta * count_ * n / total;
  count_ = total;
}

double ValueNormalizer::stddev() const {
  if (count_ < 2.0) return 1.0;
  return std::max(std::sqrt(m2_ / count_), 1e-4);
}

void RolloutBuffer::add(Trajectory trajectory) {
  const std::size_t n = trajectory.rewards.size();
  if (trajectory.observations.size() != n || trajectory.actions.size() != n ||
      trajectory.log_probs.size() != n || trajectory.values.size() != n ||
      trajectory.dones.size() != n) {
    throw std::invalid_argument("trajectory arrays are misaligned");
  }
  for (double lp : trajectory.log_probs) {
    if (!std::isfinite(lp) || lp > 0.0) throw std::invalid_argument("invalid stored log-probability");
  }
  trajectories_.push_back(std::move(trajectory));
}

std::size_t RolloutBuffer::size() const {
  std::size_t n = 0;
  for (const auto& t : trajectories_) n += t.rewards.size();
  return n;
}

std::vector<PpoSample> RolloutBuffer::build_samples(double gamma, bool use_gae,
                                                    double gae_lambda) const {
  std::vector<PpoSample> samples;
  samples.reserve(size());
  for (const auto& t : trajectories_) {
    std::vector<double> returns;
    std::vector<double> adv;
    if (use_gae) {
      adv = compute_gae(t.rewards, t.values, t.dones, t.bootstrap_value, gamma, gae_lambda);
      returns.resize(adv.size());
      for (std::size_t i = 0; i < adv.size(); ++i) returns[i] = adv[i] + t.values[i];
    } else {
      returns = compute_returns(t.rewards, t.dones, t.bootstrap_value, gamma);
      adv = compute_advantages(returns, t.values);
    }
    for (std::size_t i = 0; i < t.rewards.size(); ++i) {
      samples.push_back({&t.observations[i], t.actions[i], t.log_probs[i], t.values[i],
                         returns[i], adv[i]});
    }
  }
  std::vector<double> adv(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) adv[i] = samples[i].advantage;
  normalize_advantages(adv);
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i].advantage = adv[i];
  return samples;
}

}  // namespace piloc
