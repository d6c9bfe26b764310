#pragma once

#include <span>

#include "piloc/network.hpp"

namespace piloc {

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam update; state is sized on first use.
void adam_step(AdamState& state, const AdamConfig& config, std::span<double> params,
               std::span<const double> grad);

// Rescales `grad` so its L2 norm is at most `max_norm`; returns the norm
// before clipping. A non-positive max_norm disables clipping.
double clip_grad_norm(std::span<double> grad, double max_norm);

}  // namespace piloc
