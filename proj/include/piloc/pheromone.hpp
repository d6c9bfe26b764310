#pragma once

#include <span>
#include <vector>

#include "piloc/grid_map.hpp"

namespace piloc {

struct PheromoneParams {
  double p_max = 10.0;
  double evaporation = 0.02;
};

// Global stigmergic field. Every cell stays within [0, p_max].
class PheromoneField {
 public:
  PheromoneField(int width, int height, PheromoneParams params = {});

  int width() const { return width_; }
  int height() const { return height_; }
  const PheromoneParams& params() const { return params_; }
  std::span<const double> values() const { return values_; }

  double at(Position p) const { return values_[index(p)]; }
  // Test and replay hook; value must lie in [0, p_max].
  void set(Position p, double value);

  // +1 per agent on its cell (co-located agents stack), then clamp to p_max.
  void deposit(std::span<const Position> agents);
  // P <- P * (1 - lambda) everywhere.
  void evaporate();

  // side x side patch centred on `center`, row-major. Off-map entries read p_max.
  std::vector<double> window(Position center, int side) const;
  void window_into(Position center, int side, std::span<double> out) const;

  // Sum over the in-bounds Chebyshev window of the given radius.
  double window_sum(Position center, int radius) const;

  double max_value() const;

 private:
  std::size_t index(Position p) const {
    return static_cast<std::size_t>(p.y) * width_ + p.x;
  }

  int width_;
  int height_;
  PheromoneParams params_;
  std::vector<double> values_;
};

}  // namespace piloc
