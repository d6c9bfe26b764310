#include "piloc/pheromone.hpp"

#include <algorithm>
#include <stdexcept>

namespace piloc {

PheromoneField::PheromoneField(int width, int height, PheromoneParams params)
    : width_(width),
      height_(height),
      params_(params),
      values_(static_cast<std::size_t>(width) * height, 0.0) {
  if (params_.p_max <= 0.0) throw std::invalid_argument("p_max must be positive");
  if (params_.evaporation < 0.0 || params_.evaporation > 1.0) {
    throw std::invalid_argument("evaporation rate must lie in [0, 1]");
  }
}

void PheromoneField::set(Position p, double value) {
  if (!(value >= 0.0 && value <= params_.p_max)) {
    throw std::invalid_argument("pheromone value outside [0, p_max]");
  }
  values_[index(p)] = value;
}

void PheromoneField::deposit(std::span<const Position> agents) {
  for (const Position& p : agents) values_[index(p)] += 1.0;
  for (const Position& p : agents) {
    double& v = values_[index(p)];
    v = std::min(v, params_.p_max);
  }
}

void PheromoneField::evaporate() {
  const double keep = 1.0 - params_.evaporation;
  for (double& v : values_) v *= keep;
}

std::vector<double> PheromoneField::window(Position center, int side) const {
  std::vector<double> out(static_cast<std::size_t>(side) * side);
  window_into(center, side, out);
  return out;
}

void PheromoneField::window_into(Position center, int side, std::span<double> out) const {
  if (side < 1 || side % 2 == 0) throw std::invalid_argument("window side must be odd");
  const int half = side / 2;
  std::size_t k = 0;
  for (int dy = -half; dy <= half; ++dy) {
    for (int dx = -half; dx <= half; ++dx) {
      const int x = center.x + dx;
      const int y = center.y + dy;
      const bool inside = x >= 0 && y >= 0 && x < width_ && y < height_;
      out[k++] = inside ? values_[static_cast<std::size_t>(y) * width_ + x] : params_.p_max;
    }
  }
}

double PheromoneField::window_sum(Position center, int radius) const {
  double sum = 0.0;
  const int y0 = std::max(0, center.y - radius);
  const int y1 = std::min(height_ - 1, center.y + radius);
  const int x0 = std::max(0, center.x - radius);
  const int x1 = std::min(width_ - 1, center.x + radius);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) sum += values_[static_cast<std::size_t>(y) * width_ + x];
  }
  return sum;
}

double PheromoneField::max_value() const {
  return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

}  // namespace piloc
