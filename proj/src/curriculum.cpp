#include "piloc/curriculum.hpp"

#include <algorithm>
#include <stdexcept>

namespace piloc {

void CurriculumConfig::validate() const {
  if (start < 1) throw std::invalid_argument("curriculum start must be >= 1");
  if (increment < 0) throw std::invalid_argument("curriculum increment must be >= 0");
  if (cap < start) throw std::invalid_argument("curriculum cap must be >= start");
  if (patience < 1) throw std::invalid_argument("curriculum patience must be >= 1");
}

Curriculum::Curriculum(CurriculumConfig config) : config_(config), step_cap_(config.start) {
  config_.validate();
}

bool Curriculum::observe(double mean_return) {
  if (finished_) return false;
  if (mean_return > best_) {
    best_ = mean_return;
    stale_ = 0;
    return false;
  }
  if (++stale_ < config_.patience) return false;
  if (step_cap_ >= config_.cap || config_.increment == 0) {
    finished_ = true;
    return false;
  }
  step_cap_ = std::min(step_cap_ + config_.increment, config_.cap);
  stale_ = 0;
  best_ = -std::numeric_limits<double>::infinity();
  return true;
}

}  // namespace piloc
