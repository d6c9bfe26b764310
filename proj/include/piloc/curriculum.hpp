#pragma once

#include <limits>

namespace piloc {

struct CurriculumConfig {
  int start = 10;
  int increment = 10;
  int cap = 260;
  int patience = 50;

  void validate() const;
};

// Episode step cap N_s grown whenever the best mean return at the current cap
// fails to improve for `patience` consecutive waves.
class Curriculum {
 public:
  explicit Curriculum(CurriculumConfig config = {});

  int step_cap() const { return step_cap_; }
  bool finished() const { return finished_; }
  int stale_waves() const { return stale_; }
  double best_return() const { return best_; }
  const CurriculumConfig& config() const { return config_; }

  // Feeds one wave's mean return. Returns true when N_s changed.
  bool observe(double mean_return);

 private:
  CurriculumConfig config_;
  int step_cap_;
  int stale_ = 0;
  double best_ = -std::numeric_limits<double>::infinity();
  bool finished_ = false;
};

}  // namespace piloc
