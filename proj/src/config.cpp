#include "piloc/config.hpp"

#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "piloc/io.hpp"

namespace piloc {
namespace {

namespace pt = boost::property_tree;

std::string form_name(ReExplorationForm f) {
  return f == ReExplorationForm::OffsetAfterSum ? "offset_after_sum" : "offset_inside_sum";
}

ReExplorationForm parse_form(const std::string& s) {
  if (s == "offset_after_sum") return ReExplorationForm::OffsetAfterSum;
  if (s == "offset_inside_sum") return ReExplorationForm::OffsetInsideSum;
  throw ConfigError("reward.re_exploration_form: unknown value '" + s + "'");
}

std::string averaging_name(StepAveraging a) {
  return a == StepAveraging::AllEpisodes ? "all" : "successes";
}

StepAveraging parse_averaging(const std::string& s) {
  if (s == "all") return StepAveraging::AllEpisodes;
  if (s == "successes") return StepAveraging::SuccessesOnly;
  throw ConfigError("eval.step_averaging: unknown value '" + s + "'");
}

// Visits every key with a reader/writer pair so parsing and formatting stay
// in sync.
template <typename Visitor>
void visit(RunConfig& c, Visitor&& v) {
  EpisodeConfig& e = c.episode;
  v("episode", "agents", e.num_agents);
  v("episode", "targets", e.num_targets);
  v("episode", "perception_radius", e.perception_radius);
  v("episode", "comm_range", e.comm_range);
  v("episode", "pheromone_window", e.pheromone_window);
  v("episode", "step_limit", e.step_limit);
  v("episode", "pheromone", e.pheromone_enabled);
  v("episode", "comms", e.comms_enabled);
  v("episode", "fallback", e.fallback_enabled);
  v("episode", "transitive_comms", e.transitive_comms);
  v("episode", "time_mark_increment", e.time_mark_increment);
  v("pheromone", "p_max", e.pheromone.p_max);
  v("pheromone", "evaporation", e.pheromone.evaporation);
  RewardParams& r = e.reward;
  v("reward", "exploration_per_cell", r.exploration_per_cell);
  v("reward", "found_reward", r.found_reward);
  v("reward", "mark_weight", r.mark_weight);
  v("reward", "collision_penalty", r.collision_penalty);
  v("reward", "alpha", r.alpha);
  v("reward", "beta", r.beta);
  v("reward", "target_found_bonus", r.target_found_bonus);
  v("reward", "re_exploration_form", r.re_exploration_form);
  TrainConfig& t = c.train;
  v("train", "gamma", t.gamma);
  v("train", "clip", t.loss.clip);
  v("train", "value_coef", t.loss.value_coef);
  v("train", "entropy_coef", t.loss.entropy_coef);
  v("train", "learning_rate", t.adam.learning_rate);
  v("train", "beta1", t.adam.beta1);
  v("train", "beta2", t.adam.beta2);
  v("train", "adam_epsilon", t.adam.epsilon);
  v("train", "max_grad_norm", t.max_grad_norm);
  v("train", "epochs", t.epochs);
  v("train", "minibatch", t.minibatch);
  v("train", "episodes_per_update", t.episodes_per_update);
  v("train", "max_updates", t.max_updates);
  v("train", "checkpoint_every", t.checkpoint_every);
  v("train", "use_gae", t.use_gae);
  v("train", "gae_lambda", t.gae_lambda);
  v("train", "value_norm", t.value_norm);
  v("train", "shared_trunk", t.shared_trunk);
  v("train", "workers", t.workers);
  v("curriculum", "start", t.curriculum.start);
  v("curriculum", "increment", t.curriculum.increment);
  v("curriculum", "cap", t.curriculum.cap);
  v("curriculum", "patience", t.curriculum.patience);
  v("maps", "width", c.maps.width);
  v("maps", "height", c.maps.height);
  v("maps", "density", c.maps.density);
  v("eval", "episodes", c.eval.episodes);
  v("eval", "workers", c.eval.workers);
  v("eval", "step_averaging", c.eval.step_averaging);
}

struct Reader {
  const pt::ptree& tree;
  std::set<std::string>* seen;

  template <typename T>
  void operator()(const char* section, const char* key, T& value) {
    const std::string path = std::string(section) + "." + key;
    seen->insert(path);
    const auto node = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'));
    if (!node) return;
    if constexpr (std::is_same_v<T, ReExplorationForm>) {
      value = parse_form(*node);
    } else if constexpr (std::is_same_v<T, StepAveraging>) {
      value = parse_averaging(*node);
    } else if constexpr (std::is_same_v<T, bool>) {
      if (*node == "true" || *node == "1") {
        value = true;
      } else if (*node == "false" || *node == "0") {
        value = false;
      } else {
        throw ConfigError(path + ": expected true or false, got '" + *node + "'");
      }
    } else {
      std::istringstream in(*node);
      T parsed{};
      in >> parsed;
      if (!in || !(in >> std::ws).eof()) {
        throw ConfigError(path + ": cannot parse '" + *node + "'");
      }
      value = parsed;
    }
  }
};

struct Writer {
  std::map<std::string, std::vector<std::pair<std::string, std::string>>>* sections;
  std::vector<std::string>* order;

  template <typename T>
  void operator()(const char* section, const char* key, T& value) {
    std::string text;
    if constexpr (std::is_same_v<T, ReExplorationForm>) {
      text = form_name(value);
    } else if constexpr (std::is_same_v<T, StepAveraging>) {
      text = averaging_name(value);
    } else if constexpr (std::is_same_v<T, bool>) {
      text = value ? "true" : "false";
    } else if constexpr (std::is_floating_point_v<T>) {
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof buf, value);
      text.assign(buf, res.ptr);
    } else {
      text = std::to_string(value);
    }
    if (!sections->contains(section)) order->push_back(section);
    (*sections)[section].emplace_back(key, text);
  }
};

}  // namespace

RunConfig parse_config(const std::string& text, const RunConfig& base) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig config = base;
  std::set<std::string> known;
  visit(config, Reader{tree, &known});
  for (const auto& [section, keys] : tree) {
    if (keys.empty()) throw ConfigError("config: key '" + section + "' outside a section");
    for (const auto& [key, _] : keys) {
      if (!known.contains(section + "." + key)) {
        throw ConfigError("config: unknown key " + section + "." + key);
      }
    }
  }
  try {
    config.episode.validate();
    config.train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path, const RunConfig& base) {
  return parse_config(read_file(path), base);
}

std::string format_config(const RunConfig& config) {
  RunConfig copy = config;
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
  std::vector<std::string> order;
  visit(copy, Writer{&sections, &order});
  std::string out;
  for (const auto& name : order) {
    if (!out.empty()) out += "\n";
    out += "[" + name + "]\n";
    for (const auto& [key, value] : sections[name]) out += key + " = " + value + "\n";
  }
  return out;
}

}  // namespace piloc
