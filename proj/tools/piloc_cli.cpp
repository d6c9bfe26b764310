#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "piloc/config.hpp"
#include "piloc/experiments.hpp"
#include "piloc/grid_map.hpp"
#include "piloc/io.hpp"
#include "piloc/replay.hpp"
#include "piloc/trainer.hpp"

namespace fs = std::filesystem;
using namespace piloc;

namespace {

struct Overrides {
  std::string config_path;
  std::optional<int> agents;
  std::optional<int> targets;
  std::optional<int> steps;
  bool no_pheromone = false;
  bool no_comms = false;
  bool no_fallback = false;
  std::optional<int> workers;
};

void add_episode_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "INI config file")->check(CLI::ExistingFile);
  cmd->add_option("--agents", o.agents, "number of agents")->check(CLI::PositiveNumber);
  cmd->add_option("--targets", o.targets, "number of targets")->check(CLI::PositiveNumber);
  cmd->add_option("--steps", o.steps, "episode step limit")->check(CLI::PositiveNumber);
  cmd->add_flag("--no-pheromone", o.no_pheromone, "disable the pheromone mechanism");
  cmd->add_flag("--no-comms", o.no_comms, "disable map sharing");
  cmd->add_flag("--no-fallback", o.no_fallback, "disable the trap recovery override");
  cmd->add_option("--workers", o.workers, "parallel episode workers")->check(CLI::PositiveNumber);
}

RunConfig effective_config(const Overrides& o) {
  RunConfig c;
  if (!o.config_path.empty()) c = load_config(o.config_path);
  if (o.agents) c.episode.num_agents = *o.agents;
  if (o.targets) c.episode.num_targets = *o.targets;
  if (o.steps) c.episode.step_limit = *o.steps;
  if (o.no_pheromone) c.episode.pheromone_enabled = false;
  if (o.no_comms) c.episode.comms_enabled = false;
  if (o.no_fallback) c.episode.fallback_enabled = false;
  if (o.workers) {
    c.train.workers = *o.workers;
    c.eval.workers = *o.workers;
  }
  c.episode.validate();
  c.train.validate();
  return c;
}

void echo_config(const fs::path& dir, const RunConfig& c) {
  fs::create_directories(dir);
  write_file_atomic(dir / "effective_config.ini", format_config(c));
}

Checkpoint load_policy(const std::string& path, const MapSet& maps, const EpisodeConfig& cfg) {
  Checkpoint ck = load_checkpoint(path);
  const LayerSpec& s = ck.params.spec;
  for (const auto& m : maps) {
    if (s.map_branch.height != m->height() || s.map_branch.width != m->width()) {
      throw std::runtime_error("checkpoint expects " + std::to_string(s.map_branch.width) + "x" +
                               std::to_string(s.map_branch.height) + " maps");
    }
  }
  if (s.pheromone_branch.height != cfg.pheromone_window) {
    throw std::runtime_error("checkpoint expects a pheromone window of " +
                             std::to_string(s.pheromone_branch.height));
  }
  return ck;
}

void write_rows(const fs::path& dir, const std::vector<std::pair<std::string, BatchMetrics>>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [name, m] : rows) {
    nlohmann::json r = to_json(m);
    r["name"] = name;
    j.push_back(r);
  }
  write_file_atomic(dir / "metrics.json", j.dump(2) + "\n");
  write_file_atomic(dir / "table.txt", format_table(rows));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent search-and-rescue simulator and trainer"};
  app.require_subcommand(1);
  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "root random seed")->capture_default_str();

  // genmaps
  auto* genmaps = app.add_subcommand("genmaps", "generate connected random maps");
  int gen_count = 50;
  std::optional<int> gen_w, gen_h;
  std::optional<double> gen_density;
  std::string gen_out;
  std::string gen_config;
  genmaps->add_option("--count", gen_count, "number of maps")->check(CLI::PositiveNumber);
  genmaps->add_option("--width", gen_w, "map width");
  genmaps->add_option("--height", gen_h, "map height");
  genmaps->add_option("--density", gen_density, "obstacle density");
  genmaps->add_option("--config", gen_config, "INI config file")->check(CLI::ExistingFile);
  genmaps->add_option("--out", gen_out, "output directory")->required();

  // train
  auto* train = app.add_subcommand("train", "train the shared policy");
  Overrides train_o;
  std::string train_maps, train_out;
  std::optional<int> max_updates;
  add_episode_flags(train, train_o);
  train->add_option("--maps", train_maps, "training map directory")->required()->check(CLI::ExistingDirectory);
  train->add_option("--out", train_out, "output directory")->required();
  train->add_option("--max-updates", max_updates, "update budget (0 = curriculum only)");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a policy");
  Overrides eval_o;
  std::string eval_maps, eval_out, eval_ckpt, eval_policy = "piloc";
  std::optional<int> eval_episodes;
  bool eval_replays = false;
  add_episode_flags(eval, eval_o);
  eval->add_option("--checkpoint", eval_ckpt, "trained checkpoint")->check(CLI::ExistingFile);
  eval->add_option("--maps", eval_maps, "test map directory")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--episodes", eval_episodes, "number of episodes")->check(CLI::PositiveNumber);
  eval->add_option("--policy", eval_policy, "piloc, frontier or random")
      ->check(CLI::IsMember({"piloc", "frontier", "random"}));
  eval->add_option("--out", eval_out, "output directory")->required();
  eval->add_flag("--replays", eval_replays, "write a replay log per episode");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "evaluate the four mechanism variants");
  Overrides ablate_o;
  std::string ablate_maps, ablate_out, ablate_ckpts;
  std::optional<int> ablate_episodes;
  add_episode_flags(ablate, ablate_o);
  ablate->add_option("--checkpoints", ablate_ckpts,
                     "directory holding <variant>.bin for PILOC, PILOC-com, PILOC-ph, PILOC-com-ph")
      ->required()->check(CLI::ExistingDirectory);
  ablate->add_option("--maps", ablate_maps, "test map directory")->required()->check(CLI::ExistingDirectory);
  ablate->add_option("--episodes", ablate_episodes, "episodes per variant")->check(CLI::PositiveNumber);
  ablate->add_option("--out", ablate_out, "output directory")->required();

  // scale
  auto* scale = app.add_subcommand("scale", "evaluate one checkpoint over agent counts");
  Overrides scale_o;
  std::string scale_maps, scale_out, scale_ckpt;
  std::optional<int> scale_episodes;
  int min_agents = 2, max_agents = 5;
  add_episode_flags(scale, scale_o);
  scale->add_option("--checkpoint", scale_ckpt, "trained checkpoint")->required()->check(CLI::ExistingFile);
  scale->add_option("--maps", scale_maps, "test map directory")->required()->check(CLI::ExistingDirectory);
  scale->add_option("--episodes", scale_episodes, "episodes per agent count")->check(CLI::PositiveNumber);
  scale->add_option("--min-agents", min_agents, "smallest team")->capture_default_str();
  scale->add_option("--max-agents", max_agents, "largest team")->capture_default_str();
  scale->add_option("--out", scale_out, "output directory")->required();

  // replay
  auto* replay = app.add_subcommand("replay", "render a replay log");
  std::string replay_log, replay_out, replay_format = "text";
  int replay_scale = 8;
  replay->add_option("--log", replay_log, "replay log")->required()->check(CLI::ExistingFile);
  replay->add_option("--out", replay_out, "output directory (stdout for text when omitted)");
  replay->add_option("--format", replay_format, "text or ppm")->check(CLI::IsMember({"text", "ppm"}));
  replay->add_option("--scale", replay_scale, "pixels per cell for ppm")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*genmaps) {
      RunConfig c;
      if (!gen_config.empty()) c = load_config(gen_config);
      const int w = gen_w.value_or(c.maps.width);
      const int h = gen_h.value_or(c.maps.height);
      const double d = gen_density.value_or(c.maps.density);
      fs::create_directories(gen_out);
      for (int i = 0; i < gen_count; ++i) {
        const GridMap map = generate_map(w, h, d, derive_seed(seed, static_cast<std::uint64_t>(i)));
        char name[32];
        std::snprintf(name, sizeof name, "map_%04d.map", i);
        write_map_file(fs::path(gen_out) / name, map);
      }
      std::cout << "wrote " << gen_count << " maps to " << gen_out << "\n";
    } else if (*train) {
      RunConfig c = effective_config(train_o);
      if (max_updates) c.train.max_updates = *max_updates;
      c.train.validate();
      echo_config(train_out, c);
      const MapSet maps = load_map_set(train_maps);
      train_loop(maps, c.episode, c.train, seed, fs::path(train_out),
                 [](const UpdateRecord& r, const Trainer&) {
                   std::printf("update %5d  N_s %3d  return %9.3f  SR %5.2f  pi %8.4f  v %10.4f  H %6.4f%s\n",
                               r.update, r.n_s, r.mean_return, r.sr, r.policy_loss, r.value_loss,
                               r.entropy, r.aborted ? "  aborted" : "");
                   std::fflush(stdout);
                 });
    } else if (*eval) {
      RunConfig c = effective_config(eval_o);
      if (eval_episodes) c.eval.episodes = *eval_episodes;
      const PolicyKind kind = parse_policy(eval_policy);
      if (kind == PolicyKind::Piloc && eval_ckpt.empty()) {
        throw CLI::RequiredError("--checkpoint is required for --policy piloc");
      }
      const MapSet maps = load_map_set(eval_maps);
      std::optional<Checkpoint> ck;
      std::optional<Network> net;
      PolicyHandle handle{kind, nullptr, {}};
      if (kind == PolicyKind::Piloc) {
        ck = load_policy(eval_ckpt, maps, c.episode);
        net.emplace(ck->params.spec);
        handle.net = &*net;
        handle.params = ck->params.values;
      }
      echo_config(eval_out, c);
      std::optional<fs::path> replays;
      if (eval_replays) replays = fs::path(eval_out) / "replays";
      const auto results = evaluate(maps, c.episode, handle, c.eval.episodes, seed, c.eval.workers, replays);
      const std::vector<std::pair<std::string, BatchMetrics>> rows = {
          {std::string(policy_name(kind)), aggregate(results, c.eval.step_averaging)}};
      write_rows(eval_out, rows);
      std::cout << format_table(rows);
    } else if (*ablate) {
      RunConfig c = effective_config(ablate_o);
      if (ablate_episodes) c.eval.episodes = *ablate_episodes;
      const MapSet maps = load_map_set(ablate_maps);
      echo_config(ablate_out, c);
      std::vector<std::pair<std::string, BatchMetrics>> rows;
      for (const AblationVariant& v : ablation_variants()) {
        const EpisodeConfig cfg = apply_variant(c.episode, v);
        const Checkpoint ck = load_policy((fs::path(ablate_ckpts) / (v.name + ".bin")).string(), maps, cfg);
        const Network net(ck.params.spec);
        const PolicyHandle handle{PolicyKind::Piloc, &net, ck.params.values};
        const auto results = evaluate(maps, cfg, handle, c.eval.episodes, seed, c.eval.workers);
        rows.emplace_back(v.name, aggregate(results, c.eval.step_averaging));
      }
      write_rows(ablate_out, rows);
      std::cout << format_table(rows);
    } else if (*scale) {
      RunConfig c = effective_config(scale_o);
      if (scale_episodes) c.eval.episodes = *scale_episodes;
      if (min_agents < 1 || max_agents < min_agents) throw CLI::ValidationError("agent range is empty");
      const MapSet maps = load_map_set(scale_maps);
      const Checkpoint ck = load_policy(scale_ckpt, maps, c.episode);
      const Network net(ck.params.spec);
      echo_config(scale_out, c);
      std::vector<std::pair<std::string, BatchMetrics>> rows;
      for (int n = min_agents; n <= max_agents; ++n) {
        EpisodeConfig cfg = c.episode;
        cfg.num_agents = n;
        const PolicyHandle handle{PolicyKind::Piloc, &net, ck.params.values};
        const auto results = evaluate(maps, cfg, handle, c.eval.episodes, seed, c.eval.workers);
        rows.emplace_back(std::to_string(n) + " agents", aggregate(results, c.eval.step_averaging));
      }
      write_rows(scale_out, rows);
      std::cout << format_table(rows);
    } else if (*replay) {
      const ReplayLog log = parse_replay(read_file(replay_log));
      if (replay_format == "ppm") {
        if (replay_out.empty()) throw CLI::RequiredError("--out is required for ppm output");
        write_ppm_frames(log, replay_out, replay_scale);
      } else {
        std::string text;
        for (const std::string& frame : render_text(log)) text += frame + "\n";
        if (replay_out.empty()) {
          std::cout << text;
        } else {
          fs::create_directories(replay_out);
          write_file_atomic(fs::path(replay_out) / "frames.txt", text);
        }
      }
    }
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
