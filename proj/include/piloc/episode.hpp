#pragma once

#include <cstdint>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include "json.hpp"
#include "piloc/grid_map.hpp"
#include "piloc/metrics.hpp"
#include "piloc/network.hpp"
#include "piloc/world.hpp"

namespace piloc {

enum class PolicyKind { Piloc, Frontier, Random };

std::string_view policy_name(PolicyKind kind);
// Accepts "piloc", "frontier" or "random".
PolicyKind parse_policy(std::string_view name);

struct PolicyHandle {
  PolicyKind kind = PolicyKind::Random;
  const Network* net = nullptr;  // required for Piloc
  std::span<const double> params;
};

nlohmann::json to_json(const EpisodeConfig& config);

// Plays one evaluation episode. The environment and the policy draw from
// separate streams derived from `seed`, so every policy faces the same
// placements. The fallback controller only overrides the learned policy.
// When `replay` is set, a JSON-lines log is written to it: a header, the
// reset state, one record per tick and a summary.
EpisodeResult run_episode(std::shared_ptr<const GridMap> map, const EpisodeConfig& config,
                          const PolicyHandle& policy, std::uint64_t seed,
                          std::ostream* replay = nullptr);

}  // namespace piloc
