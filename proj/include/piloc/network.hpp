#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "piloc/perception.hpp"
#include "piloc/rng.hpp"
#include "piloc/world.hpp"

namespace piloc {

// One input branch: [conv(k x k, same padding) -> ReLU -> 2x2 max-pool] per
// entry of `conv_channels`, then an FC over the channel axis, a transpose,
// and an FC over the spatial axis (both ReLU).
struct BranchSpec {
  int height = 0;
  int width = 0;
  std::vector<int> conv_channels;
  int kernel = 3;
  int channel_features = 8;
  int spatial_features = 8;

  friend bool operator==(const BranchSpec&, const BranchSpec&) = default;
};

struct LayerSpec {
  BranchSpec map_branch;  // shape shared by the obstacle and exploration branches
  BranchSpec pheromone_branch;
  int fusion_width = 128;
  int num_actions = kNumActions;
  bool shared_trunk = true;

  // Default architecture for the given observation sizes.
  static LayerSpec defaults(int map_height, int map_width, int pheromone_side);

  void validate() const;
  std::vector<std::int32_t> serialize() const;
  static LayerSpec deserialize(std::span<const std::int32_t> fields);
  // FNV-1a over the serialized fields.
  std::uint64_t digest() const;
  std::string describe() const;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

inline constexpr std::uint32_t kLayoutVersion = 1;

// Flat parameter store. Layout (each dense/conv weight row-major as
// [out][in] / [out][in_c][k][k], followed by its bias):
//   for each trunk (one when shared, actor then critic otherwise):
//     obstacle branch, exploration branch, pheromone branch, each as
//       conv stages..., channel FC, spatial FC
//     fusion FC
//   actor head, critic head
struct PolicyParams {
  LayerSpec spec;
  std::vector<double> values;

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

struct NetOutput {
  std::array<double, kNumActions> logits{};
  std::array<double, kNumActions> probs{};
  std::array<double, kNumActions> log_probs{};
  double value = 0.0;
};

struct ConvLayer {
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 0;
  int height = 0;  // input (and pre-pool output) height
  int width = 0;
  std::size_t weight = 0;
  std::size_t bias = 0;
  int pooled_height() const { return height / 2; }
  int pooled_width() const { return width / 2; }
};

struct DenseLayer {
  int in = 0;
  int out = 0;
  std::size_t weight = 0;
  std::size_t bias = 0;
};

struct BranchLayout {
  std::vector<ConvLayer> convs;
  DenseLayer channel_fc;
  DenseLayer spatial_fc;
  int channels = 0;  // after the last pool
  int spatial = 0;
  int features() const { return channel_fc.out * spatial_fc.out; }
};

struct TrunkLayout {
  std::array<BranchLayout, 3> branches;  // obstacle, exploration, pheromone
  DenseLayer fusion;
};

struct BranchCache {
  std::vector<std::vector<double>> inputs;  // stage inputs; back() is the last pooled map
  std::vector<std::vector<double>> cols;
  std::vector<std::vector<double>> activations;
  std::vector<std::vector<int>> argmax;
  std::vector<double> channel_out;  // [channel_features][spatial]
  std::vector<double> features;     // [channel_features][spatial_features]
};

struct TrunkCache {
  std::array<BranchCache, 3> branches;
  std::vector<double> concat;
  std::vector<double> fusion;
};

// Activations recorded by forward() for backward().
struct ForwardCache {
  std::vector<TrunkCache> trunks;
  NetOutput output;
};

// Actor-critic network over an ObservationStack.
class Network {
 public:
  explicit Network(LayerSpec spec);

  const LayerSpec& spec() const { return spec_; }
  std::size_t parameter_count() const { return count_; }
  const std::vector<TrunkLayout>& trunks() const { return trunks_; }
  const DenseLayer& actor_head() const { return actor_; }
  const DenseLayer& critic_head() const { return critic_; }

  // Orthogonal init (gain sqrt 2 for hidden layers, 0.01 actor head, 1.0
  // critic head), zero biases.
  PolicyParams initialize(std::uint64_t seed) const;

  NetOutput forward(std::span<const double> params, const ObservationStack& obs,
                    ForwardCache* cache = nullptr) const;

  // Accumulates dLoss/dParams into `grad` given the adjoints of the loss
  // with respect to the logits and the value.
  void backward(std::span<const double> params, const ForwardCache& cache,
                std::span<const double> d_logits, double d_value,
                std::span<double> grad) const;

 private:
  void check_shapes(std::span<const double> params, const ObservationStack& obs) const;

  LayerSpec spec_;
  std::vector<TrunkLayout> trunks_;
  DenseLayer actor_;
  DenseLayer critic_;
  std::size_t count_ = 0;
};

double entropy(const NetOutput& out);

// Action ~ Categorical(probs) and its log-probability.
std::pair<Action, double> sample_action(const NetOutput& out, Rng& rng);

// Index of the first non-finite entry, if any.
std::optional<std::size_t> first_non_finite(std::span<const double> values);

class NonFiniteGradient : public std::runtime_error {
 public:
  explicit NonFiniteGradient(std::size_t index)
      : std::runtime_error("non-finite gradient at parameter " + std::to_string(index)),
        index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

struct AdamState {
  std::uint64_t step = 0;
  std::vector<double> m;
  std::vector<double> v;

  friend bool operator==(const AdamState&, const AdamState&) = default;
};

// Binary checkpoint, little-endian:
//   char[8]  magic "PILOCNN1"
//   u32      layout version
//   u64      layer spec digest
//   u8       shared_trunk
//   u32      number of spec fields n, then n x i32 spec fields
//   u64      parameter count p, then p x f64 parameters
//   u8       optimizer block present
//   [u64 adam step, u64 q, q x f64 first moments, q x f64 second moments]
void save_checkpoint(const std::filesystem::path& path, const PolicyParams& params,
                     const AdamState* optimizer = nullptr);
std::string encode_checkpoint(const PolicyParams& params, const AdamState* optimizer = nullptr);

struct Checkpoint {
  PolicyParams params;
  std::optional<AdamState> optimizer;
};
Checkpoint load_checkpoint(const std::filesystem::path& path);
Checkpoint decode_checkpoint(std::string_view bytes);

}  // namespace piloc
