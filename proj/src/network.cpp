#include "piloc/network.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "piloc/io.hpp"

namespace piloc {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

ConstMatMap weights(std::span<const double> p, const DenseLayer& d) {
  return ConstMatMap(p.data() + d.weight, d.out, d.in);
}
ConstVecMap biases(std::span<const double> p, const DenseLayer& d) {
  return ConstVecMap(p.data() + d.bias, d.out);
}
MatMap weights(std::span<double> p, const DenseLayer& d) {
  return MatMap(p.data() + d.weight, d.out, d.in);
}
VecMap biases(std::span<double> p, const DenseLayer& d) {
  return VecMap(p.data() + d.bias, d.out);
}

int conv_fan_in(const ConvLayer& c) { return c.in_channels * c.kernel * c.kernel; }

void relu_inplace(double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) v[i] = v[i] > 0.0 ? v[i] : 0.0;
}

void im2col(const std::vector<double>& in, const ConvLayer& c, std::vector<double>& cols) {
  const int k = c.kernel;
  const int pad = k / 2;
  const int h = c.height;
  const int w = c.width;
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  cols.resize(static_cast<std::size_t>(conv_fan_in(c)) * hw);
  std::size_t row = 0;
  for (int ch = 0; ch < c.in_channels; ++ch) {
    const double* src = in.data() + ch * hw;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx, ++row) {
        double* dst = cols.data() + row * hw;
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - pad;
          double* drow = dst + static_cast<std::size_t>(y) * w;
          if (sy < 0 || sy >= h) {
            std::fill(drow, drow + w, 0.0);
            continue;
          }
          const double* srow = src + static_cast<std::size_t>(sy) * w;
          for (int x = 0; x < w; ++x) {
            const int sx = x + kx - pad;
            drow[x] = (sx >= 0 && sx < w) ? srow[sx] : 0.0;
          }
        }
      }
    }
  }
}

void col2im(const double* cols, const ConvLayer& c, std::vector<double>& out) {
  const int k = c.kernel;
  const int pad = k / 2;
  const int h = c.height;
  const int w = c.width;
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  out.assign(static_cast<std::size_t>(c.in_channels) * hw, 0.0);
  std::size_t row = 0;
  for (int ch = 0; ch < c.in_channels; ++ch) {
    double* dst = out.data() + ch * hw;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx, ++row) {
        const double* src = cols + row * hw;
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - pad;
          if (sy < 0 || sy >= h) continue;
          for (int x = 0; x < w; ++x) {
            const int sx = x + kx - pad;
            if (sx >= 0 && sx < w) dst[sy * w + sx] += src[y * w + x];
          }
        }
      }
    }
  }
}

void forward_branch(std::span<const double> p, const BranchLayout& layout,
                    std::span<const double> input, BranchCache& cache) {
  const std::size_t stages = layout.convs.size();
  cache.inputs.resize(stages + 1);
  cache.cols.resize(stages);
  cache.activations.resize(stages);
  cache.argmax.resize(stages);
  cache.inputs[0].assign(input.begin(), input.end());

  for (std::size_t s = 0; s < stages; ++s) {
    const ConvLayer& c = layout.convs[s];
    const int hw = c.height * c.width;
    im2col(cache.inputs[s], c, cache.cols[s]);
    auto& act = cache.activations[s];
    act.resize(static_cast<std::size_t>(c.out_channels) * hw);
    ConstMatMap wmat(p.data() + c.weight, c.out_channels, conv_fan_in(c));
    ConstMatMap cols(cache.cols[s].data(), conv_fan_in(c), hw);
    ConstVecMap bias(p.data() + c.bias, c.out_channels);
    MatMap out(act.data(), c.out_channels, hw);
    out.noalias() = wmat * cols;
    out.colwise() += bias;
    relu_inplace(act.data(), act.size());

    const int ph = c.pooled_height();
    const int pw = c.pooled_width();
    auto& pooled = cache.inputs[s + 1];
    auto& arg = cache.argmax[s];
    pooled.resize(static_cast<std::size_t>(c.out_channels) * ph * pw);
    arg.resize(pooled.size());
    std::size_t o = 0;
    for (int ch = 0; ch < c.out_channels; ++ch) {
      const int base = ch * hw;
      for (int py = 0; py < ph; ++py) {
        for (int px = 0; px < pw; ++px, ++o) {
          int best = base + (2 * py) * c.width + 2 * px;
          const int cand[3] = {best + 1, best + c.width, best + c.width + 1};
          for (int q : cand) {
            if (act[q] > act[best]) best = q;
          }
          pooled[o] = act[best];
          arg[o] = best;
        }
      }
    }
  }

  const DenseLayer& cf = layout.channel_fc;
  const DenseLayer& sf = layout.spatial_fc;
  ConstMatMap pooled(cache.inputs[stages].data(), layout.channels, layout.spatial);
  cache.channel_out.resize(static_cast<std::size_t>(cf.out) * layout.spatial);
  MatMap yt(cache.channel_out.data(), cf.out, layout.spatial);
  yt.noalias() = weights(p, cf) * pooled;
  yt.colwise() += biases(p, cf);
  relu_inplace(cache.channel_out.data(), cache.channel_out.size());

  cache.features.resize(static_cast<std::size_t>(cf.out) * sf.out);
  MatMap z(cache.features.data(), cf.out, sf.out);
  z.noalias() = yt * weights(p, sf).transpose();
  z.rowwise() += biases(p, sf).transpose();
  relu_inplace(cache.features.data(), cache.features.size());
}

// Scratch buffers reused across backward calls on one thread.
struct BackwardScratch {
  std::vector<double> d_features;
  std::vector<double> d_channel;
  std::vector<double> d_pooled;
  std::vector<double> d_act;
  std::vector<double> d_cols;
  std::vector<double> d_concat;
  std::vector<double> d_fusion;
};

void backward_branch(std::span<const double> p, const BranchLayout& layout,
                     const BranchCache& cache, const double* d_features_in,
                     std::span<double> grad, BackwardScratch& s) {
  const DenseLayer& cf = layout.channel_fc;
  const DenseLayer& sf = layout.spatial_fc;
  const std::size_t nfeat = cache.features.size();

  s.d_features.assign(d_features_in, d_features_in + nfeat);
  for (std::size_t i = 0; i < nfeat; ++i) {
    if (cache.features[i] <= 0.0) s.d_features[i] = 0.0;
  }
  MatMap dz(s.d_features.data(), cf.out, sf.out);
  ConstMatMap yt(cache.channel_out.data(), cf.out, layout.spatial);
  weights(grad, sf).noalias() += dz.transpose() * yt;
  biases(grad, sf) += dz.colwise().sum().transpose();

  s.d_channel.resize(cache.channel_out.size());
  MatMap dyt(s.d_channel.data(), cf.out, layout.spatial);
  dyt.noalias() = dz * weights(p, sf);
  for (std::size_t i = 0; i < s.d_channel.size(); ++i) {
    if (cache.channel_out[i] <= 0.0) s.d_channel[i] = 0.0;
  }
  const std::size_t stages = layout.convs.size();
  ConstMatMap pooled(cache.inputs[stages].data(), layout.channels, layout.spatial);
  weights(grad, cf).noalias() += dyt * pooled.transpose();
  biases(grad, cf) += dyt.rowwise().sum();

  s.d_pooled.resize(static_cast<std::size_t>(layout.channels) * layout.spatial);
  MatMap dp(s.d_pooled.data(), layout.channels, layout.spatial);
  dp.noalias() = weights(p, cf).transpose() * dyt;

  for (std::size_t st = stages; st-- > 0;) {
    const ConvLayer& c = layout.convs[st];
    const int hw = c.height * c.width;
    const auto& act = cache.activations[st];
    const auto& arg = cache.argmax[st];
    s.d_act.assign(act.size(), 0.0);
    for (std::size_t o = 0; o < arg.size(); ++o) {
      if (act[arg[o]] > 0.0) s.d_act[arg[o]] += s.d_pooled[o];
    }
    ConstMatMap dact(s.d_act.data(), c.out_channels, hw);
    ConstMatMap cols(cache.cols[st].data(), conv_fan_in(c), hw);
    MatMap gw(grad.data() + c.weight, c.out_channels, conv_fan_in(c));
    gw.noalias() += dact * cols.transpose();
    VecMap(grad.data() + c.bias, c.out_channels) += dact.rowwise().sum();
    if (st == 0) break;
    ConstMatMap wmat(p.data() + c.weight, c.out_channels, conv_fan_in(c));
    s.d_cols.resize(static_cast<std::size_t>(conv_fan_in(c)) * hw);
    MatMap dcols(s.d_cols.data(), conv_fan_in(c), hw);
    dcols.noalias() = wmat.transpose() * dact;
    col2im(s.d_cols.data(), c, s.d_pooled);
  }
}

std::span<const double> branch_input(const ObservationStack& obs, int branch) {
  switch (branch) {
    case 0: return obs.obstacle;
    case 1: return obs.exploration;
    default: return obs.pheromone;
  }
}

void forward_trunk(std::span<const double> p, const TrunkLayout& layout,
                   const ObservationStack& obs, TrunkCache& cache) {
  cache.concat.clear();
  for (int b = 0; b < 3; ++b) {
    forward_branch(p, layout.branches[b], branch_input(obs, b), cache.branches[b]);
    const auto& f = cache.branches[b].features;
    cache.concat.insert(cache.concat.end(), f.begin(), f.end());
  }
  cache.fusion.resize(layout.fusion.out);
  VecMap fusion(cache.fusion.data(), layout.fusion.out);
  fusion.noalias() = weights(p, layout.fusion) * ConstVecMap(cache.concat.data(), layout.fusion.in);
  fusion += biases(p, layout.fusion);
  relu_inplace(cache.fusion.data(), cache.fusion.size());
}

void backward_trunk(std::span<const double> p, const TrunkLayout& layout,
                    const TrunkCache& cache, std::span<double> grad, BackwardScratch& s) {
  // s.d_fusion holds dLoss/d(fusion output) on entry.
  for (std::size_t i = 0; i < cache.fusion.size(); ++i) {
    if (cache.fusion[i] <= 0.0) s.d_fusion[i] = 0.0;
  }
  ConstVecMap df(s.d_fusion.data(), layout.fusion.out);
  ConstVecMap x(cache.concat.data(), layout.fusion.in);
  weights(grad, layout.fusion).noalias() += df * x.transpose();
  biases(grad, layout.fusion) += df;
  s.d_concat.resize(layout.fusion.in);
  VecMap(s.d_concat.data(), layout.fusion.in).noalias() = weights(p, layout.fusion).transpose() * df;
  std::size_t offset = 0;
  for (int b = 0; b < 3; ++b) {
    backward_branch(p, layout.branches[b], cache.branches[b], s.d_concat.data() + offset, grad, s);
    offset += cache.branches[b].features.size();
  }
}

void orthogonal_fill(std::span<double> out, int rows, int cols, double gain, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const bool tall = rows >= cols;
  const int m = tall ? rows : cols;
  const int n = tall ? cols : rows;
  RowMat a(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
  Eigen::HouseholderQR<RowMat> qr(a);
  RowMat q = qr.householderQ() * RowMat::Identity(m, n);
  const RowMat r = qr.matrixQR().topRows(n).template triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  MatMap w(out.data(), rows, cols);
  if (tall) {
    w = gain * q;
  } else {
    w = gain * q.transpose();
  }
}

void write_u8(std::string& out, std::uint8_t v) { out.push_back(static_cast<char>(v)); }

template <typename T>
void write_le(std::string& out, T v) {
  using U = std::make_unsigned_t<T>;
  const auto u = static_cast<U>(v);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
}

void write_f64(std::string& out, double v) { write_le(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T read() {
    using U = std::make_unsigned_t<T>;
    need(sizeof(T));
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      u |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  double read_f64() { return std::bit_cast<double>(read<std::uint64_t>()); }
  std::string_view take(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw std::runtime_error("checkpoint truncated");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

constexpr char kMagic[8] = {'P', 'I', 'L', 'O', 'C', 'N', 'N', '1'};

void serialize_branch(const BranchSpec& b, std::vector<std::int32_t>& out) {
  out.push_back(b.height);
  out.push_back(b.width);
  out.push_back(b.kernel);
  out.push_back(b.channel_features);
  out.push_back(b.spatial_features);
  out.push_back(static_cast<std::int32_t>(b.conv_channels.size()));
  out.insert(out.end(), b.conv_channels.begin(), b.conv_channels.end());
}

BranchSpec deserialize_branch(std::span<const std::int32_t> f, std::size_t& i) {
  auto next = [&]() {
    if (i >= f.size()) throw std::runtime_error("layer spec truncated");
    return f[i++];
  };
  BranchSpec b;
  b.height = next();
  b.width = next();
  b.kernel = next();
  b.channel_features = next();
  b.spatial_features = next();
  const int n = next();
  if (n < 0 || n > 16) throw std::runtime_error("bad conv stage count in layer spec");
  for (int k = 0; k < n; ++k) b.conv_channels.push_back(next());
  return b;
}

void validate_branch(const BranchSpec& b, const char* name) {
  const std::string who = name;
  if (b.height < 1 || b.width < 1) throw std::invalid_argument(who + " branch input is empty");
  if (b.kernel < 1 || b.kernel % 2 == 0) throw std::invalid_argument(who + " kernel must be odd");
  if (b.conv_channels.empty()) throw std::invalid_argument(who + " branch needs a conv stage");
  int h = b.height;
  int w = b.width;
  for (int c : b.conv_channels) {
    if (c < 1) throw std::invalid_argument(who + " conv channels must be positive");
    h /= 2;
    w /= 2;
    if (h < 1 || w < 1) throw std::invalid_argument(who + " branch pools below 1x1");
  }
  if (b.channel_features < 1 || b.spatial_features < 1) {
    throw std::invalid_argument(who + " branch FC widths must be positive");
  }
}

}  // namespace

LayerSpec LayerSpec::defaults(int map_height, int map_width, int pheromone_side) {
  LayerSpec s;
  s.map_branch = {map_height, map_width, {8, 16}, 3, 8, 8};
  s.pheromone_branch = {pheromone_side, pheromone_side, {8}, 3, 8, 8};
  s.fusion_width = 128;
  s.num_actions = kNumActions;
  s.shared_trunk = true;
  return s;
}

void LayerSpec::validate() const {
  validate_branch(map_branch, "map");
  validate_branch(pheromone_branch, "pheromone");
  if (fusion_width < 1) throw std::invalid_argument("fusion width must be positive");
  if (num_actions != kNumActions) throw std::invalid_argument("network must emit 4 action logits");
}

std::vector<std::int32_t> LayerSpec::serialize() const {
  std::vector<std::int32_t> out;
  serialize_branch(map_branch, out);
  serialize_branch(pheromone_branch, out);
  out.push_back(fusion_width);
  out.push_back(num_actions);
  out.push_back(shared_trunk ? 1 : 0);
  return out;
}

LayerSpec LayerSpec::deserialize(std::span<const std::int32_t> fields) {
  std::size_t i = 0;
  LayerSpec s;
  s.map_branch = deserialize_branch(fields, i);
  s.pheromone_branch = deserialize_branch(fields, i);
  if (fields.size() != i + 3) throw std::runtime_error("layer spec has wrong field count");
  s.fusion_width = fields[i];
  s.num_actions = fields[i + 1];
  s.shared_trunk = fields[i + 2] != 0;
  s.validate();
  return s;
}

std::uint64_t LayerSpec::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::int32_t f : serialize()) {
    const auto u = static_cast<std::uint32_t>(f);
    for (int b = 0; b < 4; ++b) {
      h ^= (u >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string LayerSpec::describe() const {
  std::ostringstream os;
  auto branch = [&](const BranchSpec& b) {
    os << b.height << "x" << b.width << " conv[";
    for (std::size_t i = 0; i < b.conv_channels.size(); ++i) {
      os << (i ? "," : "") << b.conv_channels[i];
    }
    os << "] k" << b.kernel << " fc " << b.channel_features << "x" << b.spatial_features;
  };
  os << "map{";
  branch(map_branch);
  os << "} pheromone{";
  branch(pheromone_branch);
  os << "} fusion " << fusion_width << (shared_trunk ? " shared" : " separate");
  return os.str();
}

Network::Network(LayerSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  std::size_t offset = 0;
  auto dense = [&](int in, int out) {
    DenseLayer d{in, out, offset, offset + static_cast<std::size_t>(in) * out};
    offset = d.bias + out;
    return d;
  };
  auto branch = [&](const BranchSpec& b) {
    BranchLayout layout;
    int in_c = 1;
    int h = b.height;
    int w = b.width;
    for (int ch : b.conv_channels) {
      ConvLayer c{in_c, ch, b.kernel, h, w, offset, 0};
      c.bias = c.weight + static_cast<std::size_t>(ch) * conv_fan_in(c);
      offset = c.bias + ch;
      layout.convs.push_back(c);
      in_c = ch;
      h /= 2;
      w /= 2;
    }
    layout.channels = in_c;
    layout.spatial = h * w;
    layout.channel_fc = dense(layout.channels, b.channel_features);
    layout.spatial_fc = dense(layout.spatial, b.spatial_features);
    return layout;
  };
  const int trunk_count = spec_.shared_trunk ? 1 : 2;
  for (int t = 0; t < trunk_count; ++t) {
    TrunkLayout trunk;
    trunk.branches[0] = branch(spec_.map_branch);
    trunk.branches[1] = branch(spec_.map_branch);
    trunk.branches[2] = branch(spec_.pheromone_branch);
    int features = 0;
    for (const auto& b : trunk.branches) features += b.features();
    trunk.fusion = dense(features, spec_.fusion_width);
    trunks_.push_back(std::move(trunk));
  }
  actor_ = dense(spec_.fusion_width, spec_.num_actions);
  critic_ = dense(spec_.fusion_width, 1);
  count_ = offset;
}

PolicyParams Network::initialize(std::uint64_t seed) const {
  PolicyParams params{spec_, std::vector<double>(count_, 0.0)};
  Rng rng(seed);
  std::span<double> p = params.values;
  const double relu_gain = std::sqrt(2.0);
  auto dense = [&](const DenseLayer& d, double gain) {
    orthogonal_fill(p.subspan(d.weight, static_cast<std::size_t>(d.in) * d.out), d.out, d.in,
                    gain, rng);
  };
  for (const auto& trunk : trunks_) {
    for (const auto& b : trunk.branches) {
      for (const auto& c : b.convs) {
        orthogonal_fill(p.subspan(c.weight, static_cast<std::size_t>(c.out_channels) * conv_fan_in(c)),
                        c.out_channels, conv_fan_in(c), relu_gain, rng);
      }
      dense(b.channel_fc, relu_gain);
      dense(b.spatial_fc, relu_gain);
    }
    dense(trunk.fusion, relu_gain);
  }
  dense(actor_, 0.01);
  dense(critic_, 1.0);
  return params;
}

void Network::check_shapes(std::span<const double> params, const ObservationStack& obs) const {
  if (params.size() != count_) {
    throw std::invalid_argument("parameter vector has " + std::to_string(params.size()) +
                                " entries, network expects " + std::to_string(count_));
  }
  const auto& m = spec_.map_branch;
  const auto& ph = spec_.pheromone_branch;
  const auto map_cells = static_cast<std::size_t>(m.height) * m.width;
  if (obs.obstacle.size() != map_cells || obs.exploration.size() != map_cells ||
      obs.height != m.height || obs.width != m.width) {
    throw std::invalid_argument("observation map channels do not match the layer spec");
  }
  if (obs.pheromone.size() != static_cast<std::size_t>(ph.height) * ph.width) {
    throw std::invalid_argument("pheromone channel does not match the layer spec");
  }
}

NetOutput Network::forward(std::span<const double> params, const ObservationStack& obs,
                           ForwardCache* cache) const {
  check_shapes(params, obs);
  thread_local ForwardCache scratch;
  ForwardCache& c = cache ? *cache : scratch;
  c.trunks.resize(trunks_.size());
  for (std::size_t t = 0; t < trunks_.size(); ++t) forward_trunk(params, trunks_[t], obs, c.trunks[t]);

  NetOutput out;
  const auto& actor_in = c.trunks.front().fusion;
  const auto& critic_in = c.trunks.back().fusion;
  Eigen::Map<Eigen::Matrix<double, kNumActions, 1>> logits(out.logits.data());
  logits.noalias() = weights(params, actor_) * ConstVecMap(actor_in.data(), actor_.in);
  logits += biases(params, actor_);
  out.value = weights(params, critic_).row(0).dot(ConstVecMap(critic_in.data(), critic_.in)) +
              params[critic_.bias];

  const double zmax = *std::max_element(out.logits.begin(), out.logits.end());
  double sum = 0.0;
  for (int a = 0; a < kNumActions; ++a) sum += std::exp(out.logits[a] - zmax);
  const double lse = zmax + std::log(sum);
  for (int a = 0; a < kNumActions; ++a) {
    out.log_probs[a] = out.logits[a] - lse;
    out.probs[a] = std::exp(out.log_probs[a]);
  }
  c.output = out;
  return out;
}

void Network::backward(std::span<const double> params, const ForwardCache& cache,
                       std::span<const double> d_logits, double d_value,
                       std::span<double> grad) const {
  if (grad.size() != count_ || params.size() != count_) {
    throw std::invalid_argument("gradient/parameter size mismatch");
  }
  if (d_logits.size() != static_cast<std::size_t>(kNumActions)) {
    throw std::invalid_argument("expected 4 logit adjoints");
  }
  thread_local BackwardScratch s;
  ConstVecMap dl(d_logits.data(), kNumActions);
  const auto& actor_in = cache.trunks.front().fusion;
  const auto& critic_in = cache.trunks.back().fusion;
  weights(grad, actor_).noalias() += dl * ConstVecMap(actor_in.data(), actor_.in).transpose();
  biases(grad, actor_) += dl;
  weights(grad, critic_) += d_value * ConstVecMap(critic_in.data(), critic_.in).transpose();
  grad[critic_.bias] += d_value;

  const int fw = spec_.fusion_width;
  s.d_fusion.resize(fw);
  VecMap dfa(s.d_fusion.data(), fw);
  dfa.noalias() = weights(params, actor_).transpose() * dl;
  if (spec_.shared_trunk) {
    dfa += d_value * weights(params, critic_).row(0).transpose();
    backward_trunk(params, trunks_[0], cache.trunks[0], grad, s);
    return;
  }
  backward_trunk(params, trunks_[0], cache.trunks[0], grad, s);
  s.d_fusion.resize(fw);
  VecMap(s.d_fusion.data(), fw) = d_value * weights(params, critic_).row(0).transpose();
  backward_trunk(params, trunks_[1], cache.trunks[1], grad, s);
}

double entropy(const NetOutput& out) {
  double h = 0.0;
  for (int a = 0; a < kNumActions; ++a) h -= out.probs[a] * out.log_probs[a];
  return h;
}

std::pair<Action, double> sample_action(const NetOutput& out, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  double cum = 0.0;
  int chosen = kNumActions - 1;
  for (int a = 0; a < kNumActions; ++a) {
    cum += out.probs[a];
    if (u < cum) {
      chosen = a;
      break;
    }
  }
  // Guard against rounding landing on a zero-probability tail action.
  while (out.probs[chosen] <= 0.0 && chosen > 0) --chosen;
  return {static_cast<Action>(chosen), out.log_probs[chosen]};
}

std::optional<std::size_t> first_non_finite(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) return i;
  }
  return std::nullopt;
}

std::string encode_checkpoint(const PolicyParams& params, const AdamState* optimizer) {
  std::string out(kMagic, sizeof(kMagic));
  write_le<std::uint32_t>(out, kLayoutVersion);
  write_le<std::uint64_t>(out, params.spec.digest());
  write_u8(out, params.spec.shared_trunk ? 1 : 0);
  const auto fields = params.spec.serialize();
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(fields.size()));
  for (std::int32_t f : fields) write_le<std::int32_t>(out, f);
  write_le<std::uint64_t>(out, params.values.size());
  for (double v : params.values) write_f64(out, v);
  write_u8(out, optimizer ? 1 : 0);
  if (optimizer) {
    write_le<std::uint64_t>(out, optimizer->step);
    write_le<std::uint64_t>(out, optimizer->m.size());
    for (double v : optimizer->m) write_f64(out, v);
    for (double v : optimizer->v) write_f64(out, v);
  }
  return out;
}

void save_checkpoint(const std::filesystem::path& path, const PolicyParams& params,
                     const AdamState* optimizer) {
  write_file_atomic(path, encode_checkpoint(params, optimizer));
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  Reader r(bytes);
  if (r.take(sizeof(kMagic)) != std::string_view(kMagic, sizeof(kMagic))) {
    throw std::runtime_error("not a checkpoint (bad magic)");
  }
  const auto version = r.read<std::uint32_t>();
  if (version != kLayoutVersion) {
    throw std::runtime_error("unsupported checkpoint layout version " + std::to_string(version));
  }
  const auto digest = r.read<std::uint64_t>();
  const auto shared = r.read<std::uint8_t>();
  const auto nfields = r.read<std::uint32_t>();
  if (nfields > 4096) throw std::runtime_error("checkpoint layer spec too long");
  std::vector<std::int32_t> fields(nfields);
  for (auto& f : fields) f = r.read<std::int32_t>();
  Checkpoint ck;
  ck.params.spec = LayerSpec::deserialize(fields);
  if (ck.params.spec.digest() != digest) throw std::runtime_error("layer spec digest mismatch");
  if (ck.params.spec.shared_trunk != (shared != 0)) {
    throw std::runtime_error("shared_trunk flag disagrees with layer spec");
  }
  const auto count = r.read<std::uint64_t>();
  if (count != Network(ck.params.spec).parameter_count()) {
    throw std::runtime_error("parameter count does not match layer spec");
  }
  ck.params.values.resize(count);
  for (auto& v : ck.params.values) v = r.read_f64();
  if (r.read<std::uint8_t>() != 0) {
    AdamState st;
    st.step = r.read<std::uint64_t>();
    const auto q = r.read<std::uint64_t>();
    if (q != count) throw std::runtime_error("optimizer state size mismatch");
    st.m.resize(q);
    st.v.resize(q);
    for (auto& v : st.m) v = r.read_f64();
    for (auto& v : st.v) v = r.read_f64();
    ck.optimizer = std::move(st);
  }
  if (!r.done()) throw std::runtime_error("trailing bytes after checkpoint");
  return ck;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file(path));
}

}  // namespace piloc
