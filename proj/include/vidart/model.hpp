#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vidart/artifact_synth.hpp"
#include "vidart/frame_io.hpp"

namespace vidart::model {

struct AdfeConfig {
  int levels = 2;
  int kernel = 3;                   // guide, region and downsampling convolutions
  int regions = 4;                  // region filters per level
  std::vector<int> channels = {8, 16};  // output channels of each level
  int generator_hidden = 16;        // filter-generator bottleneck width
  int pool_grid = 4;                // final adaptive pooling grid (pool_grid x pool_grid)
  int embed_dim = 64;

  void validate() const;  // throws Parameter
  bool operator==(const AdfeConfig&) const = default;
};

struct RmvitConfig {
  int segment_len = 8;
  int mem_tokens = 4;
  int depth = 2;
  int heads = 2;
  int dim = 32;
  int mlp_hidden = 64;
  int out_dim = 128;
  bool position_encoding = true;

  void validate() const;
  bool operator==(const RmvitConfig&) const = default;
};

struct ModelConfig {
  AdfeConfig adfe;
  RmvitConfig rmvit;
  int head_hidden = 32;

  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

// Full-size shape: six pyramid levels, 2048-d frame embeddings, 128-d sequence
// representation, segments of eight frames.
ModelConfig full_scale_config();

struct LayoutEntry {
  std::string name;
  std::size_t offset = 0;
  std::size_t count = 0;
  std::size_t fan_in = 0;  // 0 marks layer-norm scale (init 1) / shift (init 0)
  bool is_norm_scale = false;
};

// Named, ordered parameter table; every tensor appears exactly once and
// entries tile [0, total) without gaps.
std::vector<LayoutEntry> build_layout(const ModelConfig& cfg);
std::size_t layout_size(const std::vector<LayoutEntry>& layout) noexcept;

class ModelParams {
 public:
  ModelParams(ModelConfig cfg, std::uint64_t init_seed, std::vector<float> values);

  const ModelConfig& config() const noexcept { return cfg_; }
  std::uint64_t init_seed() const noexcept { return seed_; }
  std::span<const float> values() const noexcept { return values_; }
  std::span<float> mutable_values() noexcept { return values_; }
  const std::vector<LayoutEntry>& layout() const noexcept { return layout_; }

  // Throws Layout if the name is unknown.
  std::span<const float> tensor(std::string_view name) const;
  std::span<float> mutable_tensor(std::string_view name);

  // Throws Layout when the value count disagrees with the layout.
  void check_layout() const;

 private:
  ModelConfig cfg_;
  std::uint64_t seed_;
  std::vector<float> values_;
  std::vector<LayoutEntry> layout_;
};

// Weights and biases uniform in +-1/sqrt(fan_in); norm scales 1, shifts 0.
// Each tensor draws from its own named stream, so values are platform-independent.
ModelParams init_params(std::uint64_t seed, const ModelConfig& cfg);

// Params file: "VIDARTPM", u32 version, the config as little-endian i32
// fields, u64 seed, u64 value count, then little-endian float32 values.
void save_params(const ModelParams& p, std::ostream& out);
void save_params(const ModelParams& p, const std::filesystem::path& path);
ModelParams load_params(std::istream& in);
ModelParams load_params(const std::filesystem::path& path);

// C x H x W activations, channel-major.
struct FeatureMap {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<float> data;

  float at(int c, int y, int x) const noexcept {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
};

struct AdfeLevelTrace {
  std::vector<int> mask;   // region index per site of the level input (argmax, ties -> lowest)
  FeatureMap guide;        // region-aware guided features
  FeatureMap region_out;   // mask-selected region convolution
  FeatureMap output;       // after strided downsampling
};

struct AdfeTrace {
  std::vector<AdfeLevelTrace> levels;
};

using FrameEmbedding = std::vector<float>;
using SeqRepresentation = std::vector<float>;

// Luma of the frame, scaled to [0, 1], through the pyramid. Throws Shape if the
// frame is too small for the pyramid and pooling grid.
FrameEmbedding adfe_forward(const io::Frame& frame, const ModelParams& params, AdfeTrace* trace = nullptr);

// Token rows (memory tokens first) through the transformer blocks and final norm.
std::vector<std::vector<float>> vit_encode(const std::vector<std::vector<float>>& tokens, const ModelParams& params);
// Frame embedding -> transformer width.
std::vector<float> embed_token(const FrameEmbedding& h, const ModelParams& params);
// Sinusoidal position code for a slot within a segment.
std::vector<float> position_code(int position, int dim);
// Average of the given tokens through the output MLP.
SeqRepresentation sequence_head(const std::vector<std::vector<float>>& tokens, const ModelParams& params);

SeqRepresentation rmvit_forward(const std::vector<FrameEmbedding>& embeddings, const ModelParams& params);

struct HeadOutput {
  double probability = 0.5;
  bool present = false;  // probability > 0.5
};
using HeadOutputs = std::array<HeadOutput, synth::kArtifactCount>;

inline bool decide(double p) noexcept { return p > 0.5; }

HeadOutputs predict_heads(const SeqRepresentation& v, const ModelParams& params);

// Per-frame ADFE (parallel over `jobs` threads), RMViT, heads.
HeadOutputs detector_forward(const io::Clip& clip, const ModelParams& params, int jobs = 1);

}  // namespace vidart::model
