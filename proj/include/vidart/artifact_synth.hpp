#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "vidart/frame_io.hpp"

namespace vidart::synth {

// Canonical label order: the five source artifacts, then the five non-source
// artifacts. LabelVector bit j corresponds to the j-th enumerator.
enum class ArtifactKind : std::uint8_t {
  MotionBlur,
  DarkScene,
  Graininess,
  Aliasing,
  Banding,
  Blockiness,
  SpatialBlur,
  TransmissionError,
  FrameDrop,
  BlackScreen,
};
inline constexpr int kArtifactCount = 10;
inline constexpr std::array<ArtifactKind, kArtifactCount> kAllArtifacts = {
    ArtifactKind::MotionBlur, ArtifactKind::DarkScene,   ArtifactKind::Graininess,        ArtifactKind::Aliasing,
    ArtifactKind::Banding,    ArtifactKind::Blockiness,  ArtifactKind::SpatialBlur,       ArtifactKind::TransmissionError,
    ArtifactKind::FrameDrop,  ArtifactKind::BlackScreen,
};

enum class IntensityLevel : std::uint8_t { VeryNoticeable, Noticeable, Subtle, VerySubtle };
inline constexpr int kLevelCount = 4;
inline constexpr std::array<IntensityLevel, kLevelCount> kAllLevels = {
    IntensityLevel::VeryNoticeable, IntensityLevel::Noticeable, IntensityLevel::Subtle, IntensityLevel::VerySubtle};

constexpr int index(ArtifactKind k) noexcept { return static_cast<int>(k); }
constexpr int index(IntensityLevel l) noexcept { return static_cast<int>(l); }
constexpr bool is_source(ArtifactKind k) noexcept { return index(k) < index(ArtifactKind::Blockiness); }
constexpr bool is_stochastic(ArtifactKind k) noexcept {
  return k == ArtifactKind::Graininess || k == ArtifactKind::FrameDrop || k == ArtifactKind::BlackScreen ||
         k == ArtifactKind::TransmissionError;
}

// snake_case names used on the command line and in manifests.
std::string_view name(ArtifactKind k) noexcept;
std::string_view name(IntensityLevel l) noexcept;
std::optional<ArtifactKind> parse_artifact(std::string_view s) noexcept;
std::optional<IntensityLevel> parse_level(std::string_view s) noexcept;

// Synthesis parameter for each (artifact, level) cell:
//   aliasing sampling ratio 4/3/2/1.5, banding quantization ratio 5/4/3/2,
//   dark-scene decrease ratio 4/3/2/1.5, motion-blur frame count 16/12/8/4,
//   graininess std 50/25/10/5, blockiness QP 47/42/37/32,
//   frame-drop length 16/12/8/4, spatial-blur kernel 9/7/5/3,
//   transmission-error bitrate (Mbit/s) 4/2/1/0.5, black-screen length 16/12/8/4.
double level_param(ArtifactKind k, IntensityLevel l) noexcept;

struct ArtifactSpec {
  ArtifactKind kind = ArtifactKind::MotionBlur;
  IntensityLevel level = IntensityLevel::VeryNoticeable;
  double param = 0.0;
  std::optional<std::uint64_t> seed;

  // Spec with the table parameter for (kind, level).
  static ArtifactSpec make(ArtifactKind kind, IntensityLevel level, std::optional<std::uint64_t> seed = {});
  bool matches_table() const noexcept { return param == level_param(kind, level); }
  bool operator==(const ArtifactSpec&) const = default;
};

// Temporal stride used when motion blur reduces an HFR patch (512 -> 64).
inline constexpr int kHfrStride = 8;

io::Clip synth_aliasing(const io::Clip& clip, const ArtifactSpec& spec);
io::Clip synth_banding(const io::Clip& clip, const ArtifactSpec& spec);
io::Clip synth_dark_scene(const io::Clip& clip, const ArtifactSpec& spec);
// Output frame t averages `param` consecutive input frames centred on t*stride
// (window shifted inward at the clip ends); output length = input / stride.
io::Clip synth_motion_blur(const io::Clip& clip, const ArtifactSpec& spec, int stride = kHfrStride);
io::Clip synth_graininess(const io::Clip& clip, const ArtifactSpec& spec);
io::Clip synth_blockiness(const io::Clip& clip, const ArtifactSpec& spec);
io::Clip synth_spatial_blur(const io::Clip& clip, const ArtifactSpec& spec);
io::Clip synth_frame_drop(const io::Clip& clip, const ArtifactSpec& spec);
io::Clip synth_black_screen(const io::Clip& clip, const ArtifactSpec& spec);
io::Clip synth_transmission_error(const io::Clip& clip, const ArtifactSpec& spec);

// Block-DCT codec pass: 8x8 orthonormal DCT-II of luma, AC coefficients
// quantized with step 2^((qp-4)/6), DC kept, inverse transform, round, clip.
io::Clip encode_block_dct(const io::Clip& clip, double qp);
double qstep_for_qp(double qp) noexcept;

// Start frame of the seeded run used by frame drop and black screen.
int seeded_run_start(std::uint64_t seed, int clip_length, int run_length);

struct LostSlice {
  int frame = 0;
  int slice = 0;  // rows [16*slice, 16*slice + 16)
  bool operator==(const LostSlice&) const = default;
};
inline constexpr int kSliceRows = 16;

struct TransmissionResult {
  io::Clip clip;
  std::vector<LostSlice> lost;
};
TransmissionResult transmission_error_with_log(const io::Clip& clip, const ArtifactSpec& spec);

// Dispatch on spec.kind. Motion blur uses `motion_stride`.
io::Clip synthesize(const io::Clip& clip, const ArtifactSpec& spec, int motion_stride = kHfrStride);

}  // namespace vidart::synth
