#include <string>

#include "vidart/artifact_synth.hpp"

namespace vidart::synth {

namespace {

constexpr std::array<std::string_view, kArtifactCount> kNames = {
    "motion_blur", "dark_scene",  "graininess",         "aliasing",   "banding",
    "blockiness",  "spatial_blur", "transmission_error", "frame_drop", "black_screen",
};

constexpr std::array<std::string_view, kLevelCount> kLevelNames = {"very_noticeable", "noticeable", "subtle",
                                                                   "very_subtle"};

// Rows in ArtifactKind order, columns in IntensityLevel order.
constexpr double kParams[kArtifactCount][kLevelCount] = {
    {16, 12, 8, 4},       // motion blur: frame numbers
    {4, 3, 2, 1.5},       // dark scene: decrease ratio
    {50, 25, 10, 5},      // graininess: noise std
    {4, 3, 2, 1.5},       // aliasing: sampling ratio
    {5, 4, 3, 2},         // banding: quantization ratio
    {47, 42, 37, 32},     // blockiness: QP
    {9, 7, 5, 3},         // spatial blur: kernel size
    {4, 2, 1, 0.5},       // transmission error: bitrate, Mbit/s
    {16, 12, 8, 4},       // frame drop: run length
    {16, 12, 8, 4},       // black screen: run length
};

}  // namespace

std::string_view name(ArtifactKind k) noexcept { return kNames[static_cast<std::size_t>(index(k))]; }
std::string_view name(IntensityLevel l) noexcept { return kLevelNames[static_cast<std::size_t>(index(l))]; }

std::optional<ArtifactKind> parse_artifact(std::string_view s) noexcept {
  for (const auto k : kAllArtifacts) {
    if (name(k) == s) return k;
  }
  return std::nullopt;
}

std::optional<IntensityLevel> parse_level(std::string_view s) noexcept {
  for (const auto l : kAllLevels) {
    if (name(l) == s) return l;
  }
  return std::nullopt;
}

double level_param(ArtifactKind k, IntensityLevel l) noexcept {
  return kParams[static_cast<std::size_t>(index(k))][static_cast<std::size_t>(index(l))];
}

ArtifactSpec ArtifactSpec::make(ArtifactKind kind, IntensityLevel level, std::optional<std::uint64_t> seed) {
  return {kind, level, level_param(kind, level), seed};
}

}  // namespace vidart::synth
