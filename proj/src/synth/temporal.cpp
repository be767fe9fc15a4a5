#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "common.hpp"
#include "vidart/kernels.hpp"
#include "vidart/rng.hpp"

namespace vidart::synth {

using detail::integral_param;
using detail::require_kind;
using detail::require_seed;

namespace {

void average_planes(const io::Clip& clip, int first, int count, io::Frame& dst) {
  const auto& k = kernels::active();
  auto average = [&](auto plane_of) {
    auto& out = plane_of(dst);
    std::vector<std::uint16_t> acc(out.size(), 0);
    for (int i = 0; i < count; ++i) {
      const auto& src = plane_of(clip.frames[static_cast<std::size_t>(first + i)]);
      k.accumulate_u8(src.data(), acc.data(), acc.size());
    }
    k.average_u16(acc.data(), out.data(), out.size(), static_cast<std::uint32_t>(count));
  };
  average([](auto& f) -> auto& { return f.luma; });
  average([](auto& f) -> auto& { return f.chroma_u; });
  average([](auto& f) -> auto& { return f.chroma_v; });
}

int run_length_param(const io::Clip& clip, const ArtifactSpec& spec) {
  const int len = integral_param(spec);
  if (len < 1) throw Error(ErrorKind::Parameter, std::string(name(spec.kind)) + " run length must be positive");
  if (len >= clip.length()) {
    throw Error(ErrorKind::Parameter, std::string(name(spec.kind)) + " run length " + std::to_string(len) +
                                          " must be shorter than the clip (" + std::to_string(clip.length()) + ")");
  }
  return len;
}

void copy_rows(const io::Frame& src, io::Frame& dst, int row0, int row1) {
  const auto w = static_cast<std::size_t>(dst.width);
  std::copy(src.luma.begin() + static_cast<std::ptrdiff_t>(row0 * w), src.luma.begin() + static_cast<std::ptrdiff_t>(row1 * w),
            dst.luma.begin() + static_cast<std::ptrdiff_t>(row0 * w));
  const auto cw = w / 2;
  const auto c0 = static_cast<std::ptrdiff_t>(row0 / 2 * cw);
  const auto c1 = static_cast<std::ptrdiff_t>((row1 + 1) / 2 * cw);
  std::copy(src.chroma_u.begin() + c0, src.chroma_u.begin() + c1, dst.chroma_u.begin() + c0);
  std::copy(src.chroma_v.begin() + c0, src.chroma_v.begin() + c1, dst.chroma_v.begin() + c0);
}

void fill_rows(io::Frame& dst, int row0, int row1, std::uint8_t value) {
  const auto w = static_cast<std::size_t>(dst.width);
  std::fill(dst.luma.begin() + static_cast<std::ptrdiff_t>(row0 * w), dst.luma.begin() + static_cast<std::ptrdiff_t>(row1 * w), value);
  const auto cw = w / 2;
  const auto c0 = static_cast<std::ptrdiff_t>(row0 / 2 * cw);
  const auto c1 = static_cast<std::ptrdiff_t>((row1 + 1) / 2 * cw);
  std::fill(dst.chroma_u.begin() + c0, dst.chroma_u.begin() + c1, value);
  std::fill(dst.chroma_v.begin() + c0, dst.chroma_v.begin() + c1, value);
}

struct LossSchedule {
  int slices_per_frame;
  double frame_fraction;
};

// Stand-in for the encoder bitrate knob: harsher levels lose more slices on
// more frames.
LossSchedule schedule_for(IntensityLevel level) {
  switch (level) {
    case IntensityLevel::VeryNoticeable: return {4, 1.0};
    case IntensityLevel::Noticeable: return {2, 1.0};
    case IntensityLevel::Subtle: return {1, 0.25};
    case IntensityLevel::VerySubtle: return {1, 0.10};
  }
  return {1, 0.10};
}

}  // namespace

io::Clip synth_motion_blur(const io::Clip& clip, const ArtifactSpec& spec, int stride) {
  require_kind(spec, ArtifactKind::MotionBlur);
  clip.validate();
  const int window = integral_param(spec);
  if (stride < 1) throw Error(ErrorKind::Parameter, "motion-blur stride must be positive");
  if (window < 1) throw Error(ErrorKind::Parameter, "motion-blur frame count must be positive");
  const int in_len = clip.length();
  if (in_len < stride || in_len % stride != 0) {
    throw Error(ErrorKind::Length, "motion blur needs a multiple of " + std::to_string(stride) + " frames, got " +
                                       std::to_string(in_len));
  }
  if (window > in_len) {
    throw Error(ErrorKind::Length, "motion-blur window " + std::to_string(window) + " exceeds " +
                                       std::to_string(in_len) + " input frames");
  }
  const int out_len = in_len / stride;
  io::Clip out;
  out.fps = {clip.fps.num, clip.fps.den * static_cast<std::uint32_t>(stride)};
  out.frames.reserve(static_cast<std::size_t>(out_len));
  for (int t = 0; t < out_len; ++t) {
    const int centre = t * stride;
    const int first = std::clamp(centre - (window - 1) / 2, 0, in_len - window);
    io::Frame f(clip.width(), clip.height());
    average_planes(clip, first, window, f);
    out.frames.push_back(std::move(f));
  }
  return out;
}

int seeded_run_start(std::uint64_t seed, int clip_length, int run_length) {
  if (run_length < 1 || run_length >= clip_length) throw Error(ErrorKind::Parameter, "run length must be in [1, clip length)");
  CounterRng rng(derive_seed(seed, "run-start"));
  return static_cast<int>(rng.below(static_cast<std::uint64_t>(clip_length - run_length + 1)));
}

io::Clip synth_frame_drop(const io::Clip& clip, const ArtifactSpec& spec) {
  require_kind(spec, ArtifactKind::FrameDrop);
  clip.validate();
  const std::uint64_t seed = require_seed(spec);
  const int len = run_length_param(clip, spec);
  const int start = seeded_run_start(seed, clip.length(), len);
  // Frozen playback: hold the last good frame, or the first good one at t=0.
  const int hold = start > 0 ? start - 1 : start + len;
  io::Clip out = clip;
  for (int t = start; t < start + len; ++t) out.frames[static_cast<std::size_t>(t)] = clip.frames[static_cast<std::size_t>(hold)];
  return out;
}

io::Clip synth_black_screen(const io::Clip& clip, const ArtifactSpec& spec) {
  require_kind(spec, ArtifactKind::BlackScreen);
  clip.validate();
  const std::uint64_t seed = require_seed(spec);
  const int len = run_length_param(clip, spec);
  const int start = seeded_run_start(seed, clip.length(), len);
  io::Clip out = clip;
  const io::Frame black(clip.width(), clip.height(), 16, 128);
  for (int t = start; t < start + len; ++t) out.frames[static_cast<std::size_t>(t)] = black;
  return out;
}

TransmissionResult transmission_error_with_log(const io::Clip& clip, const ArtifactSpec& spec) {
  require_kind(spec, ArtifactKind::TransmissionError);
  clip.validate();
  const std::uint64_t seed = require_seed(spec);
  const LossSchedule sched = schedule_for(spec.level);
  const int frames = clip.length();
  const int h = clip.height();
  const int slice_count = (h + kSliceRows - 1) / kSliceRows;
  const int per_frame = std::min(sched.slices_per_frame, slice_count);

  std::vector<int> affected(static_cast<std::size_t>(frames));
  std::iota(affected.begin(), affected.end(), 0);
  if (sched.frame_fraction < 1.0) {
    const int count = std::clamp(static_cast<int>(std::lround(sched.frame_fraction * frames)), 1, frames);
    CounterRng rng(derive_seed(seed, "frames"));
    rng.shuffle(std::span<int>(affected));
    affected.resize(static_cast<std::size_t>(count));
    std::sort(affected.begin(), affected.end());
  }

  TransmissionResult result{clip, {}};
  std::vector<int> slices(static_cast<std::size_t>(slice_count));
  for (const int t : affected) {
    std::iota(slices.begin(), slices.end(), 0);
    CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    rng.shuffle(std::span<int>(slices));
    std::sort(slices.begin(), slices.begin() + per_frame);
    io::Frame& dst = result.clip.frames[static_cast<std::size_t>(t)];
    for (int i = 0; i < per_frame; ++i) {
      const int s = slices[static_cast<std::size_t>(i)];
      const int row0 = s * kSliceRows;
      const int row1 = std::min(row0 + kSliceRows, h);
      // Conceal from the already-concealed previous output frame; mid-grey at t=0.
      if (t == 0) {
        fill_rows(dst, row0, row1, 128);
      } else {
        copy_rows(result.clip.frames[static_cast<std::size_t>(t - 1)], dst, row0, row1);
      }
      result.lost.push_back({t, s});
    }
  }
  return result;
}

io::Clip synth_transmission_error(const io::Clip& clip, const ArtifactSpec& spec) {
  return transmission_error_with_log(clip, spec).clip;
}

io::Clip synthesize(const io::Clip& clip, const ArtifactSpec& spec, int motion_stride) {
  switch (spec.kind) {
    case ArtifactKind::MotionBlur: return synth_motion_blur(clip, spec, motion_stride);
    case ArtifactKind::DarkScene: return synth_dark_scene(clip, spec);
    case ArtifactKind::Graininess: return synth_graininess(clip, spec);
    case ArtifactKind::Aliasing: return synth_aliasing(clip, spec);
    case ArtifactKind::Banding: return synth_banding(clip, spec);
    case ArtifactKind::Blockiness: return synth_blockiness(clip, spec);
    case ArtifactKind::SpatialBlur: return synth_spatial_blur(clip, spec);
    case ArtifactKind::TransmissionError: return synth_transmission_error(clip, spec);
    case ArtifactKind::FrameDrop: return synth_frame_drop(clip, spec);
    case ArtifactKind::BlackScreen: return synth_black_screen(clip, spec);
  }
  throw Error(ErrorKind::Parameter, "unknown artifact kind");
}

}  // namespace vidart::synth
