#include <algorithm>
#include <cmath>
#include <vector>

#include "common.hpp"
#include "vidart/kernels.hpp"
#include "vidart/rng.hpp"

namespace vidart::synth {

using detail::integral_param;
using detail::require_kind;
using detail::require_seed;

namespace {

// Nearest-neighbour index map from `dst` samples onto `src` samples (pixel centres).
std::vector<int> nearest_map(int dst, int src) {
  std::vector<int> map(static_cast<std::size_t>(dst));
  for (int i = 0; i < dst; ++i) {
    const auto s = (2LL * i + 1) * src / (2LL * dst);
    map[static_cast<std::size_t>(i)] = static_cast<int>(std::min<long long>(s, src - 1));
  }
  return map;
}

std::vector<float> gaussian_taps(int size) {
  const double sigma = size / 6.0;
  const int r = size / 2;
  std::vector<double> w(static_cast<std::size_t>(size));
  double total = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - r;
    w[static_cast<std::size_t>(i)] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    total += w[static_cast<std::size_t>(i)];
  }
  std::vector<float> taps(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) taps[i] = static_cast<float>(w[i] / total);
  return taps;
}

}  // namespace

io::Clip synth_aliasing(const io::Clip& clip, const ArtifactSpec& spec) {
  require_kind(spec, ArtifactKind::Aliasing);
  clip.validate();
  const double ratio = spec.param;
  if (!(ratio >= 1.0)) throw Error(ErrorKind::Parameter, "aliasing sampling ratio must be >= 1");
  const int w = clip.width();
  const int h = clip.height();
  const int dw = std::max(1, static_cast<int>(std::lround(w / ratio)));
  const int dh = std::max(1, static_cast<int>(std::lround(h / ratio)));
  const auto down_x = nearest_map(dw, w);
  const auto down_y = nearest_map(dh, h);
  const auto up_x = nearest_map(w, dw);
  const auto up_y = nearest_map(h, dh);
  // Composite map: output sample -> source sample of the down/up resample.
  std::vector<int> src_x(static_cast<std::size_t>(w));
  std::vector<int> src_y(static_cast<std::size_t>(h));
  for (int x = 0; x < w; ++x) src_x[static_cast<std::size_t>(x)] = down_x[static_cast<std::size_t>(up_x[static_cast<std::size_t>(x)])];
  for (int y = 0; y < h; ++y) src_y[static_cast<std::size_t>(y)] = down_y[static_cast<std::size_t>(up_y[static_cast<std::size_t>(y)])];

  io::Clip out = clip;
  for (std::size_t t = 0; t < clip.frames.size(); ++t) {
    const io::Frame& in = clip.frames[t];
    io::Frame& dst = out.frames[t];
    for (int y = 0; y < h; ++y) {
      const auto row = in.luma_row(src_y[static_cast<std::size_t>(y)]);
      auto drow = dst.luma_row(y);
      for (int x = 0; x < w; ++x) drow[static_cast<std::size_t>(x)] = row[static_cast<std::size_t>(src_x[static_cast<std::size_t>(x)])];
    }
  }
  return out;
}

io::Clip synth_banding(const io::Clip& clip, const ArtifactSpec& spec) {
  require_kind(spec, ArtifactKind::Banding);
  clip.validate();
  const int ratio = integral_param(spec);
  if (ratio < 0 || ratio > 8) throw Error(ErrorKind::Parameter, "banding quantization ratio must be in [0, 8]");
  // floor(x / 2^r) * 2^r == x with the low r bits cleared.
  const auto mask = static_cast<std::uint8_t>(0xFFu << ratio);
  io::Clip out = clip;
  for (auto& f : out.frames) kernels::mask(f.luma, f.luma, mask);
  return out;
}

io::Clip synth_dark_scene(const io::Clip& clip, const ArtifactSpec& spec) {
  require_kind(spec, ArtifactKind::DarkScene);
  clip.validate();
  if (!(spec.param > 0.0)) throw Error(ErrorKind::Parameter, "dark-scene decrease ratio must be positive");
  const auto divisor = static_cast<float>(spec.param);
  const auto& k = kernels::active();
  io::Clip out = clip;
  for (auto& f : out.frames) k.divide_u8(f.luma.data(), f.luma.data(), f.luma.size(), divisor);
  return out;
}

io::Clip synth_graininess(const io::Clip& clip, const ArtifactSpec& spec) {
  require_kind(spec, ArtifactKind::Graininess);
  clip.validate();
  const std::uint64_t seed = require_seed(spec);
  if (!(spec.param >= 0.0)) throw Error(ErrorKind::Parameter, "graininess std must be non-negative");
  const double sigma = spec.param;
  const auto& k = kernels::active();
  io::Clip out = clip;
  std::vector<float> noise(out.frames.front().luma.size());
  for (std::size_t t = 0; t < out.frames.size(); ++t) {
    // One stream per frame, so frames are independent of processing order.
    CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    for (std::size_t i = 0; i < noise.size(); i += 2) {
      const auto [a, b] = rng.normal_pair();
      noise[i] = static_cast<float>(sigma * a);
      if (i + 1 < noise.size()) noise[i + 1] = static_cast<float>(sigma * b);
    }
    auto& f = out.frames[t];
    k.add_noise_u8(f.luma.data(), noise.data(), f.luma.data(), f.luma.size());
  }
  return out;
}

io::Clip synth_spatial_blur(const io::Clip& clip, const ArtifactSpec& spec) {
  require_kind(spec, ArtifactKind::SpatialBlur);
  clip.validate();
  const int size = integral_param(spec);
  if (size < 1 || size % 2 == 0) throw Error(ErrorKind::Parameter, "spatial-blur kernel size must be odd and positive");
  const auto taps = gaussian_taps(size);
  const int r = size / 2;
  const int w = clip.width();
  const int h = clip.height();
  const auto& k = kernels::active();

  io::Clip out = clip;
  std::vector<float> padded(static_cast<std::size_t>(w + 2 * r));
  std::vector<float> horiz(static_cast<std::size_t>(w) * h);
  std::vector<float> row_out(static_cast<std::size_t>(w));
  std::vector<const float*> rows(static_cast<std::size_t>(size));
  for (auto& f : out.frames) {
    for (int y = 0; y < h; ++y) {
      const auto src = f.luma_row(y);
      k.widen_u8(src.data(), padded.data() + r, static_cast<std::size_t>(w));
      std::fill_n(padded.begin(), r, padded[static_cast<std::size_t>(r)]);
      std::fill_n(padded.begin() + r + w, r, padded[static_cast<std::size_t>(r + w - 1)]);
      k.fir_row_f32(padded.data(), horiz.data() + static_cast<std::size_t>(y) * w, static_cast<std::size_t>(w),
                    taps.data(), taps.size());
    }
    for (int y = 0; y < h; ++y) {
      for (int j = 0; j < size; ++j) {
        const int sy = std::clamp(y + j - r, 0, h - 1);
        rows[static_cast<std::size_t>(j)] = horiz.data() + static_cast<std::size_t>(sy) * w;
      }
      k.fir_cols_f32(rows.data(), row_out.data(), static_cast<std::size_t>(w), taps.data(), taps.size());
      k.narrow_f32(row_out.data(), f.luma_row(y).data(), static_cast<std::size_t>(w));
    }
  }
  return out;
}

}  // namespace vidart::synth
