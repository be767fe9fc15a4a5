#include "vidart/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vidart/rng.hpp"

namespace vidart::io {

Clip synthetic_clip(int width, int height, int frames, std::uint64_t seed, Rational fps) {
  CounterRng rng(seed);
  const double two_pi = 2.0 * std::numbers::pi;
  const double fx = 0.6 + 1.4 * rng.uniform();
  const double fy = 0.4 + 1.2 * rng.uniform();
  const double phase = rng.uniform();
  const double drift = 0.01 + 0.03 * rng.uniform();
  const double base = 90.0 + 50.0 * rng.uniform();
  const double stripe_period = 4.0 + 6.0 * rng.uniform();
  const int tex_speed = 1 + static_cast<int>(rng.below(3));
  const std::uint64_t tex_key = rng.next();
  const double u_tilt = 20.0 * (rng.uniform() - 0.5);
  const double v_tilt = 20.0 * (rng.uniform() - 0.5);

  Clip clip;
  clip.fps = fps;
  clip.frames.reserve(static_cast<std::size_t>(frames));
  const double radius = std::max(2.0, std::min(width, height) / 6.0);
  for (int t = 0; t < frames; ++t) {
    Frame f(width, height);
    const double cx = width * (0.2 + 0.6 * std::fmod(phase + drift * t, 1.0));
    const double cy = height * (0.5 + 0.25 * std::sin(two_pi * (phase + 0.5 * drift * t)));
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        double v = base + 45.0 * std::sin(two_pi * (fx * x / width + drift * t + phase)) *
                              std::cos(two_pi * fy * y / height);
        v += 12.0 * std::sin((x + y) / stripe_period + 0.3 * t);
        const double dx = x - cx;
        const double dy = y - cy;
        if (dx * dx + dy * dy < radius * radius) v += 55.0;
        const auto cell = static_cast<std::uint64_t>((x + tex_speed * t) / 2) * 0x9E3779B1ULL +
                          static_cast<std::uint64_t>(y / 2) * 0x85EBCA77ULL;
        v += 36.0 * (static_cast<double>(mix64(tex_key ^ cell) >> 11) * 0x1.0p-53 - 0.5);
        f.y(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 16L, 235L));
      }
    }
    const int cw = width / 2;
    for (int y = 0; y < height / 2; ++y) {
      for (int x = 0; x < cw; ++x) {
        const double gx = static_cast<double>(x) / cw - 0.5;
        const double gy = 2.0 * y / height - 0.5;
        const auto i = static_cast<std::size_t>(y) * cw + x;
        f.chroma_u[i] = static_cast<std::uint8_t>(std::lround(128.0 + u_tilt * gx + 8.0 * gy));
        f.chroma_v[i] = static_cast<std::uint8_t>(std::lround(128.0 + v_tilt * gy - 8.0 * gx));
      }
    }
    clip.frames.push_back(std::move(f));
  }
  return clip;
}

}  // namespace vidart::io
