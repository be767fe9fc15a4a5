#include <algorithm>
#include <cmath>

#include "vidart/kernels.hpp"

namespace vidart::kernels::scalar {

namespace {

inline std::uint8_t round_clamp(float v) {
  const float r = std::nearbyint(v);
  return static_cast<std::uint8_t>(std::clamp(r, 0.0f, 255.0f));
}

void mask_u8(const std::uint8_t* in, std::uint8_t* out, std::size_t n, std::uint8_t mask) {
  for (std::size_t i = 0; i < n; ++i) out[i] = in[i] & mask;
}

void divide_u8(const std::uint8_t* in, std::uint8_t* out, std::size_t n, float divisor) {
  for (std::size_t i = 0; i < n; ++i) out[i] = round_clamp(static_cast<float>(in[i]) / divisor);
}

void accumulate_u8(const std::uint8_t* src, std::uint16_t* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] = static_cast<std::uint16_t>(acc[i] + src[i]);
}

void average_u16(const std::uint16_t* acc, std::uint8_t* out, std::size_t n, std::uint32_t count) {
  const float c = static_cast<float>(count);
  const std::uint32_t half = count / 2;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = static_cast<std::uint8_t>(std::floor(static_cast<float>(acc[i] + half) / c));
  }
}

void widen_u8(const std::uint8_t* in, float* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<float>(in[i]);
}

void narrow_f32(const float* in, std::uint8_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = round_clamp(in[i]);
}

void add_noise_u8(const std::uint8_t* in, const float* noise, std::uint8_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = round_clamp(static_cast<float>(in[i]) + noise[i]);
}

void fir_row_f32(const float* src, float* out, std::size_t n, const float* taps, std::size_t ntaps) {
  for (std::size_t x = 0; x < n; ++x) {
    float acc = 0.0f;
    for (std::size_t k = 0; k < ntaps; ++k) acc = acc + taps[k] * src[x + k];
    out[x] = acc;
  }
}

void fir_cols_f32(const float* const* rows, float* out, std::size_t n, const float* taps, std::size_t ntaps) {
  for (std::size_t x = 0; x < n; ++x) {
    float acc = 0.0f;
    for (std::size_t k = 0; k < ntaps; ++k) acc = acc + taps[k] * rows[k][x];
    out[x] = acc;
  }
}

float dot_f32(const float* a, const float* b, std::size_t n) {
  float lane[8] = {};
  const std::size_t body = n - n % 8;
  for (std::size_t i = 0; i < body; i += 8) {
    for (std::size_t l = 0; l < 8; ++l) lane[l] = lane[l] + a[i + l] * b[i + l];
  }
  // Same pairwise tree as the AVX2 horizontal reduction.
  const float s0 = (lane[0] + lane[4]) + (lane[2] + lane[6]);
  const float s1 = (lane[1] + lane[5]) + (lane[3] + lane[7]);
  float total = s0 + s1;
  for (std::size_t i = body; i < n; ++i) total = total + a[i] * b[i];
  return total;
}

std::uint64_t sum_u8(const std::uint8_t* in, std::size_t n) {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < n; ++i) s += in[i];
  return s;
}

}  // namespace

const KernelTable& table() noexcept {
  static const KernelTable t{Isa::Scalar, mask_u8,     divide_u8,   accumulate_u8, average_u16, widen_u8,
                             narrow_f32,  add_noise_u8, fir_row_f32, fir_cols_f32,  dot_f32,     sum_u8};
  return t;
}

}  // namespace vidart::kernels::scalar
