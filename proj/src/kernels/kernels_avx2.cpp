// Compiled with -mavx2 (no FMA); only reached when the CPU reports AVX2.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "vidart/kernels.hpp"

namespace vidart::kernels::avx2 {

namespace {

constexpr int kRound = _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC;

inline std::uint8_t round_clamp(float v) {
  return static_cast<std::uint8_t>(std::clamp(std::nearbyint(v), 0.0f, 255.0f));
}

inline __m256 load_u8x8(const std::uint8_t* p) {
  const __m128i bytes = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(p));
  return _mm256_cvtepi32_ps(_mm256_cvtepu8_epi32(bytes));
}

// Rounds half-to-even, clamps to [0, 255], stores eight bytes.
inline void store_round_u8x8(__m256 v, std::uint8_t* out) {
  v = _mm256_round_ps(v, kRound);
  v = _mm256_min_ps(_mm256_max_ps(v, _mm256_setzero_ps()), _mm256_set1_ps(255.0f));
  const __m256i i32 = _mm256_cvtps_epi32(v);
  const __m128i w16 = _mm_packus_epi32(_mm256_castsi256_si128(i32), _mm256_extracti128_si256(i32, 1));
  _mm_storel_epi64(reinterpret_cast<__m128i*>(out), _mm_packus_epi16(w16, w16));
}

void mask_u8(const std::uint8_t* in, std::uint8_t* out, std::size_t n, std::uint8_t mask) {
  const __m256i m = _mm256_set1_epi8(static_cast<char>(mask));
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(in + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_and_si256(v, m));
  }
  for (; i < n; ++i) out[i] = in[i] & mask;
}

void divide_u8(const std::uint8_t* in, std::uint8_t* out, std::size_t n, float divisor) {
  const __m256 d = _mm256_set1_ps(divisor);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) store_round_u8x8(_mm256_div_ps(load_u8x8(in + i), d), out + i);
  for (; i < n; ++i) out[i] = round_clamp(static_cast<float>(in[i]) / divisor);
}

void accumulate_u8(const std::uint8_t* src, std::uint16_t* acc, std::size_t n) {
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const __m256i wide = _mm256_cvtepu8_epi16(_mm_loadu_si128(reinterpret_cast<const __m128i*>(src + i)));
    const __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(acc + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(acc + i), _mm256_add_epi16(a, wide));
  }
  for (; i < n; ++i) acc[i] = static_cast<std::uint16_t>(acc[i] + src[i]);
}

void average_u16(const std::uint16_t* acc, std::uint8_t* out, std::size_t n, std::uint32_t count) {
  const float c = static_cast<float>(count);
  const std::uint32_t half = count / 2;
  const __m256 vc = _mm256_set1_ps(c);
  const __m256i vhalf = _mm256_set1_epi32(static_cast<int>(half));
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i a = _mm256_cvtepu16_epi32(_mm_loadu_si128(reinterpret_cast<const __m128i*>(acc + i)));
    const __m256 q = _mm256_div_ps(_mm256_cvtepi32_ps(_mm256_add_epi32(a, vhalf)), vc);
    store_round_u8x8(_mm256_floor_ps(q), out + i);
  }
  for (; i < n; ++i) out[i] = static_cast<std::uint8_t>(std::floor(static_cast<float>(acc[i] + half) / c));
}

void widen_u8(const std::uint8_t* in, float* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) _mm256_storeu_ps(out + i, load_u8x8(in + i));
  for (; i < n; ++i) out[i] = static_cast<float>(in[i]);
}

void narrow_f32(const float* in, std::uint8_t* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) store_round_u8x8(_mm256_loadu_ps(in + i), out + i);
  for (; i < n; ++i) out[i] = round_clamp(in[i]);
}

void add_noise_u8(const std::uint8_t* in, const float* noise, std::uint8_t* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) store_round_u8x8(_mm256_add_ps(load_u8x8(in + i), _mm256_loadu_ps(noise + i)), out + i);
  for (; i < n; ++i) out[i] = round_clamp(static_cast<float>(in[i]) + noise[i]);
}

void fir_row_f32(const float* src, float* out, std::size_t n, const float* taps, std::size_t ntaps) {
  std::size_t x = 0;
  for (; x + 8 <= n; x += 8) {
    __m256 acc = _mm256_setzero_ps();
    for (std::size_t k = 0; k < ntaps; ++k) {
      acc = _mm256_add_ps(acc, _mm256_mul_ps(_mm256_set1_ps(taps[k]), _mm256_loadu_ps(src + x + k)));
    }
    _mm256_storeu_ps(out + x, acc);
  }
  for (; x < n; ++x) {
    float acc = 0.0f;
    for (std::size_t k = 0; k < ntaps; ++k) acc = acc + taps[k] * src[x + k];
    out[x] = acc;
  }
}

void fir_cols_f32(const float* const* rows, float* out, std::size_t n, const float* taps, std::size_t ntaps) {
  std::size_t x = 0;
  for (; x + 8 <= n; x += 8) {
    __m256 acc = _mm256_setzero_ps();
    for (std::size_t k = 0; k < ntaps; ++k) {
      acc = _mm256_add_ps(acc, _mm256_mul_ps(_mm256_set1_ps(taps[k]), _mm256_loadu_ps(rows[k] + x)));
    }
    _mm256_storeu_ps(out + x, acc);
  }
  for (; x < n; ++x) {
    float acc = 0.0f;
    for (std::size_t k = 0; k < ntaps; ++k) acc = acc + taps[k] * rows[k][x];
    out[x] = acc;
  }
}

float dot_f32(const float* a, const float* b, std::size_t n) {
  __m256 acc = _mm256_setzero_ps();
  const std::size_t body = n - n % 8;
  for (std::size_t i = 0; i < body; i += 8) {
    acc = _mm256_add_ps(acc, _mm256_mul_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  }
  const __m128 quad = _mm_add_ps(_mm256_castps256_ps128(acc), _mm256_extractf128_ps(acc, 1));
  const __m128 pair = _mm_add_ps(quad, _mm_movehl_ps(quad, quad));
  float total = _mm_cvtss_f32(_mm_add_ss(pair, _mm_shuffle_ps(pair, pair, 0x1)));
  for (std::size_t i = body; i < n; ++i) total = total + a[i] * b[i];
  return total;
}

std::uint64_t sum_u8(const std::uint8_t* in, std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  const __m256i zero = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(in + i));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(v, zero));
  }
  alignas(32) std::uint64_t parts[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(parts), acc);
  std::uint64_t s = parts[0] + parts[1] + parts[2] + parts[3];
  for (; i < n; ++i) s += in[i];
  return s;
}

}  // namespace

const KernelTable& table() noexcept {
  static const KernelTable t{Isa::Avx2, mask_u8,     divide_u8,   accumulate_u8, average_u16, widen_u8,
                             narrow_f32, add_noise_u8, fir_row_f32, fir_cols_f32,  dot_f32,     sum_u8};
  return t;
}

}  // namespace vidart::kernels::avx2
