#pragma once

// Data-parallel inner loops shared by the synthesizers and the reference
// model. Each kernel has a scalar reference and (on x86-64) an AVX2 variant.
// Variants are bit-identical: the scalar code performs exactly the lane-wise
// operation sequence of the vector code, and floating-point contraction is
// disabled for the whole build.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace vidart::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

struct KernelTable {
  Isa isa;
  // out[i] = in[i] & mask
  void (*mask_u8)(const std::uint8_t* in, std::uint8_t* out, std::size_t n, std::uint8_t mask);
  // out[i] = clamp(nearbyint(float(in[i]) / divisor), 0, 255)
  void (*divide_u8)(const std::uint8_t* in, std::uint8_t* out, std::size_t n, float divisor);
  // acc[i] += src[i]
  void (*accumulate_u8)(const std::uint8_t* src, std::uint16_t* acc, std::size_t n);
  // out[i] = floor(float(acc[i] + count/2) / float(count))
  void (*average_u16)(const std::uint16_t* acc, std::uint8_t* out, std::size_t n, std::uint32_t count);
  // out[i] = float(in[i])
  void (*widen_u8)(const std::uint8_t* in, float* out, std::size_t n);
  // out[i] = clamp(nearbyint(in[i]), 0, 255)
  void (*narrow_f32)(const float* in, std::uint8_t* out, std::size_t n);
  // out[i] = clamp(nearbyint(float(in[i]) + noise[i]), 0, 255)
  void (*add_noise_u8)(const std::uint8_t* in, const float* noise, std::uint8_t* out, std::size_t n);
  // out[x] = sum_k taps[k] * src[x + k], k ascending; src holds n + ntaps - 1 samples.
  void (*fir_row_f32)(const float* src, float* out, std::size_t n, const float* taps, std::size_t ntaps);
  // out[x] = sum_k taps[k] * rows[k][x], k ascending.
  void (*fir_cols_f32)(const float* const* rows, float* out, std::size_t n, const float* taps, std::size_t ntaps);
  // Eight interleaved partial sums (lane i takes elements i, i+8, ...), reduced pairwise.
  float (*dot_f32)(const float* a, const float* b, std::size_t n);
  std::uint64_t (*sum_u8)(const std::uint8_t* in, std::size_t n);
};

bool isa_supported(Isa isa) noexcept;
const KernelTable& table_for(Isa isa);

// Active table. Defaults to the best supported ISA; the VIDART_ISA environment
// variable ("scalar" or "avx2") overrides at first use.
const KernelTable& active() noexcept;
// Throws Parameter if the ISA is not supported on this CPU/build.
void set_active(Isa isa);

// Convenience wrappers over the active table.
inline void mask(std::span<const std::uint8_t> in, std::span<std::uint8_t> out, std::uint8_t m) {
  active().mask_u8(in.data(), out.data(), in.size(), m);
}
inline float dot(std::span<const float> a, std::span<const float> b) {
  return active().dot_f32(a.data(), b.data(), a.size());
}
inline std::uint64_t sum(std::span<const std::uint8_t> in) { return active().sum_u8(in.data(), in.size()); }

namespace scalar {
const KernelTable& table() noexcept;
}
#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
const KernelTable& table() noexcept;
}
#endif

}  // namespace vidart::kernels
