#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace vidart {

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// FNV-1a, 64-bit.
std::uint64_t hash_bytes(std::span<const std::uint8_t> bytes) noexcept;
std::uint64_t hash_string(std::string_view s) noexcept;

// Child seed for a named sub-stream. Stable across platforms and releases:
// manifests record seeds derived this way.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view key) noexcept;
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t key) noexcept;

// Counter-based generator: the i-th draw is a pure function of (key, i), so
// any draw can be recomputed without replaying the stream. The cursor is a
// convenience for sequential consumers.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key, std::uint64_t start = 0) noexcept
      : key_(mix64(key)), counter_(start) {}

  std::uint64_t at(std::uint64_t counter) const noexcept;
  std::uint64_t next() noexcept { return at(counter_++); }
  std::uint64_t position() const noexcept { return counter_; }

  // [0, 1) with 53 random bits.
  double uniform() noexcept;
  // [0, n) without modulo bias; n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept;
  bool bernoulli(double p) noexcept { return uniform() < p; }
  // Two independent standard normals (Box-Muller).
  std::pair<double, double> normal_pair() noexcept;
  // Uniform in [lo, hi) from 24 random bits; bit-identical on every platform.
  float uniform_f32(float lo, float hi) noexcept;

  template <typename T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace vidart
