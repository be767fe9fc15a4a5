#pragma once

#include <filesystem>
#include <functional>
#include <string>

#include "doctest.h"
#include "vidart/error.hpp"
#include "vidart/frame_io.hpp"
#include "vidart/rng.hpp"

// Passes only if `expr` throws vidart::Error of the given kind.
#define CHECK_THROWS_KIND(expr, k)                                              \
  do {                                                                          \
    bool caught_ = false;                                                       \
    try {                                                                       \
      (void)(expr);                                                             \
    } catch (const vidart::Error& e_) {                                         \
      caught_ = true;                                                           \
      CHECK_MESSAGE(e_.kind() == (k), "got: " << e_.what());                    \
    }                                                                           \
    CHECK_MESSAGE(caught_, "expected a vidart::Error from " #expr);             \
  } while (0)

namespace testing {

// Fresh, empty scratch directory under the build tree's temp area.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("vidart_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Hand-rolled property runner: `cases` draws from independent seeded streams.
inline void for_all(int cases, std::uint64_t seed, const std::function<void(vidart::CounterRng&, int)>& prop) {
  for (int i = 0; i < cases; ++i) {
    vidart::CounterRng rng(vidart::derive_seed(seed, static_cast<std::uint64_t>(i)));
    CAPTURE(i);
    prop(rng, i);
  }
}

inline vidart::io::Clip constant_clip(int w, int h, int frames, std::uint8_t luma) {
  vidart::io::Clip c;
  for (int t = 0; t < frames; ++t) c.frames.emplace_back(w, h, luma);
  return c;
}

inline vidart::io::Clip random_clip(vidart::CounterRng& rng, int w, int h, int frames) {
  vidart::io::Clip c;
  for (int t = 0; t < frames; ++t) {
    vidart::io::Frame f(w, h);
    for (auto& v : f.luma) v = static_cast<std::uint8_t>(rng.below(256));
    for (auto& v : f.chroma_u) v = static_cast<std::uint8_t>(rng.below(256));
    for (auto& v : f.chroma_v) v = static_cast<std::uint8_t>(rng.below(256));
    c.frames.push_back(std::move(f));
  }
  return c;
}

}  // namespace testing
