#pragma once

#include <cstdint>

#include "vidart/frame_io.hpp"

namespace vidart::io {

// Deterministic moving test content with smooth gradients, drifting
// structure and fine texture. Stands in for real source footage in tests,
// dry runs and the --synthetic-sources mode of the CLI.
Clip synthetic_clip(int width, int height, int frames, std::uint64_t seed, Rational fps = {25, 1});

}  // namespace vidart::io
