#pragma once

#include <cmath>
#include <string>

#include "vidart/artifact_synth.hpp"
#include "vidart/error.hpp"

namespace vidart::synth::detail {

inline void require_kind(const ArtifactSpec& spec, ArtifactKind want) {
  if (spec.kind != want) {
    throw Error(ErrorKind::Parameter,
                "spec kind '" + std::string(name(spec.kind)) + "' passed to " + std::string(name(want)) + " synthesizer");
  }
}

inline std::uint64_t require_seed(const ArtifactSpec& spec) {
  if (!spec.seed) throw Error(ErrorKind::Parameter, std::string(name(spec.kind)) + " requires a seed");
  return *spec.seed;
}

inline int integral_param(const ArtifactSpec& spec) {
  const double p = spec.param;
  if (!std::isfinite(p) || p != std::floor(p)) {
    throw Error(ErrorKind::Parameter, std::string(name(spec.kind)) + " parameter must be an integer");
  }
  return static_cast<int>(p);
}

}  // namespace vidart::synth::detail
