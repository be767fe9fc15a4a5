#pragma once

#include <array>
#include <span>
#include <vector>

#include "vidart/artifact_synth.hpp"
#include "vidart/dataset.hpp"

namespace vidart::loss {

struct LossConfig {
  double alpha = 0.5;    // contrastive weight
  double beta = 0.5;     // classification weight
  double tau = 0.1;      // temperature
  double epsilon = 1e-7; // probability clamp

  void validate() const;  // throws Parameter
};

using Probabilities = std::array<double, synth::kArtifactCount>;

struct Batch {
  std::vector<std::vector<double>> reps;
  std::vector<dataset::LabelVector> labels;
  std::vector<Probabilities> probs;

  std::size_t size() const noexcept { return reps.size(); }
  void validate() const;  // throws Shape
};

// Throws UndefinedSimilarity for a zero vector, Shape for a length mismatch.
double cosine_sim(std::span<const double> a, std::span<const double> b);

// Supervised contrastive term per sample. Positives are the other samples with
// an identical label vector; a sample without positives contributes 0.
std::vector<double> contrastive_loss(const Batch& batch, const LossConfig& cfg = {});

// Mean binary cross-entropy over the ten heads, probabilities clamped to [eps, 1-eps].
double bce_loss(const dataset::LabelVector& labels, const Probabilities& probs, double epsilon = 1e-7);

// Sum over samples of alpha * contrastive + beta * bce.
double total_loss(const Batch& batch, const LossConfig& cfg = {});

}  // namespace vidart::loss
