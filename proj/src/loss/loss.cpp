#include "vidart/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vidart/error.hpp"

namespace vidart::loss {

void LossConfig::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw Error(ErrorKind::Parameter, "loss weights must be non-negative");
  if (!(tau > 0.0)) throw Error(ErrorKind::Parameter, "temperature must be positive");
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw Error(ErrorKind::Parameter, "probability clamp must lie in (0, 0.5)");
}

void Batch::validate() const {
  if (labels.size() != reps.size() || probs.size() != reps.size()) {
    throw Error(ErrorKind::Shape, "batch arrays disagree in length");
  }
  for (const auto& r : reps) {
    if (r.size() != reps.front().size()) throw Error(ErrorKind::Shape, "representations differ in dimension");
  }
}

double cosine_sim(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::Shape, "cosine similarity of vectors of different length");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) throw Error(ErrorKind::UndefinedSimilarity, "cosine similarity with a zero vector");
  return std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

std::vector<double> contrastive_loss(const Batch& batch, const LossConfig& cfg) {
  cfg.validate();
  batch.validate();
  const std::size_t n = batch.size();
  if (n < 2) throw Error(ErrorKind::Shape, "contrastive loss needs at least two samples");

  std::vector<std::vector<double>> logit(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) logit[i][j] = cosine_sim(batch.reps[i], batch.reps[j]) / cfg.tau;
    }
  }

  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    // log-sum-exp over k != i, shifted by the row maximum.
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      if (k != i) peak = std::max(peak, logit[i][k]);
    }
    double denom = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k != i) denom += std::exp(logit[i][k] - peak);
    }
    const double log_denom = peak + std::log(denom);

    double sum = 0.0;
    std::size_t positives = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || batch.labels[j] != batch.labels[i]) continue;
      sum += log_denom - logit[i][j];
      ++positives;
    }
    out[i] = positives == 0 ? 0.0 : sum / static_cast<double>(positives);
  }
  return out;
}

double bce_loss(const dataset::LabelVector& labels, const Probabilities& probs, double epsilon) {
  double s = 0.0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    const double p = std::clamp(probs[j], epsilon, 1.0 - epsilon);
    s += labels.test(synth::kAllArtifacts[j]) ? std::log(p) : std::log1p(-p);
  }
  return -s / static_cast<double>(probs.size());
}

double total_loss(const Batch& batch, const LossConfig& cfg) {
  const auto con = contrastive_loss(batch, cfg);
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    total += cfg.alpha * con[i] + cfg.beta * bce_loss(batch.labels[i], batch.probs[i], cfg.epsilon);
  }
  return total;
}

}  // namespace vidart::loss
