#include "vidart/eval.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "vidart/error.hpp"
#include "vidart/model.hpp"

namespace vidart::eval {

namespace {

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

Confusion confusion(std::span<const int> labels, std::span<const int> preds) {
  if (labels.size() != preds.size()) {
    throw Error(ErrorKind::Alignment, std::to_string(labels.size()) + " labels vs " + std::to_string(preds.size()) +
                                          " predictions");
  }
  if (labels.empty()) throw Error(ErrorKind::Alignment, "no samples");
  Confusion c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool y = labels[i] != 0, p = preds[i] != 0;
    if (y && p) ++c.tp;
    else if (!y && p) ++c.fp;
    else if (y) ++c.fn;
    else ++c.tn;
  }
  return c;
}

void check_scores(std::span<const int> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) {
    throw Error(ErrorKind::Alignment, std::to_string(labels.size()) + " labels vs " + std::to_string(scores.size()) +
                                          " scores");
  }
  const auto pos = static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](int y) { return y != 0; }));
  if (pos == 0 || pos == labels.size()) throw Error(ErrorKind::UndefinedAuc, "labels contain a single class");
}

}  // namespace

double accuracy(std::span<const int> labels, std::span<const int> preds) {
  const auto c = confusion(labels, preds);
  return 100.0 * static_cast<double>(c.tp + c.tn) / static_cast<double>(labels.size());
}

double f1(std::span<const int> labels, std::span<const int> preds) {
  const auto c = confusion(labels, preds);
  if (c.tp == 0) return 0.0;
  const double p = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  const double r = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  return 2.0 * p * r / (p + r);
}

RocCurve roc_auc(std::span<const int> labels, std::span<const double> scores) {
  check_scores(labels, scores);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  const auto pos = static_cast<double>(std::count_if(labels.begin(), labels.end(), [](int y) { return y != 0; }));
  const auto neg = static_cast<double>(labels.size()) - pos;

  RocCurve roc;
  roc.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    // Every sample sharing this score flips at the same threshold.
    const double s = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == s; ++i) {
      if (labels[order[i]] != 0) ++tp;
      else ++fp;
    }
    roc.points.push_back({s, static_cast<double>(fp) / neg, static_cast<double>(tp) / pos});
  }
  for (std::size_t i = 1; i < roc.points.size(); ++i) {
    const auto& a = roc.points[i - 1];
    const auto& b = roc.points[i];
    roc.auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  return roc;
}

double auc_pairwise(std::span<const int> labels, std::span<const double> scores) {
  check_scores(labels, scores);
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 0) continue;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

Report evaluate(const std::vector<dataset::ManifestRecord>& manifest, const Predictions& predictions) {
  std::vector<std::string> missing;
  for (const auto& r : manifest) {
    if (!predictions.contains(r.patch_id)) missing.push_back(r.patch_id);
  }
  if (!missing.empty()) {
    std::string msg = std::to_string(missing.size()) + " manifest record(s) have no prediction:";
    for (const auto& id : missing) msg += " " + id;
    throw Error(ErrorKind::Coverage, msg);
  }
  if (manifest.empty()) throw Error(ErrorKind::Coverage, "manifest is empty");

  Report report;
  for (const auto k : synth::kAllArtifacts) {
    const auto j = static_cast<std::size_t>(synth::index(k));
    std::vector<int> labels, preds;
    std::vector<double> scores;
    for (const auto& r : manifest) {
      const double s = predictions.at(r.patch_id)[j];
      labels.push_back(r.labels.test(k) ? 1 : 0);
      scores.push_back(s);
      preds.push_back(model::decide(s) ? 1 : 0);
    }
    auto& row = report[j];
    row.kind = k;
    row.n = labels.size();
    row.positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    row.acc = accuracy(labels, preds);
    row.f1 = f1(labels, preds);
    if (row.positives > 0 && row.positives < row.n) row.roc = roc_auc(labels, scores);
  }
  return report;
}

}  // namespace vidart::eval
