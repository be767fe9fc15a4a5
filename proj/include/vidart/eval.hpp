#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vidart/artifact_synth.hpp"
#include "vidart/dataset.hpp"

namespace vidart::eval {

// Percentage of matching entries. Throws Alignment on length mismatch or empty input.
double accuracy(std::span<const int> labels, std::span<const int> preds);
// 2PR/(P+R); 0 when there are no true positives.
double f1(std::span<const int> labels, std::span<const int> preds);

struct RocPoint {
  double threshold;  // score >= threshold counts as positive; +inf for the origin
  double fpr;
  double tpr;
};

struct RocCurve {
  std::vector<RocPoint> points;  // (0,0) first, (1,1) last
  double auc = 0.0;              // trapezoidal integral of the points
};

// Throws UndefinedAuc if only one class is present.
RocCurve roc_auc(std::span<const int> labels, std::span<const double> scores);
// Probability that a random positive outscores a random negative, ties 1/2. O(P*N).
double auc_pairwise(std::span<const int> labels, std::span<const double> scores);

using Scores = std::array<double, synth::kArtifactCount>;
using Predictions = std::map<std::string, Scores>;

// "<patch_id>\t<s1>...\t<s10>[\t<labels>]" lines; trailing label column optional.
Predictions read_predictions(std::istream& in);
Predictions read_predictions(const std::filesystem::path& path);
std::string format_prediction(const std::string& id, const Scores& scores);

struct ReportRow {
  synth::ArtifactKind kind;
  std::size_t n = 0;
  std::size_t positives = 0;
  double acc = 0.0;
  double f1 = 0.0;
  std::optional<RocCurve> roc;  // empty when ground truth has a single class
};

using Report = std::array<ReportRow, synth::kArtifactCount>;

// Hard decision per head is score > 0.5. Throws Coverage naming every record
// without a prediction.
Report evaluate(const std::vector<dataset::ManifestRecord>& manifest, const Predictions& predictions);

// Columns Artifact,N,Acc,F1,AUC; undefined AUC printed as NA.
void write_report_csv(const Report& report, std::ostream& out);
// One roc_<artifact>.csv (threshold,FPR,TPR) per row with a defined curve.
void write_roc_files(const Report& report, const std::filesystem::path& dir);

}  // namespace vidart::eval
