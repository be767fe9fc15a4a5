#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vidart/artifact_synth.hpp"
#include "vidart/frame_io.hpp"

namespace vidart::dataset {

using synth::ArtifactKind;
using synth::ArtifactSpec;
using synth::IntensityLevel;

// Ten binary flags in canonical artifact order; serialized as a 10-char
// bitstring whose j-th character is the flag of the j-th artifact kind.
class LabelVector {
 public:
  LabelVector() = default;
  static LabelVector parse(std::string_view bits);  // throws Format

  bool test(ArtifactKind k) const noexcept { return bits_.test(static_cast<std::size_t>(synth::index(k))); }
  void set(ArtifactKind k, bool on = true) noexcept { bits_.set(static_cast<std::size_t>(synth::index(k)), on); }
  std::size_t count() const noexcept { return bits_.count(); }
  std::string str() const;

  bool operator==(const LabelVector&) const = default;

 private:
  std::bitset<synth::kArtifactCount> bits_;
};

enum class SourceClass { Hd, Hfr, Ugc };
enum class Stage { Baseline, AugIntensity, AugRandomOrder, AugUgc };

std::string_view name(SourceClass c) noexcept;
std::string_view name(Stage s) noexcept;
std::optional<Stage> parse_stage(std::string_view s) noexcept;

struct PipelineConfig {
  int n_hd_sources = 100;
  int n_hfr_sources = 100;
  int n_ugc_sources = 60;
  int patches_per_source = 6;
  int source_repeats = 4;
  int nonsource_repeats = 4;
  std::vector<int> qp_list = {32, 47};
  double inclusion_prob = 0.5;
  int patch_width = 560;
  int patch_height = 560;
  int patch_len = 64;
  int hfr_len = 512;
  // Geometry assumed for sources when no real clips are catalogued.
  int source_width = 1920;
  int source_height = 1080;
  int source_len = 300;
  int hfr_source_len = 1200;
  std::uint64_t master_seed = 0;

  void validate() const;  // throws Parameter
  int hfr_stride() const noexcept { return hfr_len / patch_len; }
  // Source patches feeding the synthetic stages (HD + HFR).
  long long source_patches() const noexcept {
    return static_cast<long long>(patches_per_source) * (n_hd_sources + n_hfr_sources);
  }
};

struct PlanCounts {
  long long baseline = 0;
  long long intensity = 0;
  long long random_order = 0;
  long long ugc = 0;
  long long augmented() const noexcept { return intensity + random_order + ugc; }
  long long total() const noexcept { return baseline + augmented(); }
  bool operator==(const PlanCounts&) const = default;
};

// Closed-form record counts for a configuration.
PlanCounts expected_counts(const PipelineConfig& cfg);

struct SourceInfo {
  std::string id;
  SourceClass cls = SourceClass::Hd;
  int width = 0;
  int height = 0;
  int frames = 0;
};
using SourceCatalog = std::vector<SourceInfo>;

// Ids hd000.., hfr000.., ugc000.. with the configured source geometry.
SourceCatalog uniform_catalog(const PipelineConfig& cfg);

// Real-world source artifacts of UGC sources, keyed by source id.
using UgcAnnotations = std::map<std::string, LabelVector, std::less<>>;
UgcAnnotations read_ugc_annotations(const std::filesystem::path& path);
UgcAnnotations read_ugc_annotations(std::istream& in);
// All-clear annotations for every UGC source in the catalog (dry-run planning).
UgcAnnotations blank_annotations(const SourceCatalog& catalog);

enum class Origin { Synthesized, Annotated };

struct AppliedArtifact {
  ArtifactSpec spec;
  Origin origin = Origin::Synthesized;
  bool operator==(const AppliedArtifact&) const = default;
};

struct ManifestRecord {
  std::string patch_id;
  std::string source_id;
  SourceClass source_class = SourceClass::Hd;
  Stage stage = Stage::Baseline;
  io::PatchWindow window;
  std::optional<int> qp;  // codec pass applied before the non-source stage
  int motion_stride = 1;  // temporal reduction of the cropped window
  std::vector<ArtifactKind> order;  // drawn permutation (random-order stage only)
  std::vector<AppliedArtifact> applied;
  LabelVector labels;
  LabelVector eligible;  // kinds whose presence was drawn (or QP-selected)
  std::uint64_t patch_seed = 0;
  std::string path;
  std::optional<std::uint64_t> digest;  // payload digest, set after execution

  bool operator==(const ManifestRecord&) const = default;
};

std::vector<ManifestRecord> plan_baseline(const PipelineConfig& cfg, const SourceCatalog& catalog);
std::vector<ManifestRecord> plan_baseline(const PipelineConfig& cfg);
// Intensity, random-order and UGC sub-plans, in that order. Throws Annotation
// when a UGC source in the catalog has no annotation.
std::vector<ManifestRecord> plan_augmented(const PipelineConfig& cfg, const SourceCatalog& catalog,
                                           const UgcAnnotations& annotations);
std::vector<ManifestRecord> plan_augmented(const PipelineConfig& cfg, const UgcAnnotations& annotations);

// Number of records whose labels disagree with their applied list.
std::size_t label_violations(const std::vector<ManifestRecord>& records);

struct LabelFrequency {
  long long eligible = 0;
  long long included = 0;
  double frequency() const noexcept {
    return eligible == 0 ? 0.0 : static_cast<double>(included) / static_cast<double>(eligible);
  }
};
// Per kind, over the records where that kind was eligible. Throws Parameter on an empty plan.
std::array<LabelFrequency, synth::kArtifactCount> label_frequency(const std::vector<ManifestRecord>& records);

// ---- manifest I/O ----------------------------------------------------------
std::string to_json_line(const ManifestRecord& r);
ManifestRecord parse_json_line(std::string_view line);
void write_manifest(const std::vector<ManifestRecord>& records, const std::filesystem::path& path);
std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path);
std::uint64_t manifest_digest(const std::vector<ManifestRecord>& records);

// ---- execution -------------------------------------------------------------
// Thread-safe source lookup with lazy loading.
class SourceStore {
 public:
  using Loader = std::function<io::Clip(const std::string& id)>;

  explicit SourceStore(Loader loader, std::function<bool(const std::string&)> exists);
  static SourceStore from_directory(const std::filesystem::path& dir);
  // Synthetic moving content matching each catalog entry.
  static SourceStore synthetic(const SourceCatalog& catalog, std::uint64_t seed);

  bool contains(const std::string& id) const { return exists_(id); }
  // Throws Resolution when the source is unknown.
  std::shared_ptr<const io::Clip> get(const std::string& id) const;

 private:
  Loader loader_;
  std::function<bool(const std::string&)> exists_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::shared_ptr<const io::Clip>, std::less<>> cache_;
};

// Catalog of the clips in a source directory (<id>.y4m files); classes from id prefixes.
SourceCatalog scan_catalog(const std::filesystem::path& dir);

// Crop and synthesize one record's patch.
io::Clip synthesize_record(const ManifestRecord& record, const SourceStore& store);

struct ExecuteOptions {
  std::filesystem::path out_dir;
  int jobs = 1;
  bool write_patches = true;
};
// Synthesizes every record (in parallel), writes patches and
// out_dir/manifest.jsonl. Returns the records with digests filled, in plan order.
std::vector<ManifestRecord> execute_plan(const std::vector<ManifestRecord>& records, const SourceStore& store,
                                         const ExecuteOptions& opts);

}  // namespace vidart::dataset
