#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vidart/dataset.hpp"
#include "vidart/error.hpp"

#include "json.hpp"

namespace vidart::dataset {

LabelVector LabelVector::parse(std::string_view bits) {
  if (bits.size() != synth::kArtifactCount) {
    throw Error(ErrorKind::Format, "label bitstring must have 10 characters, got '" + std::string(bits) + "'");
  }
  LabelVector v;
  for (std::size_t j = 0; j < bits.size(); ++j) {
    if (bits[j] != '0' && bits[j] != '1') throw Error(ErrorKind::Format, "label bitstring '" + std::string(bits) + "'");
    v.bits_.set(j, bits[j] == '1');
  }
  return v;
}

std::string LabelVector::str() const {
  std::string s(synth::kArtifactCount, '0');
  for (std::size_t j = 0; j < s.size(); ++j) s[j] = bits_.test(j) ? '1' : '0';
  return s;
}

std::string_view name(SourceClass c) noexcept {
  switch (c) {
    case SourceClass::Hd: return "hd";
    case SourceClass::Hfr: return "hfr";
    case SourceClass::Ugc: return "ugc";
  }
  return "hd";
}

std::string_view name(Stage s) noexcept {
  switch (s) {
    case Stage::Baseline: return "baseline";
    case Stage::AugIntensity: return "aug_intensity";
    case Stage::AugRandomOrder: return "aug_random_order";
    case Stage::AugUgc: return "aug_ugc";
  }
  return "baseline";
}

std::optional<Stage> parse_stage(std::string_view s) noexcept {
  for (const auto st : {Stage::Baseline, Stage::AugIntensity, Stage::AugRandomOrder, Stage::AugUgc}) {
    if (name(st) == s) return st;
  }
  return std::nullopt;
}

void PipelineConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::Parameter, "pipeline config: " + what);
  };
  require(n_hd_sources >= 1 && n_hfr_sources >= 1 && n_ugc_sources >= 1, "source counts must be >= 1");
  require(patches_per_source >= 1, "patches_per_source must be >= 1");
  require(source_repeats >= 1 && nonsource_repeats >= 1, "repeat counts must be >= 1");
  require(!qp_list.empty(), "qp_list must not be empty");
  for (const int qp : qp_list) require(qp >= 0 && qp <= 63, "QP values must be in [0, 63]");
  require(inclusion_prob >= 0.0 && inclusion_prob <= 1.0, "inclusion_prob must be in [0, 1]");
  require(patch_width > 0 && patch_height > 0 && patch_width % 2 == 0 && patch_height % 2 == 0,
          "patch size must be positive and even");
  require(patch_len > 4, "patch_len must exceed the shortest frame-run length (4)");
  require(hfr_len >= patch_len && hfr_len % patch_len == 0, "hfr_len must be a multiple of patch_len");
  require(source_width >= patch_width && source_height >= patch_height, "sources must be at least patch-sized");
  require(source_len >= patch_len, "source_len must be >= patch_len");
  require(hfr_source_len >= hfr_len, "hfr_source_len must be >= hfr_len");
}

PlanCounts expected_counts(const PipelineConfig& cfg) {
  const long long s = cfg.source_patches();
  const long long qps = static_cast<long long>(cfg.qp_list.size());
  PlanCounts c;
  c.baseline = s * cfg.source_repeats * qps * cfg.nonsource_repeats;
  c.intensity = s * cfg.source_repeats;
  c.random_order = s * cfg.source_repeats;
  c.ugc = static_cast<long long>(cfg.patches_per_source) * cfg.n_ugc_sources * qps * cfg.nonsource_repeats;
  return c;
}

SourceCatalog uniform_catalog(const PipelineConfig& cfg) {
  SourceCatalog cat;
  auto add = [&](const char* prefix, SourceClass cls, int count, int frames) {
    for (int i = 0; i < count; ++i) {
      char id[32];
      std::snprintf(id, sizeof id, "%s%03d", prefix, i);
      cat.push_back({id, cls, cfg.source_width, cfg.source_height, frames});
    }
  };
  add("hd", SourceClass::Hd, cfg.n_hd_sources, cfg.source_len);
  add("hfr", SourceClass::Hfr, cfg.n_hfr_sources, cfg.hfr_source_len);
  add("ugc", SourceClass::Ugc, cfg.n_ugc_sources, cfg.source_len);
  return cat;
}

UgcAnnotations read_ugc_annotations(std::istream& in) {
  UgcAnnotations out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Annotation, "line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.contains("source_id") || !j.contains("labels")) {
      throw Error(ErrorKind::Annotation, "line " + std::to_string(lineno) + ": needs source_id and labels");
    }
    const auto labels = LabelVector::parse(j.at("labels").get<std::string>());
    for (const auto k : synth::kAllArtifacts) {
      if (!synth::is_source(k) && labels.test(k)) {
        throw Error(ErrorKind::Annotation, "line " + std::to_string(lineno) + ": UGC annotations may only flag source artifacts");
      }
    }
    out[j.at("source_id").get<std::string>()] = labels;
  }
  return out;
}

UgcAnnotations read_ugc_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Annotation, "cannot open UGC annotations '" + path.string() + "'");
  return read_ugc_annotations(in);
}

UgcAnnotations blank_annotations(const SourceCatalog& catalog) {
  UgcAnnotations out;
  for (const auto& s : catalog) {
    if (s.cls == SourceClass::Ugc) out[s.id] = LabelVector{};
  }
  return out;
}

}  // namespace vidart::dataset
