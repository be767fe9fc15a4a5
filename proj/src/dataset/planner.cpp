#include <algorithm>
#include <string>

#include "vidart/dataset.hpp"
#include "vidart/error.hpp"
#include "vidart/rng.hpp"

namespace vidart::dataset {

namespace {

using synth::kAllArtifacts;

constexpr std::array<ArtifactKind, 4> kOptionalSource = {ArtifactKind::DarkScene, ArtifactKind::Graininess,
                                                         ArtifactKind::Aliasing, ArtifactKind::Banding};
// Non-source order after the codec pass.
constexpr std::array<ArtifactKind, 4> kOptionalNonSource = {ArtifactKind::SpatialBlur, ArtifactKind::TransmissionError,
                                                            ArtifactKind::FrameDrop, ArtifactKind::BlackScreen};
constexpr std::array<ArtifactKind, 5> kNonSource = {ArtifactKind::Blockiness, ArtifactKind::SpatialBlur,
                                                    ArtifactKind::TransmissionError, ArtifactKind::FrameDrop,
                                                    ArtifactKind::BlackScreen};

struct SourcePatch {
  std::string id;
  const SourceInfo* source = nullptr;
  io::PatchWindow window;
  int stride = 1;
};

std::vector<SourcePatch> crop_plan(const PipelineConfig& cfg, const SourceCatalog& catalog,
                                   std::initializer_list<SourceClass> classes) {
  std::vector<SourcePatch> out;
  for (const auto cls : classes) {
    for (const auto& src : catalog) {
      if (src.cls != cls) continue;
      const bool hfr = cls == SourceClass::Hfr;
      const int len = hfr ? cfg.hfr_len : cfg.patch_len;
      if (src.width < cfg.patch_width || src.height < cfg.patch_height || src.frames < len) {
        throw Error(ErrorKind::Parameter, "source '" + src.id + "' is smaller than a " + std::to_string(cfg.patch_width) +
                                              "x" + std::to_string(cfg.patch_height) + "x" + std::to_string(len) +
                                              " patch");
      }
      for (int k = 0; k < cfg.patches_per_source; ++k) {
        SourcePatch sp;
        sp.id = src.id + "_p" + std::to_string(k);
        sp.source = &src;
        sp.stride = hfr ? cfg.hfr_stride() : 1;
        CounterRng rng(derive_seed(cfg.master_seed, "window/" + sp.id));
        const auto span_x = static_cast<std::uint64_t>((src.width - cfg.patch_width) / 2 + 1);
        const auto span_y = static_cast<std::uint64_t>((src.height - cfg.patch_height) / 2 + 1);
        const auto span_t = static_cast<std::uint64_t>(src.frames - len + 1);
        sp.window.x0 = 2 * static_cast<int>(rng.below(span_x));
        sp.window.y0 = 2 * static_cast<int>(rng.below(span_y));
        sp.window.t0 = static_cast<int>(rng.below(span_t));
        sp.window.w = cfg.patch_width;
        sp.window.h = cfg.patch_height;
        sp.window.len = len;
        out.push_back(std::move(sp));
      }
    }
  }
  return out;
}

bool feasible(ArtifactKind kind, IntensityLevel level, const PipelineConfig& cfg, int stride) {
  const double p = synth::level_param(kind, level);
  switch (kind) {
    case ArtifactKind::FrameDrop:
    case ArtifactKind::BlackScreen: return p < cfg.patch_len;
    case ArtifactKind::MotionBlur: return p <= static_cast<double>(cfg.patch_len) * stride;
    default: return true;
  }
}

// The requested level, or the nearest subtler one that fits the patch length.
IntensityLevel fit_level(ArtifactKind kind, IntensityLevel want, const PipelineConfig& cfg, int stride) {
  for (int l = synth::index(want); l < synth::kLevelCount; ++l) {
    const auto level = synth::kAllLevels[static_cast<std::size_t>(l)];
    if (feasible(kind, level, cfg, stride)) return level;
  }
  throw Error(ErrorKind::Parameter, std::string(synth::name(kind)) + " has no level that fits the patch length");
}

AppliedArtifact make_applied(ArtifactKind kind, IntensityLevel level, std::uint64_t unit_seed,
                             const PipelineConfig& cfg, int stride) {
  const auto fitted = fit_level(kind, level, cfg, stride);
  std::optional<std::uint64_t> seed;
  if (synth::is_stochastic(kind)) seed = derive_seed(unit_seed, synth::name(kind));
  return {ArtifactSpec::make(kind, fitted, seed), Origin::Synthesized};
}

LabelVector labels_of(const std::vector<AppliedArtifact>& applied) {
  LabelVector v;
  for (const auto& a : applied) v.set(a.spec.kind);
  return v;
}

std::string patch_path(const std::string& patch_id) {
  std::string p = patch_id;
  std::replace(p.begin(), p.end(), '/', '_');
  return "patches/" + p + ".y4m";
}

ManifestRecord base_record(const SourcePatch& sp, Stage stage, std::string patch_id, const PipelineConfig& cfg) {
  ManifestRecord r;
  r.patch_id = std::move(patch_id);
  r.source_id = sp.source->id;
  r.source_class = sp.source->cls;
  r.stage = stage;
  r.window = sp.window;
  r.motion_stride = sp.stride;
  r.patch_seed = derive_seed(cfg.master_seed, r.patch_id);
  r.path = patch_path(r.patch_id);
  return r;
}

struct StageDraw {
  std::vector<AppliedArtifact> applied;
  LabelVector eligible;
};

// Motion blur (HFR only), then each optional source artifact with inclusion_prob.
StageDraw draw_source_stage(const PipelineConfig& cfg, const SourcePatch& sp, const std::string& unit_id) {
  const std::uint64_t unit_seed = derive_seed(cfg.master_seed, "source-stage/" + unit_id);
  CounterRng rng(derive_seed(unit_seed, "draws"));
  StageDraw d;
  if (sp.source->cls == SourceClass::Hfr) {
    d.applied.push_back(make_applied(ArtifactKind::MotionBlur, IntensityLevel::VeryNoticeable, unit_seed, cfg, sp.stride));
  }
  for (const auto kind : kOptionalSource) {
    d.eligible.set(kind);
    if (rng.bernoulli(cfg.inclusion_prob)) {
      d.applied.push_back(make_applied(kind, IntensityLevel::VeryNoticeable, unit_seed, cfg, sp.stride));
    }
  }
  return d;
}

// Codec pass at `qp` (labelled blockiness at QP >= 47), then each optional
// non-source artifact with inclusion_prob.
StageDraw draw_nonsource_stage(const PipelineConfig& cfg, int qp, std::uint64_t patch_seed) {
  CounterRng rng(derive_seed(patch_seed, "draws"));
  StageDraw d;
  d.eligible.set(ArtifactKind::Blockiness);
  const auto blocky_qp = synth::level_param(ArtifactKind::Blockiness, IntensityLevel::VeryNoticeable);
  if (qp >= blocky_qp) {
    ArtifactSpec spec = ArtifactSpec::make(ArtifactKind::Blockiness, IntensityLevel::VeryNoticeable);
    spec.param = qp;
    d.applied.push_back({spec, Origin::Synthesized});
  }
  for (const auto kind : kOptionalNonSource) {
    d.eligible.set(kind);
    if (rng.bernoulli(cfg.inclusion_prob)) {
      d.applied.push_back(make_applied(kind, IntensityLevel::VeryNoticeable, patch_seed, cfg, 1));
    }
  }
  return d;
}

}  // namespace

std::vector<ManifestRecord> plan_baseline(const PipelineConfig& cfg, const SourceCatalog& catalog) {
  cfg.validate();
  std::vector<ManifestRecord> out;
  for (const auto& sp : crop_plan(cfg, catalog, {SourceClass::Hd, SourceClass::Hfr})) {
    for (int r = 0; r < cfg.source_repeats; ++r) {
      const std::string unit = sp.id + "_r" + std::to_string(r);
      const StageDraw src = draw_source_stage(cfg, sp, unit);
      for (const int qp : cfg.qp_list) {
        for (int n = 0; n < cfg.nonsource_repeats; ++n) {
          ManifestRecord rec = base_record(sp, Stage::Baseline,
                                           "base/" + unit + "_q" + std::to_string(qp) + "_n" + std::to_string(n), cfg);
          rec.qp = qp;
          const StageDraw ns = draw_nonsource_stage(cfg, qp, rec.patch_seed);
          rec.applied = src.applied;
          rec.applied.insert(rec.applied.end(), ns.applied.begin(), ns.applied.end());
          rec.labels = labels_of(rec.applied);
          for (const auto k : kAllArtifacts) {
            if (src.eligible.test(k) || ns.eligible.test(k)) rec.eligible.set(k);
          }
          out.push_back(std::move(rec));
        }
      }
    }
  }
  return out;
}

std::vector<ManifestRecord> plan_baseline(const PipelineConfig& cfg) { return plan_baseline(cfg, uniform_catalog(cfg)); }

std::vector<ManifestRecord> plan_augmented(const PipelineConfig& cfg, const SourceCatalog& catalog,
                                           const UgcAnnotations& annotations) {
  cfg.validate();
  std::vector<ManifestRecord> out;
  const auto source_patches = crop_plan(cfg, catalog, {SourceClass::Hd, SourceClass::Hfr});

  // (a) the baseline source-artifact patches, every non-source artifact at a random level.
  for (const auto& sp : source_patches) {
    for (int r = 0; r < cfg.source_repeats; ++r) {
      const std::string unit = sp.id + "_r" + std::to_string(r);
      const StageDraw src = draw_source_stage(cfg, sp, unit);
      ManifestRecord rec = base_record(sp, Stage::AugIntensity, "aint/" + unit, cfg);
      CounterRng rng(derive_seed(rec.patch_seed, "levels"));
      rec.applied = src.applied;
      for (const auto kind : kNonSource) {
        const auto level = synth::kAllLevels[static_cast<std::size_t>(rng.below(synth::kLevelCount))];
        rec.applied.push_back(make_applied(kind, level, rec.patch_seed, cfg, 1));
      }
      rec.labels = labels_of(rec.applied);
      rec.eligible = src.eligible;
      out.push_back(std::move(rec));
    }
  }

  // (b) all ten artifacts in a drawn order, each with inclusion_prob.
  for (const auto& sp : source_patches) {
    for (int r = 0; r < cfg.source_repeats; ++r) {
      ManifestRecord rec = base_record(sp, Stage::AugRandomOrder, "arnd/" + sp.id + "_r" + std::to_string(r), cfg);
      CounterRng rng(derive_seed(rec.patch_seed, "draws"));
      std::array<ArtifactKind, synth::kArtifactCount> perm = kAllArtifacts;
      rng.shuffle(std::span<ArtifactKind>(perm));
      std::array<bool, synth::kArtifactCount> include{};
      for (const auto k : kAllArtifacts) include[static_cast<std::size_t>(synth::index(k))] = rng.bernoulli(cfg.inclusion_prob);
      rec.order.assign(perm.begin(), perm.end());
      if (sp.source->cls == SourceClass::Hfr) {
        // Temporal reduction of HFR windows has to come first.
        std::stable_partition(rec.order.begin(), rec.order.end(),
                              [](ArtifactKind k) { return k == ArtifactKind::MotionBlur; });
      }
      for (const auto k : rec.order) {
        if (include[static_cast<std::size_t>(synth::index(k))]) {
          rec.applied.push_back(make_applied(k, IntensityLevel::VeryNoticeable, rec.patch_seed, cfg, sp.stride));
        }
      }
      rec.labels = labels_of(rec.applied);
      for (const auto k : kAllArtifacts) rec.eligible.set(k);
      out.push_back(std::move(rec));
    }
  }

  // (c) real UGC sources: annotated source artifacts plus the baseline non-source stage.
  for (const auto& sp : crop_plan(cfg, catalog, {SourceClass::Ugc})) {
    const auto ann = annotations.find(sp.source->id);
    if (ann == annotations.end()) {
      throw Error(ErrorKind::Annotation, "no annotation for UGC source '" + sp.source->id + "'");
    }
    for (const int qp : cfg.qp_list) {
      for (int n = 0; n < cfg.nonsource_repeats; ++n) {
        ManifestRecord rec =
            base_record(sp, Stage::AugUgc, "augc/" + sp.id + "_q" + std::to_string(qp) + "_n" + std::to_string(n), cfg);
        rec.qp = qp;
        for (const auto k : kAllArtifacts) {
          if (synth::is_source(k) && ann->second.test(k)) {
            ArtifactSpec spec = ArtifactSpec::make(k, IntensityLevel::VeryNoticeable);
            spec.param = 0.0;
            rec.applied.push_back({spec, Origin::Annotated});
          }
        }
        const StageDraw ns = draw_nonsource_stage(cfg, qp, rec.patch_seed);
        rec.applied.insert(rec.applied.end(), ns.applied.begin(), ns.applied.end());
        rec.labels = labels_of(rec.applied);
        rec.eligible = ns.eligible;
        out.push_back(std::move(rec));
      }
    }
  }
  return out;
}

std::vector<ManifestRecord> plan_augmented(const PipelineConfig& cfg, const UgcAnnotations& annotations) {
  return plan_augmented(cfg, uniform_catalog(cfg), annotations);
}

std::size_t label_violations(const std::vector<ManifestRecord>& records) {
  std::size_t bad = 0;
  for (const auto& r : records) {
    if (r.labels != labels_of(r.applied)) ++bad;
  }
  return bad;
}

std::array<LabelFrequency, synth::kArtifactCount> label_frequency(const std::vector<ManifestRecord>& records) {
  if (records.empty()) throw Error(ErrorKind::Parameter, "label frequency of an empty plan");
  std::array<LabelFrequency, synth::kArtifactCount> freq{};
  for (const auto& r : records) {
    for (const auto k : kAllArtifacts) {
      if (!r.eligible.test(k)) continue;
      auto& f = freq[static_cast<std::size_t>(synth::index(k))];
      ++f.eligible;
      if (r.labels.test(k)) ++f.included;
    }
  }
  return freq;
}

}  // namespace vidart::dataset
