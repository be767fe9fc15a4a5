#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "support.hpp"
#include "vidart/dataset.hpp"
#include "vidart/synthetic.hpp"

using namespace vidart;
using namespace vidart::dataset;
using synth::ArtifactKind;

namespace {

PipelineConfig toy() {
  PipelineConfig c;
  c.n_hd_sources = 3;
  c.n_hfr_sources = 3;
  c.n_ugc_sources = 3;
  c.patches_per_source = 2;
  c.source_repeats = 2;
  c.nonsource_repeats = 2;
  c.patch_width = 32;
  c.patch_height = 32;
  c.patch_len = 16;
  c.hfr_len = 64;
  c.source_width = 64;
  c.source_height = 48;
  c.source_len = 24;
  c.hfr_source_len = 80;
  return c;
}

std::vector<ManifestRecord> full_plan(const PipelineConfig& cfg) {
  auto plan = plan_baseline(cfg);
  auto aug = plan_augmented(cfg, blank_annotations(uniform_catalog(cfg)));
  plan.insert(plan.end(), aug.begin(), aug.end());
  return plan;
}

LabelVector labels_from_applied(const ManifestRecord& r) {
  LabelVector v;
  for (const auto& a : r.applied) v.set(a.spec.kind);
  return v;
}

}  // namespace

TEST_CASE("counts with the default configuration") {
  const PipelineConfig defaults;
  CHECK(defaults.source_patches() == 1200);
  const auto c = expected_counts(defaults);
  CHECK(c.baseline == 38400);
  CHECK(c.intensity == 4800);
  CHECK(c.random_order == 4800);
  CHECK(c.ugc == 2880);
  CHECK(c.augmented() == 12480);
  CHECK(c.total() == 50880);
  CHECK(plan_baseline(defaults).size() == 38400);
}

TEST_CASE("toy counts match brute-force enumeration") {
  const auto cfg = toy();
  const auto base = plan_baseline(cfg);
  const auto aug = plan_augmented(cfg, blank_annotations(uniform_catalog(cfg)));
  CHECK(base.size() == 96);
  CHECK(aug.size() == 72);
  std::set<std::string> got;
  for (const auto& r : base) got.insert(r.patch_id);
  for (const auto& r : aug) got.insert(r.patch_id);
  CHECK(got.size() == 168);
  CHECK(got == oracle::enumerate_ids(cfg));
}

TEST_CASE("property: counts follow the closed form for random configurations") {
  testing::for_all(40, 31, [](CounterRng& rng, int) {
    auto cfg = toy();
    cfg.n_hd_sources = 1 + static_cast<int>(rng.below(4));
    cfg.n_hfr_sources = 1 + static_cast<int>(rng.below(4));
    cfg.n_ugc_sources = 1 + static_cast<int>(rng.below(4));
    cfg.patches_per_source = 1 + static_cast<int>(rng.below(3));
    cfg.source_repeats = 1 + static_cast<int>(rng.below(3));
    cfg.nonsource_repeats = 1 + static_cast<int>(rng.below(3));
    cfg.qp_list = rng.bernoulli(0.5) ? std::vector<int>{32, 47} : std::vector<int>{22, 37, 47};
    cfg.master_seed = rng.next();
    const auto plan = full_plan(cfg);
    const auto c = expected_counts(cfg);
    CHECK(static_cast<long long>(plan.size()) == c.total());
    std::set<std::string> ids;
    for (const auto& r : plan) ids.insert(r.patch_id);
    CHECK(ids == oracle::enumerate_ids(cfg));
  });
}

TEST_CASE("labels, seeds, windows and order") {
  const auto cfg = toy();
  const auto plan = full_plan(cfg);
  const auto catalog = uniform_catalog(cfg);
  for (const auto& r : plan) {
    CAPTURE(r.patch_id);
    CHECK(r.labels == labels_from_applied(r));
    CHECK(r.patch_seed == derive_seed(cfg.master_seed, r.patch_id));
    const auto src = std::find_if(catalog.begin(), catalog.end(), [&](const auto& s) { return s.id == r.source_id; });
    REQUIRE(src != catalog.end());
    const auto& w = r.window;
    CHECK(w.x0 % 2 == 0);
    CHECK(w.y0 % 2 == 0);
    CHECK(w.x0 + w.w <= src->width);
    CHECK(w.y0 + w.h <= src->height);
    CHECK(w.t0 + w.len <= src->frames);
    CHECK(w.len == cfg.patch_len * r.motion_stride);
    for (const auto& a : r.applied) {
      if (a.origin == Origin::Synthesized) CHECK(a.spec.matches_table());
      if (a.origin == Origin::Synthesized && synth::is_stochastic(a.spec.kind)) CHECK(a.spec.seed.has_value());
    }
    if (r.stage == Stage::Baseline) {
      for (std::size_t i = 1; i < r.applied.size(); ++i) {
        CHECK(synth::index(r.applied[i - 1].spec.kind) < synth::index(r.applied[i].spec.kind));
      }
      CHECK(r.labels.test(ArtifactKind::Blockiness) == (r.qp == 47));
      CHECK(r.labels.test(ArtifactKind::MotionBlur) == (r.source_class == SourceClass::Hfr));
    }
    if (r.stage == Stage::AugRandomOrder) {
      // applied is a subsequence of the stored permutation
      auto it = r.order.begin();
      for (const auto& a : r.applied) {
        it = std::find(it, r.order.end(), a.spec.kind);
        CHECK(it != r.order.end());
      }
      CHECK(r.order.size() == 10);
    }
    if (r.stage == Stage::AugIntensity) {
      for (auto k : {ArtifactKind::Blockiness, ArtifactKind::SpatialBlur, ArtifactKind::TransmissionError,
                     ArtifactKind::FrameDrop, ArtifactKind::BlackScreen}) {
        CHECK(r.labels.test(k));
      }
    }
  }
}

TEST_CASE("inclusion probability extremes") {
  auto cfg = toy();
  cfg.inclusion_prob = 0.0;
  for (const auto& r : plan_baseline(cfg)) {
    LabelVector expect;
    if (r.source_class == SourceClass::Hfr) expect.set(ArtifactKind::MotionBlur);
    if (r.qp == 47) expect.set(ArtifactKind::Blockiness);
    CHECK(r.labels == expect);
  }
  cfg.inclusion_prob = 1.0;
  const auto plan = plan_augmented(cfg, blank_annotations(uniform_catalog(cfg)));
  for (const auto& r : plan) {
    if (r.stage == Stage::AugRandomOrder) CHECK(r.labels.count() == 10);
  }
  const auto freq = label_frequency(plan_baseline(cfg));
  for (const auto& f : freq) {
    if (f.eligible > 0 && f.eligible != f.included) {
      // only blockiness is QP-driven
      CHECK(f.frequency() == 0.5);
    }
  }
}

TEST_CASE("label frequency balance on a large plan") {
  auto cfg = toy();
  cfg.n_hd_sources = 20;
  cfg.n_hfr_sources = 20;
  cfg.patches_per_source = 4;
  cfg.source_repeats = 4;
  cfg.nonsource_repeats = 2;
  const auto plan = plan_baseline(cfg);
  const auto freq = label_frequency(plan);
  for (auto k : synth::kAllArtifacts) {
    const auto& f = freq[synth::index(k)];
    CAPTURE(synth::name(k));
    if (k == ArtifactKind::MotionBlur) {
      CHECK(f.eligible == 0);
      continue;
    }
    CHECK(f.eligible >= 2000);
    CHECK(f.frequency() >= 0.45);
    CHECK(f.frequency() <= 0.55);
  }
  CHECK(freq[synth::index(ArtifactKind::Blockiness)].frequency() == 0.5);
  CHECK_THROWS_KIND(label_frequency({}), ErrorKind::Parameter);
}

TEST_CASE("seed isolation") {
  auto a = toy();
  auto b = toy();
  b.master_seed = 99;
  const auto pa = full_plan(a), pb = full_plan(b);
  CHECK(pa.size() == pb.size());
  std::size_t differ = 0;
  for (std::size_t i = 0; i < pa.size(); ++i) differ += pa[i].labels != pb[i].labels;
  CHECK(differ > 0);
  CHECK(full_plan(a) == pa);
}

TEST_CASE("UGC annotations") {
  const auto cfg = toy();
  std::istringstream good(
      "{\"source_id\": \"ugc000\", \"labels\": \"0110000000\"}\n"
      "{\"source_id\": \"ugc001\", \"labels\": \"0000000000\"}\n"
      "{\"source_id\": \"ugc002\", \"labels\": \"1000100000\"}\n");
  const auto ann = read_ugc_annotations(good);
  CHECK(ann.size() == 3);
  const auto plan = plan_augmented(cfg, ann);
  for (const auto& r : plan) {
    if (r.stage != Stage::AugUgc) continue;
    CHECK(r.labels == labels_from_applied(r));
    if (r.source_id == "ugc000") {
      CHECK(r.labels.test(ArtifactKind::DarkScene));
      CHECK(r.labels.test(ArtifactKind::Graininess));
    }
  }

  std::istringstream nonsource("{\"source_id\": \"ugc000\", \"labels\": \"0000010000\"}\n");
  CHECK_THROWS_KIND(read_ugc_annotations(nonsource), ErrorKind::Annotation);
  UgcAnnotations partial = ann;
  partial.erase("ugc001");
  CHECK_THROWS_KIND(plan_augmented(cfg, partial), ErrorKind::Annotation);
}

TEST_CASE("property: manifest lines round-trip") {
  const auto plan = full_plan(toy());
  testing::for_all(100, 41, [&](CounterRng& rng, int) {
    auto r = plan[rng.below(plan.size())];
    if (rng.bernoulli(0.5)) r.digest = rng.next();
    CHECK(parse_json_line(to_json_line(r)) == r);
  });
  CHECK_THROWS_KIND(parse_json_line("{\"patch_id\": 3}"), ErrorKind::Format);
  CHECK_THROWS_KIND(parse_json_line("not json"), ErrorKind::Format);
}

TEST_CASE("label vector bitstrings") {
  const auto v = LabelVector::parse("1000000001");
  CHECK(v.test(ArtifactKind::MotionBlur));
  CHECK(v.test(ArtifactKind::BlackScreen));
  CHECK(v.count() == 2);
  CHECK(v.str() == "1000000001");
  CHECK_THROWS_KIND(LabelVector::parse("10"), ErrorKind::Format);
  CHECK_THROWS_KIND(LabelVector::parse("100000000x"), ErrorKind::Format);
}

TEST_CASE("execution") {
  const auto cfg = toy();
  const auto catalog = uniform_catalog(cfg);
  const auto store = SourceStore::synthetic(catalog, 1);

  SUBCASE("empty plan writes an empty manifest only") {
    const auto dir = testing::scratch_dir("exec_empty");
    const auto done = execute_plan({}, store, {dir, 2, true});
    CHECK(done.empty());
    CHECK(std::filesystem::file_size(dir / "manifest.jsonl") == 0);
    CHECK_FALSE(std::filesystem::exists(dir / "patches"));
  }

  SUBCASE("identity stack equals the crop") {
    ManifestRecord r = plan_baseline(cfg).front();
    r.applied.clear();
    r.labels = {};
    r.qp.reset();
    r.motion_stride = 1;
    r.window.len = cfg.patch_len;
    const auto clip = synthesize_record(r, store);
    CHECK(clip == io::crop_patch(*store.get(r.source_id), r.window));
  }

  SUBCASE("missing source") {
    auto r = plan_baseline(cfg).front();
    r.source_id = "hd999";
    CHECK_THROWS_KIND(execute_plan({r}, store, {testing::scratch_dir("exec_missing"), 1, true}), ErrorKind::Resolution);
    CHECK_THROWS_KIND(store.get("hd999"), ErrorKind::Resolution);
  }

  SUBCASE("output independent of worker count; labels match the written patches") {
    auto plan = full_plan(cfg);
    plan.resize(40);
    const auto d1 = testing::scratch_dir("exec_j1");
    const auto d4 = testing::scratch_dir("exec_j4");
    const auto a = execute_plan(plan, store, {d1, 1, true});
    const auto b = execute_plan(plan, store, {d4, 4, true});
    CHECK(a == b);
    CHECK(manifest_digest(a) == manifest_digest(b));
    CHECK(read_manifest(d1 / "manifest.jsonl") == a);
    for (const auto& r : a) {
      const auto clip = io::read_y4m(d1 / r.path);
      CHECK(io::payload_digest(clip) == *r.digest);
      CHECK(clip.width() == cfg.patch_width);
      CHECK(clip.length() == cfg.patch_len);
    }
  }

  SUBCASE("directory sources") {
    const auto src = testing::scratch_dir("exec_src");
    io::write_y4m(io::synthetic_clip(64, 48, 24, 3), src / "hd000.y4m");
    io::write_y4m(io::synthetic_clip(64, 48, 80, 4), src / "hfr000.y4m");
    const auto cat = scan_catalog(src);
    REQUIRE(cat.size() == 2);
    CHECK(cat[1].cls == SourceClass::Hfr);
    CHECK(cat[1].frames == 80);
    const auto plan = plan_baseline(cfg, cat);
    const auto done = execute_plan(plan, SourceStore::from_directory(src), {testing::scratch_dir("exec_dir"), 2, true});
    CHECK(done.size() == plan.size());
  }
}
