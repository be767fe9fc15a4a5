#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "vidart/cli.hpp"
#include "vidart/error.hpp"
#include "vidart/eval.hpp"
#include "vidart/kernels.hpp"
#include "vidart/loss.hpp"
#include "vidart/rng.hpp"
#include "vidart/synthetic.hpp"

namespace vidart::cli {

namespace {

struct Check {
  const char* name;
  std::function<std::string()> run;  // empty string on success, else a reason
};

std::string fmt(const char* spec, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

model::ModelConfig tiny_model() {
  model::ModelConfig c;
  c.adfe.embed_dim = 32;
  c.rmvit.dim = 16;
  c.rmvit.mlp_hidden = 32;
  c.rmvit.out_dim = 16;
  c.head_hidden = 8;
  return c;
}

std::string check_kernels() {
  if (!kernels::isa_supported(kernels::Isa::Avx2)) return {};
  const auto& s = kernels::table_for(kernels::Isa::Scalar);
  const auto& v = kernels::table_for(kernels::Isa::Avx2);
  CounterRng rng(derive_seed(0, "selfcheck/kernels"));
  for (std::size_t n : {1u, 7u, 8u, 31u, 257u}) {
    std::vector<float> a(n), b(n);
    std::vector<std::uint8_t> px(n), o1(n), o2(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.uniform_f32(-1.0f, 1.0f);
      b[i] = rng.uniform_f32(-1.0f, 1.0f);
      px[i] = static_cast<std::uint8_t>(rng.below(256));
    }
    if (s.dot_f32(a.data(), b.data(), n) != v.dot_f32(a.data(), b.data(), n)) return "dot differs at n=" + std::to_string(n);
    s.divide_u8(px.data(), o1.data(), n, 1.5f);
    v.divide_u8(px.data(), o2.data(), n, 1.5f);
    if (o1 != o2) return "divide differs at n=" + std::to_string(n);
    if (s.sum_u8(px.data(), n) != v.sum_u8(px.data(), n)) return "sum differs at n=" + std::to_string(n);
  }
  return {};
}

std::string check_mask_one_hot() {
  const auto params = model::init_params(7, tiny_model());
  const auto clip = io::synthetic_clip(32, 32, 1, 3);
  model::AdfeTrace trace;
  model::adfe_forward(clip.frames[0], params, &trace);
  const int m = params.config().adfe.regions;
  for (std::size_t l = 0; l < trace.levels.size(); ++l) {
    for (const int r : trace.levels[l].mask) {
      int ones = 0;
      for (int j = 0; j < m; ++j) ones += (j == r) ? 1 : 0;
      if (ones != 1) return "level " + std::to_string(l) + " has a site without exactly one region";
    }
  }
  return {};
}

std::string check_auc_dual() {
  CounterRng rng(derive_seed(0, "selfcheck/auc"));
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(40);
    std::vector<int> y(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(rng.below(2));
      s[i] = static_cast<double>(rng.below(8)) / 8.0;  // coarse grid forces ties
    }
    y[0] = 1;
    y[1] = 0;
    const double a = eval::roc_auc(y, s).auc, b = eval::auc_pairwise(y, s);
    if (std::abs(a - b) > 1e-12) return "trial " + std::to_string(trial) + ": " + fmt("%.15f", a) + " vs " + fmt("%.15f", b);
  }
  std::vector<int> y = {1, 1, 0, 0};
  std::vector<double> s = {0.8, 0.2, 0.6, 0.1};
  if (eval::roc_auc(y, s).auc != 0.75) return "fixture AUC is not 0.75";
  return {};
}

std::string check_counts() {
  const auto defaults = dataset::expected_counts(dataset::PipelineConfig{});
  if (defaults.baseline != 38400 || defaults.augmented() != 12480 || defaults.total() != 50880) return "default counts wrong";
  dataset::PipelineConfig toy;
  toy.n_hd_sources = 3;
  toy.n_hfr_sources = 3;
  toy.n_ugc_sources = 3;
  toy.patches_per_source = 2;
  toy.source_repeats = 2;
  toy.nonsource_repeats = 2;
  const auto base = dataset::plan_baseline(toy);
  const auto aug = dataset::plan_augmented(toy, dataset::blank_annotations(dataset::uniform_catalog(toy)));
  if (base.size() != 96 || aug.size() != 72) {
    return "toy plan has " + std::to_string(base.size()) + " + " + std::to_string(aug.size()) + " records";
  }
  return {};
}

std::string check_bce_ln2(std::ostream& out) {
  loss::Probabilities p;
  p.fill(0.5);
  const double v = loss::bce_loss(dataset::LabelVector{}, p);
  out << "  bce(all 0.5) = " << fmt("%.12f", v) << " (ln 2 = " << fmt("%.12f", std::log(2.0)) << ")\n";
  return std::abs(v - std::log(2.0)) <= 1e-12 ? std::string{} : "BCE of all-0.5 is not ln 2";
}

std::string check_contrastive() {
  loss::Batch b;
  b.reps = {{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}};
  b.labels = {dataset::LabelVector::parse("1000000000"), dataset::LabelVector::parse("1000000000"),
              dataset::LabelVector::parse("0100000000")};
  b.probs.assign(3, {});
  const auto l = loss::contrastive_loss(b);
  if (std::abs(l[0] - std::log(2.0)) > 1e-9) return "three-sample case is not log 2";
  if (l[2] != 0.0) return "sample without positives contributes";
  return {};
}

std::string check_layout(bool corrupt) {
  const auto cfg = tiny_model();
  const auto p = model::init_params(1, cfg);
  std::vector<float> values(p.values().begin(), p.values().end());
  if (corrupt) values.pop_back();
  try {
    model::ModelParams rebuilt(cfg, 1, std::move(values));
    std::stringstream ss;
    model::save_params(rebuilt, ss);
    const auto back = model::load_params(ss);
    if (!std::equal(back.values().begin(), back.values().end(), rebuilt.values().begin(), rebuilt.values().end())) {
      return "save/load round trip changed values";
    }
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

std::string check_threshold() {
  if (model::decide(0.5) || !model::decide(0.7)) return "decision threshold is not p > 0.5";
  return {};
}

}  // namespace

int selfcheck(std::ostream& out, const std::optional<std::string>& fault) {
  if (fault && *fault != "layout") throw Error(ErrorKind::Usage, "unknown fault '" + *fault + "' (known: layout)");
  const bool break_layout = fault.has_value();

  const std::vector<Check> checks = {
      {"kernel_equivalence", check_kernels},
      {"guided_mask_one_hot", check_mask_one_hot},
      {"auc_dual_computation", check_auc_dual},
      {"counting_formulas", check_counts},
      {"bce_ln2", [&] { return check_bce_ln2(out); }},
      {"contrastive_log2", check_contrastive},
      {"params_layout", [&] { return check_layout(break_layout); }},
      {"head_threshold", check_threshold},
  };
  int failed = 0;
  for (const auto& c : checks) {
    std::string why;
    try {
      why = c.run();
    } catch (const std::exception& e) {
      why = e.what();
    }
    if (why.empty()) {
      out << "PASS " << c.name << '\n';
    } else {
      out << "FAIL " << c.name << ": " << why << '\n';
      ++failed;
    }
  }
  out << (failed == 0 ? "selfcheck passed" : "selfcheck failed: " + std::to_string(failed) + " check(s)") << '\n';
  return failed == 0 ? 0 : 1;
}

}  // namespace vidart::cli
