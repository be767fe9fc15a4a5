#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "vidart/cli.hpp"
#include "vidart/error.hpp"
#include "vidart/eval.hpp"
#include "vidart/frame_io.hpp"
#include "vidart/loss.hpp"
#include "vidart/rng.hpp"

namespace vidart::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
  std::string input, output, artifact, level;
  std::optional<std::uint64_t> seed;
  int stride = synth::kHfrStride;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const auto kind = synth::parse_artifact(a.artifact);
  if (!kind) throw Error(ErrorKind::Usage, "unknown artifact '" + a.artifact + "'");
  const auto level = synth::parse_level(a.level);
  if (!level) throw Error(ErrorKind::Usage, "unknown level '" + a.level + "'");
  if (synth::is_stochastic(*kind) && !a.seed) {
    throw Error(ErrorKind::Usage, "--seed is required for " + std::string(synth::name(*kind)));
  }
  const auto spec = synth::ArtifactSpec::make(*kind, *level, a.seed);
  const auto clip = io::read_y4m(std::filesystem::path(a.input));
  const auto result = synth::synthesize(clip, spec, a.stride);
  io::write_y4m(result, std::filesystem::path(a.output));

  out << "artifact " << synth::name(spec.kind) << "\nlevel " << synth::name(spec.level) << "\nparam " << spec.param
      << "\nseed " << (spec.seed ? std::to_string(*spec.seed) : std::string("none")) << "\nframes "
      << clip.length() << " -> " << result.length() << '\n';
  return kExitOk;
}

// ---- gen-dataset -----------------------------------------------------------

struct GenArgs {
  std::optional<std::string> config;
  std::vector<std::string> sets;
  bool dry_run = false;
  std::string stage = "all";
  std::optional<std::string> out, sources, ugc_annotations;
  bool synthetic_sources = false;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
};

int cmd_gen_dataset(const GenArgs& a, std::ostream& out, std::ostream& err) {
  auto overrides = a.sets;
  if (a.seed) overrides.push_back("pipeline.master_seed=" + std::to_string(*a.seed));
  if (a.jobs) overrides.push_back("jobs=" + std::to_string(*a.jobs));
  RunConfig rc = load_run_config(a.config ? std::optional<std::filesystem::path>(*a.config) : std::nullopt, overrides);
  if (a.out) rc.out = *a.out;
  if (a.sources) rc.sources = *a.sources;
  if (a.ugc_annotations) rc.ugc_annotations = *a.ugc_annotations;
  if (a.stage != "all" && a.stage != "baseline" && a.stage != "augmented") {
    throw Error(ErrorKind::Usage, "--stage must be all, baseline or augmented");
  }
  if (a.synthetic_sources && !rc.sources.empty()) {
    throw Error(ErrorKind::Usage, "--synthetic-sources and a source directory are mutually exclusive");
  }
  if (!a.dry_run && !a.synthetic_sources && rc.sources.empty()) {
    throw Error(ErrorKind::Usage, "execution needs --sources DIR or --synthetic-sources (or use --dry-run)");
  }
  const auto& cfg = rc.pipeline;

  const auto catalog = rc.sources.empty() ? dataset::uniform_catalog(cfg) : dataset::scan_catalog(rc.sources);
  dataset::UgcAnnotations annotations;
  if (!rc.ugc_annotations.empty()) {
    annotations = dataset::read_ugc_annotations(std::filesystem::path(rc.ugc_annotations));
  } else if (a.dry_run || a.synthetic_sources) {
    // Synthetic and unexecuted UGC sources carry no real artifacts.
    annotations = dataset::blank_annotations(catalog);
  }

  const auto start = std::chrono::steady_clock::now();
  std::vector<dataset::ManifestRecord> plan;
  long long n_base = 0, n_aug = 0;
  if (a.stage != "augmented") {
    plan = dataset::plan_baseline(cfg, catalog);
    n_base = static_cast<long long>(plan.size());
  }
  if (a.stage != "baseline") {
    auto aug = dataset::plan_augmented(cfg, catalog, annotations);
    n_aug = static_cast<long long>(aug.size());
    plan.insert(plan.end(), std::make_move_iterator(aug.begin()), std::make_move_iterator(aug.end()));
  }

  if (a.stage != "augmented") out << "baseline " << n_base << '\n';
  if (a.stage != "baseline") out << "augmented " << n_aug << '\n';
  out << "total " << n_base + n_aug << '\n';

  // With the uniform catalog the plan must match the closed-form counts.
  if (rc.sources.empty()) {
    const auto expect = dataset::expected_counts(cfg);
    const bool ok = (a.stage == "augmented" || n_base == expect.baseline) &&
                    (a.stage == "baseline" || n_aug == expect.augmented());
    if (!ok) {
      err << "count mismatch: expected baseline " << expect.baseline << ", augmented " << expect.augmented()
                << '\n';
      return kExitFailure;
    }
  }
  if (const auto bad = dataset::label_violations(plan); bad != 0) {
    err << bad << " record(s) with labels inconsistent with applied artifacts\n";
    return kExitFailure;
  }

  if (a.dry_run) {
    if (a.out) {
      std::filesystem::create_directories(rc.out);
      dataset::write_manifest(plan, std::filesystem::path(rc.out) / "manifest.jsonl");
      out << "manifest " << (std::filesystem::path(rc.out) / "manifest.jsonl").string() << '\n';
    }
  } else {
    const auto store = a.synthetic_sources
                           ? dataset::SourceStore::synthetic(catalog, derive_seed(cfg.master_seed, "sources"))
                           : dataset::SourceStore::from_directory(rc.sources);
    const auto done = dataset::execute_plan(plan, store, {rc.out, rc.jobs, true});
    out << "manifest " << (std::filesystem::path(rc.out) / "manifest.jsonl").string() << '\n';
    char digest[32];
    std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(dataset::manifest_digest(done)));
    out << "digest " << digest << '\n';
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  err << "planned " << plan.size() << " records in " << secs << " s\n";
  return kExitOk;
}

// ---- infer -----------------------------------------------------------------

struct InferArgs {
  std::optional<std::string> config, manifest, dir, input, params, save_params, out;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> init_seed;
  std::optional<int> jobs;
};

int cmd_infer(const InferArgs& a, std::ostream& out) {
  if (a.manifest.has_value() == a.input.has_value()) throw Error(ErrorKind::Usage, "give exactly one of --manifest or --input");
  if (a.params && a.init_seed) throw Error(ErrorKind::Usage, "give at most one of --params or --init-seed");
  auto overrides = a.sets;
  if (a.jobs) overrides.push_back("jobs=" + std::to_string(*a.jobs));
  const RunConfig rc = load_run_config(a.config ? std::optional<std::filesystem::path>(*a.config) : std::nullopt, overrides);

  const model::ModelParams params = [&] {
    if (!a.params) return model::init_params(a.init_seed.value_or(rc.init_seed), rc.model);
    auto p = model::load_params(std::filesystem::path(*a.params));
    if (!(p.config() == rc.model)) {
      throw Error(ErrorKind::Layout, "params file was built for a different model config than the run config");
    }
    return p;
  }();
  if (a.save_params) model::save_params(params, std::filesystem::path(*a.save_params));

  std::vector<std::pair<std::string, std::filesystem::path>> jobs;
  if (a.input) {
    jobs.emplace_back(std::filesystem::path(*a.input).stem().string(), *a.input);
  } else {
    const std::filesystem::path manifest(*a.manifest);
    const auto base = a.dir ? std::filesystem::path(*a.dir) : manifest.parent_path();
    for (const auto& r : dataset::read_manifest(manifest)) jobs.emplace_back(r.patch_id, base / r.path);
  }

  std::vector<std::string> lines(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      try {
        const auto heads = model::detector_forward(io::read_y4m(jobs[i].second), params, 1);
        eval::Scores s{};
        for (std::size_t j = 0; j < s.size(); ++j) s[j] = heads[j].probability;
        lines[i] = eval::format_prediction(jobs[i].first, s);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(rc.jobs), std::max<std::size_t>(jobs.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::ofstream file;
  if (a.out) {
    file.open(*a.out, std::ios::app);
    if (!file) throw Error(ErrorKind::Io, "cannot write predictions '" + *a.out + "'");
  }
  std::ostream& dst = a.out ? static_cast<std::ostream&>(file) : out;
  for (const auto& l : lines) dst << l << '\n';
  if (a.out) out << "predictions " << jobs.size() << " -> " << *a.out << '\n';
  return kExitOk;
}

// ---- eval ------------------------------------------------------------------

int cmd_eval(const std::string& manifest, const std::string& predictions, const std::optional<std::string>& out_dir,
             std::ostream& out) {
  const auto records = dataset::read_manifest(std::filesystem::path(manifest));
  const auto preds = eval::read_predictions(std::filesystem::path(predictions));
  const auto report = eval::evaluate(records, preds);
  eval::write_report_csv(report, out);
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    std::ofstream csv(std::filesystem::path(*out_dir) / "report.csv");
    if (!csv) throw Error(ErrorKind::Io, "cannot write report in '" + *out_dir + "'");
    eval::write_report_csv(report, csv);
    eval::write_roc_files(report, *out_dir);
  }
  return kExitOk;
}

// ---- loss-check ------------------------------------------------------------

// Whitespace-separated: "B D", B rows of D reals, B 10-char label strings,
// B rows of 10 probabilities. '#' starts a comment.
loss::Batch read_batch(std::istream& in) {
  std::string text, line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    text += line + '\n';
  }
  std::istringstream ss(text);
  long long b = 0, d = 0;
  if (!(ss >> b >> d) || b < 1 || d < 1) throw Error(ErrorKind::Format, "batch file must start with positive 'B D'");
  loss::Batch batch;
  batch.reps.assign(static_cast<std::size_t>(b), std::vector<double>(static_cast<std::size_t>(d)));
  for (auto& r : batch.reps) {
    for (auto& v : r) {
      if (!(ss >> v)) throw Error(ErrorKind::Format, "batch file: too few representation values");
    }
  }
  for (long long i = 0; i < b; ++i) {
    std::string bits;
    if (!(ss >> bits)) throw Error(ErrorKind::Format, "batch file: too few label strings");
    batch.labels.push_back(dataset::LabelVector::parse(bits));
  }
  batch.probs.resize(static_cast<std::size_t>(b));
  for (auto& p : batch.probs) {
    for (auto& v : p) {
      if (!(ss >> v)) throw Error(ErrorKind::Format, "batch file: too few probabilities");
    }
  }
  if (std::string extra; ss >> extra) throw Error(ErrorKind::Format, "batch file: trailing data '" + extra + "'");
  return batch;
}

int cmd_loss_check(const std::string& path, const loss::LossConfig& cfg, std::ostream& out) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open batch '" + path + "'");
  const auto batch = read_batch(in);
  cfg.validate();
  const auto con = loss::contrastive_loss(batch, cfg);
  double con_sum = 0.0, bce_sum = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double bce = loss::bce_loss(batch.labels[i], batch.probs[i], cfg.epsilon);
    out << "sample " << i << " contrastive " << fmt9(con[i]) << " bce " << fmt9(bce) << '\n';
    con_sum += con[i];
    bce_sum += bce;
  }
  out << "contrastive_sum " << fmt9(con_sum) << '\n';
  out << "bce_sum " << fmt9(bce_sum) << '\n';
  out << "total " << fmt9(loss::total_loss(batch, cfg)) << '\n';
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Streaming-video artifact synthesis, dataset generation and detector evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "vidart 0.1.0");

  SynthArgs sa;
  auto* synth_cmd = app.add_subcommand("synth", "apply one artifact to a Y4M clip");
  synth_cmd->add_option("--input", sa.input, "input .y4m")->required();
  synth_cmd->add_option("--output", sa.output, "output .y4m")->required();
  synth_cmd->add_option("--artifact", sa.artifact, "artifact name, e.g. banding")->required();
  synth_cmd->add_option("--level", sa.level, "very_noticeable|noticeable|subtle|very_subtle")->required();
  synth_cmd->add_option("--seed", sa.seed, "seed (required for stochastic artifacts)");
  synth_cmd->add_option("--stride", sa.stride, "temporal stride for motion blur")->check(CLI::PositiveNumber);

  GenArgs ga;
  auto* gen_cmd = app.add_subcommand("gen-dataset", "plan and synthesize the labeled patch database");
  gen_cmd->add_option("--config", ga.config, "run config (JSON, comments allowed)");
  gen_cmd->add_option("--set", ga.sets, "override a config field: section.key=value");
  gen_cmd->add_flag("--dry-run", ga.dry_run, "plan only, print counts");
  gen_cmd->add_option("--stage", ga.stage, "all|baseline|augmented");
  gen_cmd->add_option("--out", ga.out, "output directory");
  gen_cmd->add_option("--sources", ga.sources, "directory of <id>.y4m sources");
  gen_cmd->add_flag("--synthetic-sources", ga.synthetic_sources, "use generated moving content as sources");
  gen_cmd->add_option("--ugc-annotations", ga.ugc_annotations, "JSONL labels of UGC sources");
  gen_cmd->add_option("--jobs", ga.jobs, "worker threads")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", ga.seed, "master seed");

  InferArgs ia;
  auto* infer_cmd = app.add_subcommand("infer", "run the reference detector");
  infer_cmd->add_option("--config", ia.config, "run config (model section)");
  infer_cmd->add_option("--set", ia.sets, "override a config field");
  infer_cmd->add_option("--manifest", ia.manifest, "manifest.jsonl of patches");
  infer_cmd->add_option("--dir", ia.dir, "base directory of manifest paths (default: manifest directory)");
  infer_cmd->add_option("--input", ia.input, "single .y4m clip");
  infer_cmd->add_option("--params", ia.params, "params file");
  infer_cmd->add_option("--init-seed", ia.init_seed, "initialize params from this seed (default: config init_seed)");
  infer_cmd->add_option("--save-params", ia.save_params, "write the params used");
  infer_cmd->add_option("--jobs", ia.jobs, "worker threads")->check(CLI::PositiveNumber);
  infer_cmd->add_option("--out", ia.out, "predictions file (appended; default stdout)");

  std::string em, ep;
  std::optional<std::string> eo;
  auto* eval_cmd = app.add_subcommand("eval", "score predictions against a manifest");
  eval_cmd->add_option("--manifest", em, "manifest.jsonl")->required();
  eval_cmd->add_option("--predictions", ep, "predictions file")->required();
  eval_cmd->add_option("--out", eo, "directory for report.csv and ROC files");

  std::string batch_path;
  loss::LossConfig lc;
  auto* loss_cmd = app.add_subcommand("loss-check", "evaluate the training losses on a batch file");
  loss_cmd->add_option("--batch", batch_path, "batch file")->required();
  loss_cmd->add_option("--alpha", lc.alpha, "contrastive weight");
  loss_cmd->add_option("--beta", lc.beta, "classification weight");
  loss_cmd->add_option("--tau", lc.tau, "temperature");
  loss_cmd->add_option("--epsilon", lc.epsilon, "probability clamp");

  std::optional<std::string> fault;
  auto* self_cmd = app.add_subcommand("selfcheck", "run the embedded invariant suite");
  self_cmd->add_option("--inject-fault", fault, "deliberately break a check (layout)");

  auto* cfg_cmd = app.add_subcommand("show-config", "print the effective run config");
  std::vector<std::string> cfg_sets;
  std::optional<std::string> cfg_file;
  cfg_cmd->add_option("--config", cfg_file, "run config");
  cfg_cmd->add_option("--set", cfg_sets, "override a config field");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*synth_cmd) return cmd_synth(sa, out);
    if (*gen_cmd) return cmd_gen_dataset(ga, out, err);
    if (*infer_cmd) return cmd_infer(ia, out);
    if (*eval_cmd) return cmd_eval(em, ep, eo, out);
    if (*loss_cmd) return cmd_loss_check(batch_path, lc, out);
    if (*self_cmd) return selfcheck(out, fault);
    if (*cfg_cmd) {
      out << dump_run_config(load_run_config(cfg_file ? std::optional<std::filesystem::path>(*cfg_file) : std::nullopt,
                                             cfg_sets))
          << '\n';
      return kExitOk;
    }
  } catch (const Error& e) {
    err << e.what() << '\n';
    return e.kind() == ErrorKind::Usage ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace vidart::cli
