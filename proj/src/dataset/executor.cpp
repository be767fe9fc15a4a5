#include <algorithm>
#include <atomic>
#include <exception>
#include <set>
#include <thread>

#include "vidart/dataset.hpp"
#include "vidart/error.hpp"
#include "vidart/rng.hpp"
#include "vidart/synthetic.hpp"

namespace vidart::dataset {

SourceStore::SourceStore(Loader loader, std::function<bool(const std::string&)> exists)
    : loader_(std::move(loader)), exists_(std::move(exists)) {}

SourceStore SourceStore::from_directory(const std::filesystem::path& dir) {
  return SourceStore([dir](const std::string& id) { return io::read_y4m(dir / (id + ".y4m")); },
                     [dir](const std::string& id) { return std::filesystem::is_regular_file(dir / (id + ".y4m")); });
}

SourceStore SourceStore::synthetic(const SourceCatalog& catalog, std::uint64_t seed) {
  auto index = std::make_shared<std::map<std::string, SourceInfo, std::less<>>>();
  for (const auto& s : catalog) (*index)[s.id] = s;
  return SourceStore(
      [index, seed](const std::string& id) {
        const auto& s = index->at(id);
        return io::synthetic_clip(s.width, s.height, s.frames, derive_seed(seed, id));
      },
      [index](const std::string& id) { return index->count(id) > 0; });
}

std::shared_ptr<const io::Clip> SourceStore::get(const std::string& id) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(id); it != cache_.end()) return it->second;
  }
  if (!exists_(id)) throw Error(ErrorKind::Resolution, "source '" + id + "' not found");
  // Loading happens outside the lock; a concurrent duplicate load is harmless.
  auto clip = std::make_shared<const io::Clip>(loader_(id));
  std::lock_guard lock(mutex_);
  return cache_.emplace(id, std::move(clip)).first->second;
}

SourceCatalog scan_catalog(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorKind::Resolution, "source directory '" + dir.string() + "' missing");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".y4m") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  SourceCatalog cat;
  for (const auto& p : files) {
    const auto info = io::probe_y4m(p);
    const std::string id = p.stem().string();
    SourceClass cls = SourceClass::Hd;
    if (id.rfind("hfr", 0) == 0) cls = SourceClass::Hfr;
    else if (id.rfind("ugc", 0) == 0) cls = SourceClass::Ugc;
    cat.push_back({id, cls, info.width, info.height, info.frames});
  }
  return cat;
}

io::Clip synthesize_record(const ManifestRecord& record, const SourceStore& store) {
  const auto source = store.get(record.source_id);
  io::Clip clip = io::crop_patch(*source, record.window);

  std::vector<const AppliedArtifact*> steps;
  for (const auto& a : record.applied) {
    if (a.origin == Origin::Synthesized) steps.push_back(&a);
  }

  auto step = steps.begin();
  if (record.motion_stride > 1) {
    // Windows longer than a patch are reduced first: blurred if motion blur
    // was drawn, plain temporal subsampling otherwise.
    if (step != steps.end() && (*step)->spec.kind == ArtifactKind::MotionBlur) {
      clip = synth::synth_motion_blur(clip, (*step)->spec, record.motion_stride);
      ++step;
    } else {
      ArtifactSpec pick = ArtifactSpec::make(ArtifactKind::MotionBlur, IntensityLevel::VeryNoticeable);
      pick.param = 1;
      clip = synth::synth_motion_blur(clip, pick, record.motion_stride);
    }
  }

  const bool has_blockiness = std::any_of(steps.begin(), steps.end(),
                                          [](const AppliedArtifact* a) { return a->spec.kind == ArtifactKind::Blockiness; });
  bool codec_pending = record.qp.has_value() && !has_blockiness;
  for (; step != steps.end(); ++step) {
    const ArtifactSpec& spec = (*step)->spec;
    if (spec.kind == ArtifactKind::MotionBlur && record.motion_stride > 1) {
      throw Error(ErrorKind::Parameter, "record '" + record.patch_id + "': motion blur must lead an HFR window");
    }
    if (codec_pending && !synth::is_source(spec.kind)) {
      clip = synth::encode_block_dct(clip, *record.qp);
      codec_pending = false;
    }
    clip = synth::synthesize(clip, spec, 1);
  }
  if (codec_pending) clip = synth::encode_block_dct(clip, *record.qp);
  return clip;
}

std::vector<ManifestRecord> execute_plan(const std::vector<ManifestRecord>& records, const SourceStore& store,
                                         const ExecuteOptions& opts) {
  std::set<std::string> missing;
  for (const auto& r : records) {
    if (!store.contains(r.source_id)) missing.insert(r.source_id);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw Error(ErrorKind::Resolution, "missing sources: " + list);
  }

  std::filesystem::create_directories(opts.out_dir);
  if (!records.empty() && opts.write_patches) std::filesystem::create_directories(opts.out_dir / "patches");

  std::vector<ManifestRecord> done = records;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= done.size()) return;
      try {
        const io::Clip clip = synthesize_record(done[i], store);
        done[i].digest = io::payload_digest(clip);
        if (opts.write_patches) io::write_y4m(clip, opts.out_dir / done[i].path);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };

  const int jobs = std::max(1, opts.jobs);
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  write_manifest(done, opts.out_dir / "manifest.jsonl");
  return done;
}

}  // namespace vidart::dataset
