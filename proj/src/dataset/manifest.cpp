#include <cinttypes>
#include <cstdio>
#include <fstream>

#include "vidart/dataset.hpp"
#include "vidart/error.hpp"
#include "vidart/rng.hpp"

#include "json.hpp"

namespace vidart::dataset {

namespace {

using json = nlohmann::ordered_json;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
  if (s.empty() || s.size() > 16) throw Error(ErrorKind::Format, "bad 64-bit hex value '" + s + "'");
  std::uint64_t v = 0;
  for (const char c : s) {
    v <<= 4;
    if (c >= '0' && c <= '9') v |= static_cast<std::uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f') v |= static_cast<std::uint64_t>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F') v |= static_cast<std::uint64_t>(c - 'A' + 10);
    else throw Error(ErrorKind::Format, "bad 64-bit hex value '" + s + "'");
  }
  return v;
}

ArtifactKind kind_from(const std::string& s) {
  if (auto k = synth::parse_artifact(s)) return *k;
  throw Error(ErrorKind::Format, "unknown artifact '" + s + "'");
}

SourceClass class_from(const std::string& s) {
  for (const auto c : {SourceClass::Hd, SourceClass::Hfr, SourceClass::Ugc}) {
    if (name(c) == s) return c;
  }
  throw Error(ErrorKind::Format, "unknown source class '" + s + "'");
}

}  // namespace

std::string to_json_line(const ManifestRecord& r) {
  json j;
  j["patch_id"] = r.patch_id;
  j["source_id"] = r.source_id;
  j["source_class"] = name(r.source_class);
  j["stage"] = name(r.stage);
  j["window"] = {{"x0", r.window.x0}, {"y0", r.window.y0}, {"t0", r.window.t0},
                 {"w", r.window.w},   {"h", r.window.h},   {"len", r.window.len}};
  j["qp"] = r.qp ? json(*r.qp) : json(nullptr);
  j["motion_stride"] = r.motion_stride;
  json order = json::array();
  for (const auto k : r.order) order.push_back(synth::name(k));
  j["order"] = std::move(order);
  json applied = json::array();
  for (const auto& a : r.applied) {
    json e;
    e["kind"] = synth::name(a.spec.kind);
    e["origin"] = a.origin == Origin::Annotated ? "annotated" : "synthesized";
    e["level"] = synth::name(a.spec.level);
    e["param"] = a.spec.param;
    e["seed"] = a.spec.seed ? json(hex64(*a.spec.seed)) : json(nullptr);
    applied.push_back(std::move(e));
  }
  j["applied"] = std::move(applied);
  j["labels"] = r.labels.str();
  j["eligible"] = r.eligible.str();
  j["patch_seed"] = hex64(r.patch_seed);
  j["path"] = r.path;
  j["digest"] = r.digest ? json(hex64(*r.digest)) : json(nullptr);
  return j.dump();
}

ManifestRecord parse_json_line(std::string_view line) {
  ManifestRecord r;
  try {
    const json j = json::parse(line);
    r.patch_id = j.at("patch_id").get<std::string>();
    r.source_id = j.at("source_id").get<std::string>();
    r.source_class = class_from(j.at("source_class").get<std::string>());
    const auto stage = parse_stage(j.at("stage").get<std::string>());
    if (!stage) throw Error(ErrorKind::Format, "unknown stage in record '" + r.patch_id + "'");
    r.stage = *stage;
    const auto& w = j.at("window");
    r.window = {w.at("x0").get<int>(), w.at("y0").get<int>(), w.at("t0").get<int>(),
                w.at("w").get<int>(),  w.at("h").get<int>(),  w.at("len").get<int>()};
    if (!j.at("qp").is_null()) r.qp = j.at("qp").get<int>();
    r.motion_stride = j.at("motion_stride").get<int>();
    for (const auto& k : j.at("order")) r.order.push_back(kind_from(k.get<std::string>()));
    for (const auto& e : j.at("applied")) {
      AppliedArtifact a;
      a.spec.kind = kind_from(e.at("kind").get<std::string>());
      const auto level = synth::parse_level(e.at("level").get<std::string>());
      if (!level) throw Error(ErrorKind::Format, "unknown level in record '" + r.patch_id + "'");
      a.spec.level = *level;
      a.spec.param = e.at("param").get<double>();
      if (!e.at("seed").is_null()) a.spec.seed = parse_hex64(e.at("seed").get<std::string>());
      a.origin = e.at("origin").get<std::string>() == "annotated" ? Origin::Annotated : Origin::Synthesized;
      r.applied.push_back(a);
    }
    r.labels = LabelVector::parse(j.at("labels").get<std::string>());
    r.eligible = LabelVector::parse(j.at("eligible").get<std::string>());
    r.patch_seed = parse_hex64(j.at("patch_seed").get<std::string>());
    r.path = j.at("path").get<std::string>();
    if (!j.at("digest").is_null()) r.digest = parse_hex64(j.at("digest").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Format, std::string("manifest record: ") + e.what());
  }
  return r;
}

void write_manifest(const std::vector<ManifestRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write manifest '" + path.string() + "'");
  for (const auto& r : records) out << to_json_line(r) << '\n';
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "manifest write to '" + path.string() + "' failed");
}

std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open manifest '" + path.string() + "'");
  std::vector<ManifestRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_json_line(line));
  }
  return out;
}

std::uint64_t manifest_digest(const std::vector<ManifestRecord>& records) {
  std::uint64_t h = 0;
  for (const auto& r : records) h = derive_seed(h, to_json_line(r));
  return h;
}

}  // namespace vidart::dataset
