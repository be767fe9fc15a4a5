#include <fstream>
#include <sstream>

#include "vidart/cli.hpp"
#include "vidart/error.hpp"
#include "json.hpp"

namespace vidart::cli {

namespace {

using nlohmann::ordered_json;

ordered_json to_json(const RunConfig& c) {
  const auto& p = c.pipeline;
  const auto& a = c.model.adfe;
  const auto& r = c.model.rmvit;
  ordered_json j;
  j["pipeline"] = {{"n_hd_sources", p.n_hd_sources},
                   {"n_hfr_sources", p.n_hfr_sources},
                   {"n_ugc_sources", p.n_ugc_sources},
                   {"patches_per_source", p.patches_per_source},
                   {"source_repeats", p.source_repeats},
                   {"nonsource_repeats", p.nonsource_repeats},
                   {"qp_list", p.qp_list},
                   {"inclusion_prob", p.inclusion_prob},
                   {"patch_width", p.patch_width},
                   {"patch_height", p.patch_height},
                   {"patch_len", p.patch_len},
                   {"hfr_len", p.hfr_len},
                   {"source_width", p.source_width},
                   {"source_height", p.source_height},
                   {"source_len", p.source_len},
                   {"hfr_source_len", p.hfr_source_len},
                   {"master_seed", p.master_seed}};
  j["model"] = {{"adfe",
                 {{"levels", a.levels},
                  {"kernel", a.kernel},
                  {"regions", a.regions},
                  {"channels", a.channels},
                  {"generator_hidden", a.generator_hidden},
                  {"pool_grid", a.pool_grid},
                  {"embed_dim", a.embed_dim}}},
                {"rmvit",
                 {{"segment_len", r.segment_len},
                  {"mem_tokens", r.mem_tokens},
                  {"depth", r.depth},
                  {"heads", r.heads},
                  {"dim", r.dim},
                  {"mlp_hidden", r.mlp_hidden},
                  {"out_dim", r.out_dim},
                  {"position_encoding", r.position_encoding}}},
                {"head_hidden", c.model.head_hidden}};
  j["paths"] = {{"sources", c.sources}, {"ugc_annotations", c.ugc_annotations}, {"out", c.out}};
  j["jobs"] = c.jobs;
  j["init_seed"] = c.init_seed;
  return j;
}

RunConfig from_json(const ordered_json& j) {
  RunConfig c;
  auto& p = c.pipeline;
  const auto& jp = j.at("pipeline");
  jp.at("n_hd_sources").get_to(p.n_hd_sources);
  jp.at("n_hfr_sources").get_to(p.n_hfr_sources);
  jp.at("n_ugc_sources").get_to(p.n_ugc_sources);
  jp.at("patches_per_source").get_to(p.patches_per_source);
  jp.at("source_repeats").get_to(p.source_repeats);
  jp.at("nonsource_repeats").get_to(p.nonsource_repeats);
  jp.at("qp_list").get_to(p.qp_list);
  jp.at("inclusion_prob").get_to(p.inclusion_prob);
  jp.at("patch_width").get_to(p.patch_width);
  jp.at("patch_height").get_to(p.patch_height);
  jp.at("patch_len").get_to(p.patch_len);
  jp.at("hfr_len").get_to(p.hfr_len);
  jp.at("source_width").get_to(p.source_width);
  jp.at("source_height").get_to(p.source_height);
  jp.at("source_len").get_to(p.source_len);
  jp.at("hfr_source_len").get_to(p.hfr_source_len);
  jp.at("master_seed").get_to(p.master_seed);

  const auto& ja = j.at("model").at("adfe");
  auto& a = c.model.adfe;
  ja.at("levels").get_to(a.levels);
  ja.at("kernel").get_to(a.kernel);
  ja.at("regions").get_to(a.regions);
  ja.at("channels").get_to(a.channels);
  ja.at("generator_hidden").get_to(a.generator_hidden);
  ja.at("pool_grid").get_to(a.pool_grid);
  ja.at("embed_dim").get_to(a.embed_dim);
  const auto& jr = j.at("model").at("rmvit");
  auto& r = c.model.rmvit;
  jr.at("segment_len").get_to(r.segment_len);
  jr.at("mem_tokens").get_to(r.mem_tokens);
  jr.at("depth").get_to(r.depth);
  jr.at("heads").get_to(r.heads);
  jr.at("dim").get_to(r.dim);
  jr.at("mlp_hidden").get_to(r.mlp_hidden);
  jr.at("out_dim").get_to(r.out_dim);
  jr.at("position_encoding").get_to(r.position_encoding);
  j.at("model").at("head_hidden").get_to(c.model.head_hidden);

  const auto& jpath = j.at("paths");
  jpath.at("sources").get_to(c.sources);
  jpath.at("ugc_annotations").get_to(c.ugc_annotations);
  jpath.at("out").get_to(c.out);
  j.at("jobs").get_to(c.jobs);
  j.at("init_seed").get_to(c.init_seed);
  return c;
}

// Overlay `patch` onto `base`, accepting only keys that already exist there.
void merge(ordered_json& base, const ordered_json& patch, const std::string& where) {
  if (!patch.is_object()) throw Error(ErrorKind::Usage, "config " + (where.empty() ? "root" : where) + " must be an object");
  for (const auto& [key, value] : patch.items()) {
    const auto path = where.empty() ? key : where + "." + key;
    if (!base.contains(key)) throw Error(ErrorKind::Usage, "unknown config key '" + path + "'");
    auto& slot = base[key];
    if (slot.is_object()) {
      merge(slot, value, path);
    } else if (value.is_object()) {
      throw Error(ErrorKind::Usage, "config key '" + path + "' is not a section");
    } else {
      slot = value;
    }
  }
}

ordered_json override_patch(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorKind::Usage, "override '" + assignment + "' is not of the form key.path=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  ordered_json value = ordered_json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;  // bare strings need no quotes

  std::vector<std::string> parts;
  std::istringstream ks(key);
  for (std::string part; std::getline(ks, part, '.');) parts.push_back(part);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    if (it->empty()) throw Error(ErrorKind::Usage, "empty component in override key '" + key + "'");
    ordered_json wrap = ordered_json::object();
    wrap[*it] = std::move(value);
    value = std::move(wrap);
  }
  return value;
}

}  // namespace

RunConfig parse_run_config(std::string_view text, const std::vector<std::string>& overrides) {
  ordered_json j = to_json(RunConfig{});
  if (!text.empty()) {
    ordered_json file;
    try {
      file = ordered_json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Usage, std::string("config is not valid JSON: ") + e.what());
    }
    merge(j, file, "");
  }
  for (const auto& o : overrides) merge(j, override_patch(o), "");
  try {
    RunConfig c = from_json(j);
    c.pipeline.validate();
    c.model.validate();
    if (c.jobs < 1) throw Error(ErrorKind::Parameter, "jobs must be >= 1");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Usage, std::string("config value has the wrong type: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorKind::Usage, e.what());
  }
}

RunConfig load_run_config(const std::optional<std::filesystem::path>& path, const std::vector<std::string>& overrides) {
  std::string text;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw Error(ErrorKind::Usage, "cannot open config '" + path->string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return parse_run_config(text, overrides);
}

std::string dump_run_config(const RunConfig& cfg) { return to_json(cfg).dump(2); }

}  // namespace vidart::cli
