#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vidart/dataset.hpp"
#include "vidart/model.hpp"

namespace vidart::cli {

// Everything a run needs, loadable from a JSON(C) file and overridable with
// `--set section.key=value`. Unknown keys are rejected.
struct RunConfig {
  dataset::PipelineConfig pipeline;
  model::ModelConfig model;
  std::string sources;          // directory of <id>.y4m sources; empty = none
  std::string ugc_annotations;  // JSONL sidecar; empty = none
  std::string out = "out";
  int jobs = 1;
  std::uint64_t init_seed = 0;
};

// Throws Usage on unknown keys, type mismatches or malformed overrides.
RunConfig parse_run_config(std::string_view text, const std::vector<std::string>& overrides = {});
RunConfig load_run_config(const std::optional<std::filesystem::path>& path,
                          const std::vector<std::string>& overrides = {});
// Fully populated JSON of a config (defaults included).
std::string dump_run_config(const RunConfig& cfg);

// Exit status: 0 success, 1 data or invariant failure, 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Embedded invariant suite. `fault` injects a named failure ("layout").
int selfcheck(std::ostream& out, const std::optional<std::string>& fault);

}  // namespace vidart::cli
