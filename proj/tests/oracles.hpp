#pragma once

#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "vidart/dataset.hpp"

namespace oracle {

// Ids enumerated straight from the configuration, independent of the planner.
inline std::set<std::string> enumerate_ids(const vidart::dataset::PipelineConfig& c) {
  std::set<std::string> ids;
  auto sources = [](const char* prefix, int n) {
    std::vector<std::string> v;
    for (int i = 0; i < n; ++i) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%s%03d", prefix, i);
      v.emplace_back(buf);
    }
    return v;
  };
  std::vector<std::string> synth_src = sources("hd", c.n_hd_sources);
  for (auto& s : sources("hfr", c.n_hfr_sources)) synth_src.push_back(s);
  for (const auto& s : synth_src) {
    for (int p = 0; p < c.patches_per_source; ++p) {
      const std::string sp = s + "_p" + std::to_string(p);
      for (int r = 0; r < c.source_repeats; ++r) {
        const std::string unit = sp + "_r" + std::to_string(r);
        ids.insert("aint/" + unit);
        ids.insert("arnd/" + unit);
        for (int qp : c.qp_list) {
          for (int n = 0; n < c.nonsource_repeats; ++n) {
            ids.insert("base/" + unit + "_q" + std::to_string(qp) + "_n" + std::to_string(n));
          }
        }
      }
    }
  }
  for (const auto& s : sources("ugc", c.n_ugc_sources)) {
    for (int p = 0; p < c.patches_per_source; ++p) {
      for (int qp : c.qp_list) {
        for (int n = 0; n < c.nonsource_repeats; ++n) {
          ids.insert("augc/" + s + "_p" + std::to_string(p) + "_q" + std::to_string(qp) + "_n" + std::to_string(n));
        }
      }
    }
  }
  return ids;
}

}  // namespace oracle
