#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vidart/error.hpp"
#include "vidart/eval.hpp"

namespace vidart::eval {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  return s;
}

}  // namespace

Predictions read_predictions(std::istream& in) {
  Predictions out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::istringstream ss(line);
    for (std::string f; std::getline(ss, f, '\t');) fields.push_back(f);
    const auto where = " (predictions line " + std::to_string(lineno) + ")";
    if (fields.size() != 1 + synth::kArtifactCount && fields.size() != 2 + synth::kArtifactCount) {
      throw Error(ErrorKind::Format, "expected id, 10 scores and optional labels" + where);
    }
    Scores s{};
    for (std::size_t j = 0; j < s.size(); ++j) {
      std::size_t used = 0;
      try {
        s[j] = std::stod(fields[j + 1], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != fields[j + 1].size() || !std::isfinite(s[j])) {
        throw Error(ErrorKind::Format, "bad score '" + fields[j + 1] + "'" + where);
      }
    }
    if (!out.emplace(fields[0], s).second) throw Error(ErrorKind::Format, "duplicate id '" + fields[0] + "'" + where);
  }
  return out;
}

Predictions read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open predictions '" + path.string() + "'");
  return read_predictions(in);
}

std::string format_prediction(const std::string& id, const Scores& scores) {
  std::string line = id;
  std::string labels;
  for (const double s : scores) {
    line += '\t' + fmt("%.9f", s);
    labels += s > 0.5 ? '1' : '0';
  }
  return line + '\t' + labels;
}

void write_report_csv(const Report& report, std::ostream& out) {
  out << "Artifact,N,Acc,F1,AUC\n";
  for (const auto& row : report) {
    out << synth::name(row.kind) << ',' << row.n << ',' << fmt("%.2f", row.acc) << ',' << fmt("%.4f", row.f1) << ','
        << (row.roc ? fmt("%.4f", row.roc->auc) : std::string("NA")) << '\n';
  }
}

void write_roc_files(const Report& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& row : report) {
    if (!row.roc) continue;
    const auto path = dir / ("roc_" + std::string(synth::name(row.kind)) + ".csv");
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
    out << "threshold,FPR,TPR\n";
    for (const auto& p : row.roc->points) {
      out << (std::isinf(p.threshold) ? std::string("inf") : fmt("%.9g", p.threshold)) << ',' << fmt("%.9g", p.fpr)
          << ',' << fmt("%.9g", p.tpr) << '\n';
    }
  }
}

}  // namespace vidart::eval
