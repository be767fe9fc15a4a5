#include "vidart/error.hpp"

namespace vidart {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Format: return "format";
    case ErrorKind::Truncation: return "truncation";
    case ErrorKind::UnsupportedSampling: return "unsupported-sampling";
    case ErrorKind::Io: return "io";
    case ErrorKind::Bounds: return "bounds";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Length: return "length";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::Annotation: return "annotation";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Layout: return "layout";
    case ErrorKind::Alignment: return "alignment";
    case ErrorKind::UndefinedAuc: return "undefined-auc";
    case ErrorKind::UndefinedSimilarity: return "undefined-similarity";
    case ErrorKind::Coverage: return "coverage";
    case ErrorKind::Usage: return "usage";
  }
  return "unknown";
}

}  // namespace vidart
