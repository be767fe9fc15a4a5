#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vidart {

enum class ErrorKind {
  Format,
  Truncation,
  UnsupportedSampling,
  Io,
  Bounds,
  Parameter,
  Length,
  Resolution,
  Annotation,
  Shape,
  Layout,
  Alignment,
  UndefinedAuc,
  UndefinedSimilarity,
  Coverage,
  Usage,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the toolkit carries a kind so callers (and the CLI
// exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace vidart
