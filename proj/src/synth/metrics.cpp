#include "vidart/metrics.hpp"

#include <array>
#include <cmath>

#include "vidart/error.hpp"
#include "vidart/kernels.hpp"

namespace vidart::metrics {

namespace {
void require_same_geometry(const io::Clip& a, const io::Clip& b) {
  if (a.length() != b.length() || a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorKind::Shape, "clips differ in geometry");
  }
}
}  // namespace

double mean_luma(const io::Clip& clip) {
  std::uint64_t total = 0;
  std::uint64_t count = 0;
  for (const auto& f : clip.frames) {
    total += kernels::sum(f.luma);
    count += f.luma.size();
  }
  return count == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(count);
}

std::size_t distinct_luma_values(const io::Clip& clip) {
  std::array<bool, 256> seen{};
  for (const auto& f : clip.frames) {
    for (const auto v : f.luma) seen[v] = true;
  }
  std::size_t n = 0;
  for (const bool s : seen) n += s ? 1 : 0;
  return n;
}

double laplacian_variance(const io::Clip& clip) {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t n = 0;
  for (const auto& f : clip.frames) {
    for (int y = 1; y + 1 < f.height; ++y) {
      for (int x = 1; x + 1 < f.width; ++x) {
        const double lap = f.y(x - 1, y) + f.y(x + 1, y) + f.y(x, y - 1) + f.y(x, y + 1) - 4.0 * f.y(x, y);
        sum += lap;
        sum_sq += lap * lap;
        ++n;
      }
    }
  }
  if (n == 0) return 0.0;
  const double mean = sum / static_cast<double>(n);
  return sum_sq / static_cast<double>(n) - mean * mean;
}

double residual_std(const io::Clip& a, const io::Clip& b) {
  require_same_geometry(a, b);
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t n = 0;
  for (std::size_t t = 0; t < a.frames.size(); ++t) {
    const auto& fa = a.frames[t].luma;
    const auto& fb = b.frames[t].luma;
    for (std::size_t i = 0; i < fa.size(); ++i) {
      const double d = static_cast<double>(fb[i]) - static_cast<double>(fa[i]);
      sum += d;
      sum_sq += d * d;
    }
    n += fa.size();
  }
  if (n < 2) return 0.0;
  const double mean = sum / static_cast<double>(n);
  return std::sqrt((sum_sq - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1));
}

double mean_abs_error(const io::Clip& a, const io::Clip& b) {
  require_same_geometry(a, b);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t t = 0; t < a.frames.size(); ++t) {
    const auto& fa = a.frames[t].luma;
    const auto& fb = b.frames[t].luma;
    for (std::size_t i = 0; i < fa.size(); ++i) sum += std::abs(static_cast<double>(fb[i]) - static_cast<double>(fa[i]));
    n += fa.size();
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

}  // namespace vidart::metrics
