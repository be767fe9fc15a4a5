#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "common.hpp"

namespace vidart::synth {

namespace {

constexpr int kBlock = 8;
using Block = std::array<std::array<double, kBlock>, kBlock>;

const Block& dct_basis() {
  static const Block basis = [] {
    Block c{};
    for (int u = 0; u < kBlock; ++u) {
      const double a = u == 0 ? std::sqrt(1.0 / kBlock) : std::sqrt(2.0 / kBlock);
      for (int x = 0; x < kBlock; ++x) c[u][x] = a * std::cos((2 * x + 1) * u * std::numbers::pi / (2.0 * kBlock));
    }
    return c;
  }();
  return basis;
}

// out = C * in * C^T when forward, C^T * in * C otherwise.
Block transform(const Block& in, bool forward) {
  const Block& c = dct_basis();
  Block tmp{};
  Block out{};
  for (int i = 0; i < kBlock; ++i) {
    for (int j = 0; j < kBlock; ++j) {
      double s = 0.0;
      for (int k = 0; k < kBlock; ++k) s += (forward ? c[i][k] : c[k][i]) * in[k][j];
      tmp[i][j] = s;
    }
  }
  for (int i = 0; i < kBlock; ++i) {
    for (int j = 0; j < kBlock; ++j) {
      double s = 0.0;
      for (int k = 0; k < kBlock; ++k) s += tmp[i][k] * (forward ? c[j][k] : c[k][j]);
      out[i][j] = s;
    }
  }
  return out;
}

void code_frame(io::Frame& f, double step) {
  const int w = f.width;
  const int h = f.height;
  for (int by = 0; by < h; by += kBlock) {
    for (int bx = 0; bx < w; bx += kBlock) {
      // Partial edge blocks are padded by edge replication; only in-frame samples are written back.
      Block b{};
      for (int y = 0; y < kBlock; ++y) {
        for (int x = 0; x < kBlock; ++x) b[y][x] = f.y(std::min(bx + x, w - 1), std::min(by + y, h - 1));
      }
      Block coef = transform(b, true);
      for (int v = 0; v < kBlock; ++v) {
        for (int u = 0; u < kBlock; ++u) {
          if (u == 0 && v == 0) continue;
          coef[v][u] = std::nearbyint(coef[v][u] / step) * step;
        }
      }
      const Block rec = transform(coef, false);
      for (int y = 0; y < kBlock && by + y < h; ++y) {
        for (int x = 0; x < kBlock && bx + x < w; ++x) {
          f.y(bx + x, by + y) = static_cast<std::uint8_t>(std::clamp(std::nearbyint(rec[y][x]), 0.0, 255.0));
        }
      }
    }
  }
}

}  // namespace

double qstep_for_qp(double qp) noexcept { return std::pow(2.0, (qp - 4.0) / 6.0); }

io::Clip encode_block_dct(const io::Clip& clip, double qp) {
  clip.validate();
  if (!std::isfinite(qp) || qp < 0.0 || qp > 63.0) throw Error(ErrorKind::Parameter, "QP must be in [0, 63]");
  const double step = qstep_for_qp(qp);
  io::Clip out = clip;
  for (auto& f : out.frames) code_frame(f, step);
  return out;
}

io::Clip synth_blockiness(const io::Clip& clip, const ArtifactSpec& spec) {
  detail::require_kind(spec, ArtifactKind::Blockiness);
  return encode_block_dct(clip, spec.param);
}

}  // namespace vidart::synth
