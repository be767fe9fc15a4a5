#include <algorithm>
#include <string>

#include "vidart/error.hpp"
#include "vidart/frame_io.hpp"
#include "vidart/rng.hpp"

namespace vidart::io {

Frame::Frame(int w, int h, std::uint8_t luma_fill, std::uint8_t chroma_fill) : width(w), height(h) {
  if (w <= 0 || h <= 0 || w % 2 != 0 || h % 2 != 0) {
    throw Error(ErrorKind::Parameter,
                "frame geometry must be positive and even, got " + std::to_string(w) + "x" + std::to_string(h));
  }
  const auto luma_size = static_cast<std::size_t>(w) * h;
  luma.assign(luma_size, luma_fill);
  chroma_u.assign(luma_size / 4, chroma_fill);
  chroma_v.assign(luma_size / 4, chroma_fill);
}

bool Frame::consistent() const noexcept {
  if (width <= 0 || height <= 0 || width % 2 != 0 || height % 2 != 0) return false;
  const auto luma_size = static_cast<std::size_t>(width) * height;
  return luma.size() == luma_size && chroma_u.size() == luma_size / 4 && chroma_v.size() == luma_size / 4;
}

void Clip::validate() const {
  if (frames.empty()) throw Error(ErrorKind::Parameter, "clip has no frames");
  const int w = frames.front().width;
  const int h = frames.front().height;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const Frame& f = frames[t];
    if (!f.consistent()) throw Error(ErrorKind::Parameter, "frame " + std::to_string(t) + " planes disagree with geometry");
    if (f.width != w || f.height != h) {
      throw Error(ErrorKind::Parameter, "frame " + std::to_string(t) + " geometry differs from frame 0");
    }
  }
  if (fps.num == 0 || fps.den == 0) throw Error(ErrorKind::Parameter, "frame rate must be non-zero");
}

PatchWindow compose(const PatchWindow& outer, const PatchWindow& inner) noexcept {
  return {outer.x0 + inner.x0, outer.y0 + inner.y0, outer.t0 + inner.t0, inner.w, inner.h, inner.len};
}

Clip crop_patch(const Clip& clip, const PatchWindow& win) {
  clip.validate();
  if (win.w <= 0 || win.h <= 0 || win.len <= 0 || win.w % 2 != 0 || win.h % 2 != 0 || win.x0 % 2 != 0 ||
      win.y0 % 2 != 0) {
    throw Error(ErrorKind::Bounds, "window size must be positive and even with even offsets");
  }
  if (win.x0 < 0 || win.y0 < 0 || win.t0 < 0 || win.x0 + win.w > clip.width() || win.y0 + win.h > clip.height() ||
      win.t0 + win.len > clip.length()) {
    throw Error(ErrorKind::Bounds, "window (" + std::to_string(win.x0) + "," + std::to_string(win.y0) + "," +
                                       std::to_string(win.t0) + "," + std::to_string(win.w) + "," +
                                       std::to_string(win.h) + "," + std::to_string(win.len) +
                                       ") exceeds clip bounds");
  }

  Clip out;
  out.fps = clip.fps;
  out.frames.reserve(static_cast<std::size_t>(win.len));
  const int cw = win.w / 2;
  for (int t = 0; t < win.len; ++t) {
    const Frame& src = clip.frames[static_cast<std::size_t>(win.t0 + t)];
    Frame dst(win.w, win.h);
    for (int row = 0; row < win.h; ++row) {
      const auto* s = src.luma.data() + static_cast<std::size_t>(win.y0 + row) * src.width + win.x0;
      std::copy_n(s, win.w, dst.luma.data() + static_cast<std::size_t>(row) * win.w);
    }
    for (int row = 0; row < win.h / 2; ++row) {
      const auto offset = static_cast<std::size_t>(win.y0 / 2 + row) * src.chroma_width() + win.x0 / 2;
      std::copy_n(src.chroma_u.data() + offset, cw, dst.chroma_u.data() + static_cast<std::size_t>(row) * cw);
      std::copy_n(src.chroma_v.data() + offset, cw, dst.chroma_v.data() + static_cast<std::size_t>(row) * cw);
    }
    out.frames.push_back(std::move(dst));
  }
  return out;
}

std::uint64_t payload_digest(const Clip& clip) noexcept {
  std::uint64_t h = 0;
  for (const Frame& f : clip.frames) {
    h = derive_seed(h, hash_bytes(f.luma));
    h = derive_seed(h, hash_bytes(f.chroma_u));
    h = derive_seed(h, hash_bytes(f.chroma_v));
  }
  return h;
}

}  // namespace vidart::io
