#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace vidart::io {

struct Rational {
  std::uint32_t num = 25;
  std::uint32_t den = 1;
  bool operator==(const Rational&) const = default;
};

// One planar 8-bit 4:2:0 picture. Chroma planes are (width/2) x (height/2).
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> luma;
  std::vector<std::uint8_t> chroma_u;
  std::vector<std::uint8_t> chroma_v;

  Frame() = default;
  // Throws Parameter if either dimension is odd or not positive.
  Frame(int w, int h, std::uint8_t luma_fill = 0, std::uint8_t chroma_fill = 128);

  int chroma_width() const noexcept { return width / 2; }
  int chroma_height() const noexcept { return height / 2; }

  std::uint8_t& y(int x, int row) noexcept { return luma[static_cast<std::size_t>(row) * width + x]; }
  std::uint8_t y(int x, int row) const noexcept { return luma[static_cast<std::size_t>(row) * width + x]; }

  std::span<std::uint8_t> luma_row(int row) noexcept {
    return {luma.data() + static_cast<std::size_t>(row) * width, static_cast<std::size_t>(width)};
  }
  std::span<const std::uint8_t> luma_row(int row) const noexcept {
    return {luma.data() + static_cast<std::size_t>(row) * width, static_cast<std::size_t>(width)};
  }

  // Plane sizes agree with the geometry.
  bool consistent() const noexcept;

  bool operator==(const Frame&) const = default;
};

struct Clip {
  std::vector<Frame> frames;
  Rational fps;

  int width() const noexcept { return frames.empty() ? 0 : frames.front().width; }
  int height() const noexcept { return frames.empty() ? 0 : frames.front().height; }
  int length() const noexcept { return static_cast<int>(frames.size()); }

  // Throws Parameter when the clip is empty, geometry differs between frames,
  // or any plane length disagrees with its geometry.
  void validate() const;

  bool operator==(const Clip&) const = default;
};

struct PatchWindow {
  int x0 = 0;
  int y0 = 0;
  int t0 = 0;
  int w = 0;
  int h = 0;
  int len = 0;
  bool operator==(const PatchWindow&) const = default;
};

// Window `inner` expressed relative to `outer`, mapped into outer's source.
PatchWindow compose(const PatchWindow& outer, const PatchWindow& inner) noexcept;

// Y4M stream I/O. Only 4:2:0 chroma tags are accepted (C420, C420jpeg,
// C420paldv, C420mpeg2, or no C tag).
Clip read_y4m(std::istream& in);
Clip read_y4m(const std::filesystem::path& path);
void write_y4m(const Clip& clip, std::ostream& out);
void write_y4m(const Clip& clip, const std::filesystem::path& path);

// Header line written by write_y4m, including its trailing newline.
std::size_t y4m_header_size(const Clip& clip);

struct Y4mInfo {
  int width = 0;
  int height = 0;
  Rational fps;
  int frames = 0;
};
// Geometry and frame count without decoding payloads.
Y4mInfo probe_y4m(const std::filesystem::path& path);

Clip crop_patch(const Clip& clip, const PatchWindow& win);

// Digest over every sample of every frame, in file order.
std::uint64_t payload_digest(const Clip& clip) noexcept;

}  // namespace vidart::io
