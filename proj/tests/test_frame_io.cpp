#include <fstream>
#include <sstream>

#include "support.hpp"
#include "vidart/frame_io.hpp"
#include "vidart/synthetic.hpp"

using namespace vidart;
using io::Clip;
using io::PatchWindow;

namespace {

std::string y4m_text(const std::string& header, int frames, std::size_t frame_bytes, char fill = '\x80') {
  std::string s = header + "\n";
  for (int i = 0; i < frames; ++i) s += "FRAME\n" + std::string(frame_bytes, fill);
  return s;
}

Clip read_text(const std::string& text) {
  std::istringstream in(text);
  return io::read_y4m(in);
}

}  // namespace

TEST_CASE("2-frame 8x8 gray file reads as constant 128") {
  const auto c = read_text(y4m_text("YUV4MPEG2 W8 H8 F30000:1001 Ip A1:1 C420jpeg", 2, 96));
  REQUIRE(c.length() == 2);
  CHECK(c.width() == 8);
  CHECK(c.height() == 8);
  CHECK(c.fps == io::Rational{30000, 1001});
  for (const auto& f : c.frames) {
    for (auto v : f.luma) CHECK(v == 128);
  }
}

TEST_CASE("header variants and rejected streams") {
  CHECK_NOTHROW(read_text(y4m_text("YUV4MPEG2 W4 H2 F25:1", 1, 12)));
  CHECK_NOTHROW(read_text(y4m_text("YUV4MPEG2 W4 H2 F25:1 C420 XCOLORRANGE=LIMITED", 1, 12)));
  CHECK_THROWS_KIND(read_text(y4m_text("YUV4MPEG2 W8 H8 F25:1 C444", 1, 192)), ErrorKind::UnsupportedSampling);
  CHECK_THROWS_KIND(read_text(y4m_text("YUV4MPEG2 W8 H8 F25:1 C422", 1, 128)), ErrorKind::UnsupportedSampling);
  CHECK_THROWS_KIND(read_text(y4m_text("YUV4MPEG W8 H8", 1, 96)), ErrorKind::Format);
  CHECK_THROWS_KIND(read_text(y4m_text("YUV4MPEG2 H8 F25:1", 1, 96)), ErrorKind::Format);
  CHECK_THROWS_KIND(read_text(y4m_text("YUV4MPEG2 W7 H8 F25:1", 1, 84)), ErrorKind::Format);
  CHECK_THROWS_KIND(read_text(y4m_text("YUV4MPEG2 W8 H8 F25:1", 0, 0)), ErrorKind::Format);
  auto truncated = y4m_text("YUV4MPEG2 W8 H8 F25:1", 2, 96);
  truncated.pop_back();
  CHECK_THROWS_KIND(read_text(truncated), ErrorKind::Truncation);
  CHECK_THROWS_KIND(io::read_y4m(std::filesystem::path("/nonexistent/clip.y4m")), ErrorKind::Io);
}

TEST_CASE("property: write/read round trip is sample-exact") {
  testing::for_all(25, 11, [](CounterRng& rng, int) {
    const int w = 2 * static_cast<int>(1 + rng.below(12));
    const int h = 2 * static_cast<int>(1 + rng.below(12));
    auto c = testing::random_clip(rng, w, h, static_cast<int>(1 + rng.below(4)));
    c.fps = {static_cast<std::uint32_t>(1 + rng.below(120)), static_cast<std::uint32_t>(1 + rng.below(2))};
    std::stringstream ss;
    io::write_y4m(c, ss);
    const std::string first = ss.str();
    const auto back = io::read_y4m(ss);
    CHECK(back == c);
    std::stringstream again;
    io::write_y4m(back, again);
    CHECK(again.str() == first);
  });
}

TEST_CASE("560x560x64 file size is header plus 4:2:0 payload") {
  const Clip c = testing::constant_clip(560, 560, 64, 16);
  const auto dir = testing::scratch_dir("size");
  const auto path = dir / "big.y4m";
  io::write_y4m(c, path);
  // Independent arithmetic: luma + two quarter-size chroma planes, plus "FRAME\n".
  const std::string header = "YUV4MPEG2 W560 H560 F25:1 Ip A1:1 C420jpeg\n";
  const std::uintmax_t payload = 64ULL * (560 * 560 + 2 * 280 * 280);
  CHECK(io::y4m_header_size(c) == header.size());
  CHECK(std::filesystem::file_size(path) == header.size() + payload + 64 * 6);
  const auto info = io::probe_y4m(path);
  CHECK(info.frames == 64);
  CHECK(info.width == 560);
}

TEST_CASE("empty clip and unwritable path are rejected") {
  CHECK_THROWS_KIND(io::write_y4m(Clip{}, std::filesystem::path("/tmp/never.y4m")), ErrorKind::Parameter);
  CHECK_THROWS_KIND(io::write_y4m(testing::constant_clip(2, 2, 1, 0), std::filesystem::path("/nonexistent/dir/x.y4m")),
                    ErrorKind::Io);
  CHECK_THROWS_KIND(io::Frame(3, 2), ErrorKind::Parameter);
}

TEST_CASE("crop of a ramp returns the co-located samples") {
  Clip c = testing::constant_clip(8, 6, 2, 0);
  for (int t = 0; t < 2; ++t) {
    for (int y = 0; y < 6; ++y) {
      for (int x = 0; x < 8; ++x) c.frames[t].y(x, y) = static_cast<std::uint8_t>(100 * t + 10 * y + x);
    }
  }
  const auto p = io::crop_patch(c, {0, 0, 0, 2, 2, 1});
  REQUIRE(p.length() == 1);
  CHECK(p.frames[0].luma == std::vector<std::uint8_t>{0, 1, 10, 11});

  const auto q = io::crop_patch(c, {4, 2, 1, 4, 2, 1});
  CHECK(q.frames[0].luma == std::vector<std::uint8_t>{124, 125, 126, 127, 134, 135, 136, 137});
  CHECK(io::crop_patch(c, {0, 0, 0, 8, 6, 2}) == c);
}

TEST_CASE("crop bounds") {
  const Clip c = testing::constant_clip(8, 8, 4, 0);
  CHECK_THROWS_KIND(io::crop_patch(c, {2, 0, 0, 8, 8, 1}), ErrorKind::Bounds);
  CHECK_THROWS_KIND(io::crop_patch(c, {0, 0, 3, 2, 2, 2}), ErrorKind::Bounds);
  CHECK_THROWS_KIND(io::crop_patch(c, {0, 0, 0, 3, 2, 1}), ErrorKind::Bounds);
  CHECK_THROWS_KIND(io::crop_patch(c, {0, 0, 0, 0, 2, 1}), ErrorKind::Bounds);
}

TEST_CASE("HFR-length window keeps 512 frames") {
  const Clip c = testing::constant_clip(4, 4, 600, 50);
  CHECK(io::crop_patch(c, {0, 0, 40, 4, 4, 512}).length() == 512);
}

TEST_CASE("property: crop composition") {
  testing::for_all(60, 12, [](CounterRng& rng, int) {
    const auto c = testing::random_clip(rng, 24, 20, 6);
    auto window_in = [&](int w, int h, int len) {
      PatchWindow p;
      p.w = 2 * static_cast<int>(1 + rng.below(static_cast<std::uint64_t>(w / 2)));
      p.h = 2 * static_cast<int>(1 + rng.below(static_cast<std::uint64_t>(h / 2)));
      p.len = static_cast<int>(1 + rng.below(static_cast<std::uint64_t>(len)));
      p.x0 = 2 * static_cast<int>(rng.below(static_cast<std::uint64_t>((w - p.w) / 2 + 1)));
      p.y0 = 2 * static_cast<int>(rng.below(static_cast<std::uint64_t>((h - p.h) / 2 + 1)));
      p.t0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(len - p.len + 1)));
      return p;
    };
    const auto a = window_in(24, 20, 6);
    const auto b = window_in(a.w, a.h, a.len);
    const auto nested = io::crop_patch(io::crop_patch(c, a), b);
    CHECK(nested == io::crop_patch(c, io::compose(a, b)));
    CHECK_NOTHROW(nested.validate());
  });
}

TEST_CASE("synthetic content is deterministic, legal-range and moving") {
  const auto a = io::synthetic_clip(64, 48, 4, 5);
  CHECK(a == io::synthetic_clip(64, 48, 4, 5));
  CHECK_FALSE(a == io::synthetic_clip(64, 48, 4, 6));
  CHECK_FALSE(a.frames[0] == a.frames[1]);
  for (const auto& f : a.frames) {
    for (auto v : f.luma) {
      CHECK(v >= 16);
      CHECK(v <= 235);
    }
  }
}

TEST_CASE("payload digest tracks every sample") {
  auto c = testing::constant_clip(4, 4, 2, 9);
  const auto d = io::payload_digest(c);
  c.frames[1].chroma_v[3] ^= 1;
  CHECK(io::payload_digest(c) != d);
}
