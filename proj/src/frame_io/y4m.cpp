#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "vidart/error.hpp"
#include "vidart/frame_io.hpp"

namespace vidart::io {

namespace {

constexpr std::string_view kMagic = "YUV4MPEG2";
constexpr std::string_view kFrameTag = "FRAME";
constexpr std::size_t kMaxHeader = 4096;

bool parse_int(std::string_view s, int& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

Rational parse_ratio(std::string_view s) {
  const auto colon = s.find(':');
  int num = 0;
  int den = 0;
  if (colon == std::string_view::npos || !parse_int(s.substr(0, colon), num) ||
      !parse_int(s.substr(colon + 1), den) || num <= 0 || den <= 0) {
    throw Error(ErrorKind::Format, "bad frame-rate field '" + std::string(s) + "'");
  }
  return {static_cast<std::uint32_t>(num), static_cast<std::uint32_t>(den)};
}

bool is_420(std::string_view tag) {
  return tag == "420" || tag == "420jpeg" || tag == "420paldv" || tag == "420mpeg2";
}

std::string read_line(std::istream& in, bool& eof) {
  std::string line;
  eof = false;
  char c = 0;
  while (in.get(c)) {
    if (c == '\n') return line;
    line.push_back(c);
    if (line.size() > kMaxHeader) throw Error(ErrorKind::Format, "header line too long");
  }
  eof = true;
  return line;
}

struct Header {
  int width = 0;
  int height = 0;
  Rational fps;
};

Header parse_header(const std::string& line) {
  std::istringstream tokens(line);
  std::string tok;
  if (!(tokens >> tok) || tok != kMagic) throw Error(ErrorKind::Format, "missing YUV4MPEG2 signature");
  Header hdr;
  while (tokens >> tok) {
    const char key = tok[0];
    const std::string_view value = std::string_view(tok).substr(1);
    switch (key) {
      case 'W':
        if (!parse_int(value, hdr.width)) throw Error(ErrorKind::Format, "bad width '" + tok + "'");
        break;
      case 'H':
        if (!parse_int(value, hdr.height)) throw Error(ErrorKind::Format, "bad height '" + tok + "'");
        break;
      case 'F':
        hdr.fps = parse_ratio(value);
        break;
      case 'C':
        if (!is_420(value)) throw Error(ErrorKind::UnsupportedSampling, "chroma sampling '" + tok + "' is not 4:2:0");
        break;
      case 'I':
      case 'A':
      case 'X':
        break;
      default:
        throw Error(ErrorKind::Format, "unknown header field '" + tok + "'");
    }
  }
  if (hdr.width <= 0 || hdr.height <= 0) throw Error(ErrorKind::Format, "header lacks positive W/H");
  if (hdr.width % 2 != 0 || hdr.height % 2 != 0) throw Error(ErrorKind::Format, "4:2:0 geometry must be even");
  return hdr;
}

void read_plane(std::istream& in, std::vector<std::uint8_t>& plane, int frame_index) {
  in.read(reinterpret_cast<char*>(plane.data()), static_cast<std::streamsize>(plane.size()));
  if (static_cast<std::size_t>(in.gcount()) != plane.size()) {
    throw Error(ErrorKind::Truncation, "frame " + std::to_string(frame_index) + " payload is truncated");
  }
}

std::string header_line(const Clip& clip) {
  return std::string(kMagic) + " W" + std::to_string(clip.width()) + " H" + std::to_string(clip.height()) + " F" +
         std::to_string(clip.fps.num) + ":" + std::to_string(clip.fps.den) + " Ip A1:1 C420jpeg\n";
}

}  // namespace

Clip read_y4m(std::istream& in) {
  bool eof = false;
  const Header hdr = parse_header(read_line(in, eof));
  if (eof) throw Error(ErrorKind::Format, "unterminated stream header");

  Clip clip;
  clip.fps = hdr.fps;
  for (int index = 0;; ++index) {
    if (in.peek() == std::char_traits<char>::eof()) break;
    const std::string tag = read_line(in, eof);
    if (eof) throw Error(ErrorKind::Truncation, "frame " + std::to_string(index) + " header is truncated");
    if (tag.compare(0, kFrameTag.size(), kFrameTag) != 0) {
      throw Error(ErrorKind::Format, "expected FRAME marker at frame " + std::to_string(index));
    }
    Frame f(hdr.width, hdr.height);
    read_plane(in, f.luma, index);
    read_plane(in, f.chroma_u, index);
    read_plane(in, f.chroma_v, index);
    clip.frames.push_back(std::move(f));
  }
  if (clip.frames.empty()) throw Error(ErrorKind::Format, "stream contains no frames");
  return clip;
}

Clip read_y4m(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  return read_y4m(in);
}

void write_y4m(const Clip& clip, std::ostream& out) {
  clip.validate();
  out << header_line(clip);
  for (const Frame& f : clip.frames) {
    out << kFrameTag << '\n';
    out.write(reinterpret_cast<const char*>(f.luma.data()), static_cast<std::streamsize>(f.luma.size()));
    out.write(reinterpret_cast<const char*>(f.chroma_u.data()), static_cast<std::streamsize>(f.chroma_u.size()));
    out.write(reinterpret_cast<const char*>(f.chroma_v.data()), static_cast<std::streamsize>(f.chroma_v.size()));
  }
  if (!out) throw Error(ErrorKind::Io, "write failed");
}

void write_y4m(const Clip& clip, const std::filesystem::path& path) {
  clip.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  write_y4m(clip, out);
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

std::size_t y4m_header_size(const Clip& clip) { return header_line(clip).size(); }

Y4mInfo probe_y4m(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  bool eof = false;
  const std::string line = read_line(in, eof);
  const Header hdr = parse_header(line);
  const auto header_bytes = line.size() + 1;
  const auto frame_bytes = static_cast<std::uintmax_t>(hdr.width) * hdr.height * 3 / 2 + kFrameTag.size() + 1;
  const auto total = std::filesystem::file_size(path);
  // Assumes bare FRAME markers, which is what write_y4m emits.
  return {hdr.width, hdr.height, hdr.fps, static_cast<int>((total - header_bytes) / frame_bytes)};
}

}  // namespace vidart::io
