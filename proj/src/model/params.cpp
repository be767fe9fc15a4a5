#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "vidart/error.hpp"
#include "vidart/model.hpp"
#include "vidart/rng.hpp"

namespace vidart::model {

namespace {

constexpr std::array<char, 8> kMagic = {'V', 'I', 'D', 'A', 'R', 'T', 'P', 'M'};
constexpr std::uint32_t kVersion = 1;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::Parameter, "model config: " + what);
}

class LayoutBuilder {
 public:
  void add(std::string name, std::size_t count, std::size_t fan_in) {
    entries_.push_back({std::move(name), offset_, count, fan_in, false});
    offset_ += count;
  }
  void norm(const std::string& prefix, std::size_t dim) {
    entries_.push_back({prefix + ".scale", offset_, dim, 0, true});
    offset_ += dim;
    entries_.push_back({prefix + ".shift", offset_, dim, 0, false});
    offset_ += dim;
  }
  void linear(const std::string& prefix, std::size_t out, std::size_t in) {
    add(prefix + ".weight", out * in, in);
    add(prefix + ".bias", out, in);
  }
  std::vector<LayoutEntry> take() { return std::move(entries_); }

 private:
  std::vector<LayoutEntry> entries_;
  std::size_t offset_ = 0;
};

// Little-endian scalar I/O independent of host byte order.
template <typename T>
void put(std::ostream& out, T v) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U u = std::bit_cast<U>(v);
  unsigned char b[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), sizeof b);
}

template <typename T>
T get(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  unsigned char b[sizeof(U)];
  in.read(reinterpret_cast<char*>(b), sizeof b);
  if (in.gcount() != static_cast<std::streamsize>(sizeof b)) throw Error(ErrorKind::Layout, "params file truncated");
  U u = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) u |= static_cast<U>(b[i]) << (8 * i);
  return std::bit_cast<T>(u);
}

std::vector<std::int32_t> encode_config(const ModelConfig& c) {
  std::vector<std::int32_t> f = {c.adfe.levels, c.adfe.kernel, c.adfe.regions, c.adfe.generator_hidden,
                                 c.adfe.pool_grid, c.adfe.embed_dim};
  f.insert(f.end(), c.adfe.channels.begin(), c.adfe.channels.end());
  const auto& r = c.rmvit;
  f.insert(f.end(), {r.segment_len, r.mem_tokens, r.depth, r.heads, r.dim, r.mlp_hidden, r.out_dim,
                     r.position_encoding ? 1 : 0, c.head_hidden});
  return f;
}

}  // namespace

void AdfeConfig::validate() const {
  require(levels >= 1, "ADFE needs at least one level");
  require(kernel >= 1 && kernel % 2 == 1, "ADFE kernel must be odd");
  require(regions >= 1, "ADFE needs at least one region");
  require(static_cast<int>(channels.size()) == levels, "one channel width per ADFE level");
  for (const int c : channels) require(c >= 1, "ADFE channel widths must be positive");
  require(generator_hidden >= 1 && pool_grid >= 1 && embed_dim >= 1, "ADFE widths must be positive");
}

void RmvitConfig::validate() const {
  require(segment_len >= 1, "segment length must be >= 1");
  require(mem_tokens >= 0 && depth >= 0, "memory tokens and depth must be non-negative");
  require(heads >= 1 && dim >= 1 && dim % heads == 0, "transformer width must be divisible by heads");
  require(mlp_hidden >= 1 && out_dim >= 1, "transformer widths must be positive");
}

void ModelConfig::validate() const {
  adfe.validate();
  rmvit.validate();
  require(head_hidden >= 1, "head hidden width must be positive");
}

ModelConfig full_scale_config() {
  ModelConfig c;
  c.adfe.levels = 6;
  c.adfe.kernel = 3;
  c.adfe.regions = 4;
  c.adfe.channels = {8, 16, 32, 64, 128, 256};
  c.adfe.generator_hidden = 16;
  c.adfe.pool_grid = 2;
  c.adfe.embed_dim = 2048;
  c.rmvit = {8, 4, 4, 8, 256, 1024, 128, true};
  c.head_hidden = 64;
  return c;
}

std::vector<LayoutEntry> build_layout(const ModelConfig& cfg) {
  cfg.validate();
  LayoutBuilder b;
  const auto& a = cfg.adfe;
  const auto kk = static_cast<std::size_t>(a.kernel) * a.kernel;
  std::size_t in_ch = 1;
  for (int l = 0; l < a.levels; ++l) {
    const std::string p = "adfe.level" + std::to_string(l);
    const auto out_ch = static_cast<std::size_t>(a.channels[static_cast<std::size_t>(l)]);
    const auto m = static_cast<std::size_t>(a.regions);
    const auto g = static_cast<std::size_t>(a.generator_hidden);
    b.linear(p + ".guide", m, in_ch * kk);
    b.linear(p + ".generator.fc1", g, in_ch);
    b.linear(p + ".generator.fc2", m * out_ch * in_ch * kk, g);
    b.add(p + ".region.bias", out_ch, in_ch * kk);
    b.linear(p + ".down", out_ch, out_ch * kk);
    in_ch = out_ch;
  }
  const auto pooled = in_ch * static_cast<std::size_t>(a.pool_grid) * a.pool_grid;
  b.linear("adfe.project", static_cast<std::size_t>(a.embed_dim), pooled);

  const auto& r = cfg.rmvit;
  const auto d = static_cast<std::size_t>(r.dim);
  b.linear("rmvit.input", d, static_cast<std::size_t>(a.embed_dim));
  for (int i = 0; i < r.depth; ++i) {
    const std::string p = "rmvit.block" + std::to_string(i);
    b.norm(p + ".norm1", d);
    b.linear(p + ".attn.qkv", 3 * d, d);
    b.linear(p + ".attn.out", d, d);
    b.norm(p + ".norm2", d);
    b.linear(p + ".mlp.fc1", static_cast<std::size_t>(r.mlp_hidden), d);
    b.linear(p + ".mlp.fc2", d, static_cast<std::size_t>(r.mlp_hidden));
  }
  b.norm("rmvit.final_norm", d);
  b.linear("rmvit.readout.fc1", d, d);
  b.linear("rmvit.readout.fc2", static_cast<std::size_t>(r.out_dim), d);

  for (const auto k : synth::kAllArtifacts) {
    const std::string p = "head." + std::string(synth::name(k));
    b.linear(p + ".fc1", static_cast<std::size_t>(cfg.head_hidden), static_cast<std::size_t>(r.out_dim));
    b.linear(p + ".fc2", 1, static_cast<std::size_t>(cfg.head_hidden));
  }
  return b.take();
}

std::size_t layout_size(const std::vector<LayoutEntry>& layout) noexcept {
  std::size_t n = 0;
  for (const auto& e : layout) n += e.count;
  return n;
}

ModelParams::ModelParams(ModelConfig cfg, std::uint64_t init_seed, std::vector<float> values)
    : cfg_(std::move(cfg)), seed_(init_seed), values_(std::move(values)), layout_(build_layout(cfg_)) {
  check_layout();
}

void ModelParams::check_layout() const {
  std::size_t expect = 0;
  for (const auto& e : layout_) {
    if (e.offset != expect) throw Error(ErrorKind::Layout, "layout entry '" + e.name + "' is not contiguous");
    expect += e.count;
  }
  if (values_.size() != expect) {
    throw Error(ErrorKind::Layout, "parameter count " + std::to_string(values_.size()) + " does not match layout size " +
                                       std::to_string(expect));
  }
}

std::span<const float> ModelParams::tensor(std::string_view name) const {
  for (const auto& e : layout_) {
    if (e.name == name) return std::span<const float>(values_).subspan(e.offset, e.count);
  }
  throw Error(ErrorKind::Layout, "no parameter named '" + std::string(name) + "'");
}

std::span<float> ModelParams::mutable_tensor(std::string_view name) {
  for (const auto& e : layout_) {
    if (e.name == name) return std::span<float>(values_).subspan(e.offset, e.count);
  }
  throw Error(ErrorKind::Layout, "no parameter named '" + std::string(name) + "'");
}

ModelParams init_params(std::uint64_t seed, const ModelConfig& cfg) {
  const auto layout = build_layout(cfg);
  std::vector<float> values(layout_size(layout));
  for (const auto& e : layout) {
    auto* dst = values.data() + e.offset;
    if (e.fan_in == 0) {
      std::fill_n(dst, e.count, e.is_norm_scale ? 1.0f : 0.0f);
      continue;
    }
    const auto bound = static_cast<float>(1.0 / std::sqrt(static_cast<double>(e.fan_in)));
    CounterRng rng(derive_seed(seed, e.name));
    for (std::size_t i = 0; i < e.count; ++i) dst[i] = rng.uniform_f32(-bound, bound);
  }
  return ModelParams(cfg, seed, std::move(values));
}

void save_params(const ModelParams& p, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  const auto fields = encode_config(p.config());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(fields.size()));
  for (const auto f : fields) put<std::int32_t>(out, f);
  put<std::uint64_t>(out, p.init_seed());
  put<std::uint64_t>(out, p.values().size());
  for (const float v : p.values()) put<float>(out, v);
  if (!out) throw Error(ErrorKind::Io, "params write failed");
}

void save_params(const ModelParams& p, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write params '" + path.string() + "'");
  save_params(p, out);
}

ModelParams load_params(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != static_cast<std::streamsize>(magic.size()) || magic != kMagic) {
    throw Error(ErrorKind::Layout, "not a params file (bad magic)");
  }
  if (const auto v = get<std::uint32_t>(in); v != kVersion) {
    throw Error(ErrorKind::Layout, "unsupported params version " + std::to_string(v));
  }
  const auto nfields = get<std::uint32_t>(in);
  if (nfields < 15 || nfields > 1024) throw Error(ErrorKind::Layout, "implausible config field count");
  std::vector<std::int32_t> f(nfields);
  for (auto& x : f) x = get<std::int32_t>(in);

  ModelConfig c;
  c.adfe.levels = f[0];
  c.adfe.kernel = f[1];
  c.adfe.regions = f[2];
  c.adfe.generator_hidden = f[3];
  c.adfe.pool_grid = f[4];
  c.adfe.embed_dim = f[5];
  if (c.adfe.levels < 1 || nfields != static_cast<std::uint32_t>(6 + c.adfe.levels + 9)) {
    throw Error(ErrorKind::Layout, "config field count disagrees with level count");
  }
  c.adfe.channels.assign(f.begin() + 6, f.begin() + 6 + c.adfe.levels);
  const auto* r = f.data() + 6 + c.adfe.levels;
  c.rmvit = {r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7] != 0};
  c.head_hidden = r[8];
  try {
    c.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Layout, e.what());
  }

  const auto seed = get<std::uint64_t>(in);
  const auto count = get<std::uint64_t>(in);
  const auto expect = layout_size(build_layout(c));
  if (count != expect) {
    throw Error(ErrorKind::Layout, "params file holds " + std::to_string(count) + " values, layout needs " +
                                       std::to_string(expect));
  }
  std::vector<float> values(count);
  for (auto& v : values) v = get<float>(in);
  return ModelParams(c, seed, std::move(values));
}

ModelParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open params '" + path.string() + "'");
  return load_params(in);
}

}  // namespace vidart::model
