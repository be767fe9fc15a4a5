#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>
#include <sstream>

#include "support.hpp"
#include "vidart/model.hpp"
#include "vidart/synthetic.hpp"

using namespace vidart;
using namespace vidart::model;

namespace {

ModelConfig toy_config(bool positions = true) {
  ModelConfig c;
  c.rmvit.position_encoding = positions;
  return c;
}

std::vector<FrameEmbedding> random_embeddings(CounterRng& rng, int n, int dim) {
  std::vector<FrameEmbedding> e(static_cast<std::size_t>(n), FrameEmbedding(static_cast<std::size_t>(dim)));
  for (auto& v : e) {
    for (auto& x : v) x = rng.uniform_f32(-1.0f, 1.0f);
  }
  return e;
}

// Single ViT pass over [zero memory | position-coded frame tokens].
SeqRepresentation one_pass(const std::vector<FrameEmbedding>& emb, const ModelParams& p) {
  const auto& r = p.config().rmvit;
  std::vector<std::vector<float>> tokens(static_cast<std::size_t>(r.mem_tokens), std::vector<float>(r.dim, 0.0f));
  for (std::size_t t = 0; t < emb.size(); ++t) {
    auto tok = embed_token(emb[t], p);
    if (r.position_encoding) {
      const auto pe = position_code(static_cast<int>(t), r.dim);
      for (int c = 0; c < r.dim; ++c) tok[c] += pe[c];
    }
    tokens.push_back(tok);
  }
  return sequence_head(vit_encode(tokens, p), p);
}

}  // namespace

TEST_CASE("layout covers every parameter once") {
  for (const auto& cfg : {toy_config(), full_scale_config()}) {
    const auto layout = build_layout(cfg);
    std::set<std::string> names;
    std::size_t expect_offset = 0;
    for (const auto& e : layout) {
      CHECK(names.insert(e.name).second);
      CHECK(e.offset == expect_offset);
      expect_offset += e.count;
    }
    CHECK(layout_size(layout) == expect_offset);
  }
}

TEST_CASE("layout size from config arithmetic") {
  const ModelConfig c = toy_config();
  const auto& a = c.adfe;
  const auto& r = c.rmvit;
  auto lin = [](long long out, long long in) { return out * in + out; };
  long long n = 0;
  long long in_ch = 1;
  for (int l = 0; l < a.levels; ++l) {
    const long long oc = a.channels[l], kk = a.kernel * a.kernel;
    n += lin(a.regions, in_ch * kk);
    n += lin(a.generator_hidden, in_ch);
    n += lin(a.regions * oc * in_ch * kk, a.generator_hidden);
    n += oc;
    n += lin(oc, oc * kk);
    in_ch = oc;
  }
  n += lin(a.embed_dim, in_ch * a.pool_grid * a.pool_grid);
  n += lin(r.dim, a.embed_dim);
  n += r.depth * (2 * r.dim + lin(3 * r.dim, r.dim) + lin(r.dim, r.dim) + 2 * r.dim + lin(r.mlp_hidden, r.dim) +
                  lin(r.dim, r.mlp_hidden));
  n += 2 * r.dim + lin(r.dim, r.dim) + lin(r.out_dim, r.dim);
  n += 10 * (lin(c.head_hidden, r.out_dim) + lin(1, c.head_hidden));
  CHECK(static_cast<long long>(layout_size(build_layout(c))) == n);
}

TEST_CASE("init is seed-deterministic and bounded by fan-in") {
  const auto a = init_params(5, toy_config());
  const auto b = init_params(5, toy_config());
  const auto c = init_params(6, toy_config());
  CHECK(std::memcmp(a.values().data(), b.values().data(), a.values().size_bytes()) == 0);
  CHECK_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
  for (const auto& e : a.layout()) {
    const auto t = a.tensor(e.name);
    if (e.fan_in == 0) {
      for (float v : t) CHECK(v == (e.is_norm_scale ? 1.0f : 0.0f));
    } else {
      const float bound = 1.0f / std::sqrt(static_cast<float>(e.fan_in));
      for (float v : t) CHECK(std::abs(v) <= bound * 1.0001f);
    }
  }
  CHECK_THROWS_KIND(a.tensor("nope"), ErrorKind::Layout);
}

TEST_CASE("params file round trip and corruption") {
  const auto p = init_params(8, toy_config());
  std::stringstream ss;
  save_params(p, ss);
  const std::string bytes = ss.str();
  const auto q = load_params(ss);
  CHECK(q.config() == p.config());
  CHECK(q.init_seed() == 8);
  CHECK(std::equal(q.values().begin(), q.values().end(), p.values().begin(), p.values().end()));

  std::stringstream bad_magic("NOTPARAM" + bytes.substr(8));
  CHECK_THROWS_KIND(load_params(bad_magic), ErrorKind::Layout);
  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_KIND(load_params(truncated), ErrorKind::Layout);
  std::vector<float> short_values(p.values().begin(), p.values().end() - 1);
  CHECK_THROWS_KIND(ModelParams(p.config(), 8, short_values), ErrorKind::Layout);
}

TEST_CASE("config validation") {
  ModelConfig c = toy_config();
  c.adfe.kernel = 4;
  CHECK_THROWS_KIND(c.validate(), ErrorKind::Parameter);
  c = toy_config();
  c.rmvit.heads = 3;
  CHECK_THROWS_KIND(c.validate(), ErrorKind::Parameter);
  c = toy_config();
  c.adfe.channels = {8};
  CHECK_THROWS_KIND(c.validate(), ErrorKind::Parameter);
  const auto full = full_scale_config();
  CHECK(full.adfe.levels == 6);
  CHECK(full.adfe.kernel == 3);
  CHECK(full.adfe.embed_dim == 2048);
  CHECK(full.rmvit.segment_len == 8);
  CHECK(full.rmvit.out_dim == 128);
}

TEST_CASE("ADFE shapes and guided mask") {
  const auto p = init_params(3, toy_config());
  const auto clip = io::synthetic_clip(16, 16, 1, 2);
  AdfeTrace trace;
  const auto h = adfe_forward(clip.frames[0], p, &trace);
  CHECK(h.size() == 64);
  REQUIRE(trace.levels.size() == 2);
  CHECK(trace.levels[0].mask.size() == 256);
  CHECK(trace.levels[0].output.height == 8);
  CHECK(trace.levels[1].output.height == 4);
  for (const auto& lvl : trace.levels) {
    for (std::size_t i = 0; i < lvl.mask.size(); ++i) {
      const int r = lvl.mask[i];
      REQUIRE(r >= 0);
      REQUIRE(r < 4);
      // the selected region scores at least as high as every other, and is the first such
      const int y = static_cast<int>(i) / lvl.guide.width, x = static_cast<int>(i) % lvl.guide.width;
      for (int j = 0; j < 4; ++j) {
        CHECK(lvl.guide.at(j, y, x) <= lvl.guide.at(r, y, x));
        if (j < r) CHECK(lvl.guide.at(j, y, x) < lvl.guide.at(r, y, x));
      }
    }
  }
  CHECK_THROWS_KIND(adfe_forward(io::Frame(8, 8), p), ErrorKind::Shape);
  for (int size : {16, 24, 40, 64}) CHECK(adfe_forward(io::synthetic_clip(size, size + 8, 1, 1).frames[0], p).size() == 64);
}

TEST_CASE("constant frame gives a constant interior mask and output") {
  const auto p = init_params(4, toy_config());
  AdfeTrace trace;
  adfe_forward(io::Frame(32, 32, 140), p, &trace);
  const auto& l0 = trace.levels[0];
  const int w = l0.guide.width, h = l0.guide.height;
  const int ref = l0.mask[static_cast<std::size_t>(h / 2) * w + w / 2];
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      CHECK(l0.mask[static_cast<std::size_t>(y) * w + x] == ref);
      for (int c = 0; c < l0.region_out.channels; ++c) CHECK(l0.region_out.at(c, y, x) == l0.region_out.at(c, h / 2, w / 2));
    }
  }
}

TEST_CASE("RMViT: one segment equals a single pass with zero memory") {
  const auto p = init_params(9, toy_config());
  CounterRng rng(1);
  const auto emb = random_embeddings(rng, 8, 64);
  const auto v = rmvit_forward(emb, p);
  const auto w = one_pass(emb, p);
  REQUIRE(v.size() == 128);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(v[i] - w[i]) <= 1e-6f);
}

TEST_CASE("RMViT: permutation inside a segment matters only through positions") {
  CounterRng rng(2);
  const auto emb = random_embeddings(rng, 8, 64);
  auto shuffled = emb;
  std::reverse(shuffled.begin(), shuffled.end());
  const auto plain = init_params(10, toy_config(false));
  const auto a = rmvit_forward(emb, plain), b = rmvit_forward(shuffled, plain);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-5f);
  const auto pos = init_params(10, toy_config(true));
  const auto c = rmvit_forward(emb, pos), d = rmvit_forward(shuffled, pos);
  double diff = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) diff = std::max(diff, static_cast<double>(std::abs(c[i] - d[i])));
  CHECK(diff > 1e-4);
}

TEST_CASE("RMViT: recurrence differs from concatenation") {
  auto cfg = toy_config();
  cfg.rmvit.position_encoding = false;
  const auto p = init_params(11, cfg);
  CounterRng rng(3);
  const auto emb = random_embeddings(rng, 16, 64);
  const auto rec = rmvit_forward(emb, p);
  const auto cat = one_pass(emb, p);
  double diff = 0.0;
  for (std::size_t i = 0; i < rec.size(); ++i) diff = std::max(diff, static_cast<double>(std::abs(rec[i] - cat[i])));
  CHECK(diff > 1e-4);
  CHECK(rmvit_forward(random_embeddings(rng, 13, 64), p).size() == 128);
}

TEST_CASE("heads: threshold and zero weights") {
  CHECK(decide(0.7));
  CHECK_FALSE(decide(0.5));
  CHECK_FALSE(decide(0.3));
  auto p = init_params(12, toy_config());
  for (auto& v : p.mutable_values()) v = 0.0f;
  const auto out = predict_heads(SeqRepresentation(128, 0.3f), p);
  for (const auto& h : out) {
    CHECK(h.probability == 0.5);
    CHECK_FALSE(h.present);
  }
  CHECK_THROWS_KIND(predict_heads(SeqRepresentation(7), p), ErrorKind::Shape);
}

TEST_CASE("full detector: range, determinism, worker independence") {
  const auto p = init_params(13, toy_config());
  const auto clip = io::synthetic_clip(16, 16, 8, 4);
  const auto a = detector_forward(clip, p, 1);
  const auto b = detector_forward(clip, p, 1);
  const auto c = detector_forward(clip, p, 4);
  REQUIRE(a.size() == 10);
  for (std::size_t j = 0; j < 10; ++j) {
    CHECK(a[j].probability > 0.0);
    CHECK(a[j].probability < 1.0);
    CHECK(a[j].present == (a[j].probability > 0.5));
    CHECK(std::memcmp(&a[j].probability, &b[j].probability, sizeof(double)) == 0);
    CHECK(std::memcmp(&a[j].probability, &c[j].probability, sizeof(double)) == 0);
  }

  io::Clip same;
  for (int t = 0; t < 4; ++t) same.frames.push_back(clip.frames[0]);
  std::vector<FrameEmbedding> e;
  for (const auto& f : same.frames) e.push_back(adfe_forward(f, p));
  for (const auto& x : e) CHECK(x == e.front());
}
