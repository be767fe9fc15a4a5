#include <algorithm>
#include <cmath>
#include <string>

#include "layers.hpp"
#include "vidart/error.hpp"
#include "vidart/kernels.hpp"
#include "vidart/model.hpp"

namespace vidart::model {

namespace {

using Tokens = std::vector<std::vector<float>>;

Tokens attention(const Tokens& x, const ModelParams& params, const std::string& p, int heads) {
  const std::size_t n = x.size();
  const std::size_t d = x.front().size();
  const std::size_t dh = d / static_cast<std::size_t>(heads);
  const auto wqkv = params.tensor(p + ".qkv.weight");
  const auto bqkv = params.tensor(p + ".qkv.bias");

  Tokens q(n), k(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto qkv = detail::linear(x[i], wqkv, bqkv);
    q[i].assign(qkv.begin(), qkv.begin() + static_cast<std::ptrdiff_t>(d));
    k[i].assign(qkv.begin() + static_cast<std::ptrdiff_t>(d), qkv.begin() + static_cast<std::ptrdiff_t>(2 * d));
    v[i].assign(qkv.begin() + static_cast<std::ptrdiff_t>(2 * d), qkv.end());
  }

  const float scale = static_cast<float>(1.0 / std::sqrt(static_cast<double>(dh)));
  Tokens mixed(n, std::vector<float>(d, 0.0f));
  std::vector<float> w(n);
  for (int h = 0; h < heads; ++h) {
    const std::size_t off = static_cast<std::size_t>(h) * dh;
    for (std::size_t i = 0; i < n; ++i) {
      const std::span<const float> qi(q[i].data() + off, dh);
      for (std::size_t j = 0; j < n; ++j) w[j] = kernels::dot(qi, {k[j].data() + off, dh}) * scale;
      detail::softmax_inplace(w);
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t c = 0; c < dh; ++c) mixed[i][off + c] += w[j] * v[j][off + c];
      }
    }
  }

  Tokens out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = detail::linear(mixed[i], params.tensor(p + ".out.weight"), params.tensor(p + ".out.bias"));
  }
  return out;
}

}  // namespace

std::vector<float> position_code(int position, int dim) {
  std::vector<float> pe(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    const double freq = std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / dim);
    const double a = position * freq;
    pe[static_cast<std::size_t>(i)] = static_cast<float>(i % 2 == 0 ? std::sin(a) : std::cos(a));
  }
  return pe;
}

std::vector<float> embed_token(const FrameEmbedding& h, const ModelParams& params) {
  if (static_cast<int>(h.size()) != params.config().adfe.embed_dim) {
    throw Error(ErrorKind::Shape, "frame embedding has " + std::to_string(h.size()) + " values, expected " +
                                      std::to_string(params.config().adfe.embed_dim));
  }
  return detail::linear(h, params.tensor("rmvit.input.weight"), params.tensor("rmvit.input.bias"));
}

std::vector<std::vector<float>> vit_encode(const std::vector<std::vector<float>>& tokens, const ModelParams& params) {
  const auto& cfg = params.config().rmvit;
  if (tokens.empty()) throw Error(ErrorKind::Shape, "transformer needs at least one token");
  Tokens x = tokens;
  for (int b = 0; b < cfg.depth; ++b) {
    const std::string p = "rmvit.block" + std::to_string(b);

    Tokens normed = x;
    for (auto& t : normed) detail::layer_norm(t, params.tensor(p + ".norm1.scale"), params.tensor(p + ".norm1.shift"));
    const Tokens att = attention(normed, params, p + ".attn", cfg.heads);
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t c = 0; c < x[i].size(); ++c) x[i][c] += att[i][c];
    }

    for (auto& t : x) {
      std::vector<float> u = t;
      detail::layer_norm(u, params.tensor(p + ".norm2.scale"), params.tensor(p + ".norm2.shift"));
      auto hidden = detail::linear(u, params.tensor(p + ".mlp.fc1.weight"), params.tensor(p + ".mlp.fc1.bias"));
      detail::gelu_inplace(hidden);
      const auto y = detail::linear(hidden, params.tensor(p + ".mlp.fc2.weight"), params.tensor(p + ".mlp.fc2.bias"));
      for (std::size_t c = 0; c < t.size(); ++c) t[c] += y[c];
    }
  }
  for (auto& t : x) detail::layer_norm(t, params.tensor("rmvit.final_norm.scale"), params.tensor("rmvit.final_norm.shift"));
  return x;
}

SeqRepresentation sequence_head(const std::vector<std::vector<float>>& tokens, const ModelParams& params) {
  if (tokens.empty()) throw Error(ErrorKind::Shape, "nothing to average");
  const std::size_t d = tokens.front().size();
  std::vector<double> acc(d, 0.0);
  for (const auto& t : tokens) {
    for (std::size_t c = 0; c < d; ++c) acc[c] += t[c];
  }
  std::vector<float> mean(d);
  for (std::size_t c = 0; c < d; ++c) mean[c] = static_cast<float>(acc[c] / static_cast<double>(tokens.size()));
  auto hidden = detail::linear(mean, params.tensor("rmvit.readout.fc1.weight"), params.tensor("rmvit.readout.fc1.bias"));
  detail::gelu_inplace(hidden);
  return detail::linear(hidden, params.tensor("rmvit.readout.fc2.weight"), params.tensor("rmvit.readout.fc2.bias"));
}

SeqRepresentation rmvit_forward(const std::vector<FrameEmbedding>& embeddings, const ModelParams& params) {
  const auto& cfg = params.config().rmvit;
  if (embeddings.empty()) throw Error(ErrorKind::Shape, "sequence needs at least one frame embedding");
  const auto d = static_cast<std::size_t>(cfg.dim);
  const auto n_mem = static_cast<std::size_t>(cfg.mem_tokens);

  Tokens memory(n_mem, std::vector<float>(d, 0.0f));
  Tokens processed;
  for (std::size_t start = 0; start < embeddings.size(); start += static_cast<std::size_t>(cfg.segment_len)) {
    const std::size_t end = std::min(embeddings.size(), start + static_cast<std::size_t>(cfg.segment_len));
    Tokens seq = memory;
    for (std::size_t t = start; t < end; ++t) {
      auto tok = embed_token(embeddings[t], params);
      if (cfg.position_encoding) {
        const auto pe = position_code(static_cast<int>(t - start), cfg.dim);
        for (std::size_t c = 0; c < d; ++c) tok[c] += pe[c];
      }
      seq.push_back(std::move(tok));
    }
    Tokens out = vit_encode(seq, params);
    memory.assign(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n_mem));
    processed.insert(processed.end(), out.begin() + static_cast<std::ptrdiff_t>(n_mem), out.end());
  }

  Tokens pool = memory;
  pool.insert(pool.end(), processed.begin(), processed.end());
  return sequence_head(pool, params);
}

}  // namespace vidart::model
