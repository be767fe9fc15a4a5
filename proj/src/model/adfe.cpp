// Pyramid of region-aware dynamic convolutions. Each level:
//   guide conv -> argmax region mask -> per-region filters from the generator
//   -> masked region conv (ReLU) -> stride-2 conv (ReLU).
// The last level is average-pooled to a fixed grid and projected to embed_dim.

#include <algorithm>
#include <numeric>
#include <string>

#include "layers.hpp"
#include "vidart/error.hpp"
#include "vidart/kernels.hpp"
#include "vidart/model.hpp"

namespace vidart::model {

namespace {

// k x k neighbourhood of every channel at (y, x) with zero padding, laid out
// [channel][ky][kx] to match weight rows.
void gather_patch(const FeatureMap& in, int y, int x, int k, std::vector<float>& patch) {
  const int r = k / 2;
  std::size_t i = 0;
  for (int c = 0; c < in.channels; ++c) {
    for (int dy = -r; dy <= r; ++dy) {
      const int yy = y + dy;
      for (int dx = -r; dx <= r; ++dx) {
        const int xx = x + dx;
        patch[i++] = (yy < 0 || yy >= in.height || xx < 0 || xx >= in.width) ? 0.0f : in.at(c, yy, xx);
      }
    }
  }
}

FeatureMap make_map(int c, int h, int w) {
  FeatureMap m;
  m.channels = c;
  m.height = h;
  m.width = w;
  m.data.assign(static_cast<std::size_t>(c) * h * w, 0.0f);
  return m;
}

float& cell(FeatureMap& m, int c, int y, int x) {
  return m.data[(static_cast<std::size_t>(c) * m.height + y) * m.width + x];
}

// Convolution with a fixed weight bank, output at input positions sampled
// every `stride` pixels.
FeatureMap conv(const FeatureMap& in, std::span<const float> w, std::span<const float> b, int k, int stride,
                bool relu) {
  const int out_c = static_cast<int>(b.size());
  const int oh = (in.height + stride - 1) / stride;
  const int ow = (in.width + stride - 1) / stride;
  const auto plen = static_cast<std::size_t>(in.channels) * k * k;
  FeatureMap out = make_map(out_c, oh, ow);
  std::vector<float> patch(plen);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      gather_patch(in, y * stride, x * stride, k, patch);
      for (int c = 0; c < out_c; ++c) {
        float v = kernels::dot(w.subspan(static_cast<std::size_t>(c) * plen, plen), patch) + b[static_cast<std::size_t>(c)];
        cell(out, c, y, x) = relu ? std::max(v, 0.0f) : v;
      }
    }
  }
  return out;
}

std::vector<float> channel_means(const FeatureMap& m) {
  std::vector<float> g(static_cast<std::size_t>(m.channels));
  const std::size_t plane = static_cast<std::size_t>(m.height) * m.width;
  for (int c = 0; c < m.channels; ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < plane; ++i) s += m.data[static_cast<std::size_t>(c) * plane + i];
    g[static_cast<std::size_t>(c)] = static_cast<float>(s / static_cast<double>(plane));
  }
  return g;
}

// Average over a grid x grid partition; cell bounds floor(i*H/g) .. floor((i+1)*H/g).
std::vector<float> adaptive_pool(const FeatureMap& m, int grid) {
  std::vector<float> out;
  out.reserve(static_cast<std::size_t>(m.channels) * grid * grid);
  for (int c = 0; c < m.channels; ++c) {
    for (int gy = 0; gy < grid; ++gy) {
      const int y0 = gy * m.height / grid, y1 = (gy + 1) * m.height / grid;
      for (int gx = 0; gx < grid; ++gx) {
        const int x0 = gx * m.width / grid, x1 = (gx + 1) * m.width / grid;
        double s = 0.0;
        for (int y = y0; y < y1; ++y) {
          for (int x = x0; x < x1; ++x) s += m.at(c, y, x);
        }
        out.push_back(static_cast<float>(s / static_cast<double>((y1 - y0) * (x1 - x0))));
      }
    }
  }
  return out;
}

}  // namespace

FrameEmbedding adfe_forward(const io::Frame& frame, const ModelParams& params, AdfeTrace* trace) {
  const auto& cfg = params.config().adfe;
  const int k = cfg.kernel;
  const int m = cfg.regions;

  // Every level halves the geometry (rounding up); the pooled grid must fit.
  int fh = frame.height, fw = frame.width;
  for (int l = 0; l < cfg.levels; ++l) {
    fh = (fh + 1) / 2;
    fw = (fw + 1) / 2;
  }
  if (fh < cfg.pool_grid || fw < cfg.pool_grid) {
    throw Error(ErrorKind::Shape, "frame " + std::to_string(frame.width) + "x" + std::to_string(frame.height) +
                                      " too small for " + std::to_string(cfg.levels) + " levels and a " +
                                      std::to_string(cfg.pool_grid) + "x" + std::to_string(cfg.pool_grid) + " pool");
  }

  FeatureMap x = make_map(1, frame.height, frame.width);
  for (std::size_t i = 0; i < x.data.size(); ++i) x.data[i] = static_cast<float>(frame.luma[i]) / 255.0f;

  if (trace) trace->levels.clear();
  for (int l = 0; l < cfg.levels; ++l) {
    const std::string p = "adfe.level" + std::to_string(l);
    const int out_c = cfg.channels[static_cast<std::size_t>(l)];
    const auto plen = static_cast<std::size_t>(x.channels) * k * k;

    FeatureMap guide = conv(x, params.tensor(p + ".guide.weight"), params.tensor(p + ".guide.bias"), k, 1, false);

    std::vector<int> mask(static_cast<std::size_t>(x.height) * x.width);
    for (int y = 0; y < x.height; ++y) {
      for (int xx = 0; xx < x.width; ++xx) {
        int best = 0;
        for (int r = 1; r < m; ++r) {
          if (guide.at(r, y, xx) > guide.at(best, y, xx)) best = r;
        }
        mask[static_cast<std::size_t>(y) * x.width + xx] = best;
      }
    }

    // Filter generator: global average pool -> FC -> ReLU -> FC.
    auto hidden = detail::linear(channel_means(x), params.tensor(p + ".generator.fc1.weight"),
                                 params.tensor(p + ".generator.fc1.bias"));
    detail::relu_inplace(hidden);
    const auto filters = detail::linear(hidden, params.tensor(p + ".generator.fc2.weight"),
                                        params.tensor(p + ".generator.fc2.bias"));
    const auto region_bias = params.tensor(p + ".region.bias");
    const std::span<const float> bank(filters);

    FeatureMap region = make_map(out_c, x.height, x.width);
    std::vector<float> patch(plen);
    for (int y = 0; y < x.height; ++y) {
      for (int xx = 0; xx < x.width; ++xx) {
        gather_patch(x, y, xx, k, patch);
        const auto r = static_cast<std::size_t>(mask[static_cast<std::size_t>(y) * x.width + xx]);
        for (int c = 0; c < out_c; ++c) {
          const auto row = (r * static_cast<std::size_t>(out_c) + static_cast<std::size_t>(c)) * plen;
          const float v = kernels::dot(bank.subspan(row, plen), patch) + region_bias[static_cast<std::size_t>(c)];
          cell(region, c, y, xx) = std::max(v, 0.0f);
        }
      }
    }

    FeatureMap down = conv(region, params.tensor(p + ".down.weight"), params.tensor(p + ".down.bias"), k, 2, true);
    if (trace) trace->levels.push_back({std::move(mask), std::move(guide), region, down});
    x = std::move(down);
  }

  const auto pooled = adaptive_pool(x, cfg.pool_grid);
  return detail::linear(pooled, params.tensor("adfe.project.weight"), params.tensor("adfe.project.bias"));
}

}  // namespace vidart::model
