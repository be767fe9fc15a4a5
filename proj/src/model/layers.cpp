#include "layers.hpp"

#include <algorithm>
#include <cmath>

#include "vidart/error.hpp"
#include "vidart/kernels.hpp"

namespace vidart::model::detail {

std::vector<float> linear(std::span<const float> x, std::span<const float> w, std::span<const float> b) {
  const std::size_t out = b.size();
  if (out == 0 || w.size() != out * x.size()) throw Error(ErrorKind::Shape, "linear layer size mismatch");
  std::vector<float> y(out);
  for (std::size_t o = 0; o < out; ++o) y[o] = kernels::dot(w.subspan(o * x.size(), x.size()), x) + b[o];
  return y;
}

void layer_norm(std::span<float> x, std::span<const float> scale, std::span<const float> shift) {
  const auto n = static_cast<double>(x.size());
  double mean = 0.0;
  for (const float v : x) mean += v;
  mean /= n;
  double var = 0.0;
  for (const float v : x) var += (v - mean) * (v - mean);
  var /= n;
  const double inv = 1.0 / std::sqrt(var + 1e-5);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = static_cast<float>((x[i] - mean) * inv) * scale[i] + shift[i];
  }
}

float gelu(float x) noexcept {
  return static_cast<float>(0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))));
}

void gelu_inplace(std::span<float> x) noexcept {
  for (auto& v : x) v = gelu(v);
}

void relu_inplace(std::span<float> x) noexcept {
  for (auto& v : x) v = std::max(v, 0.0f);
}

void softmax_inplace(std::span<float> x) noexcept {
  const float m = *std::max_element(x.begin(), x.end());
  double total = 0.0;
  for (auto& v : x) {
    v = std::exp(v - m);
    total += v;
  }
  for (auto& v : x) v = static_cast<float>(v / total);
}

}  // namespace vidart::model::detail
