#pragma once

#include <span>
#include <vector>

namespace vidart::model::detail {

// y = W x + b, W row-major [out][in].
std::vector<float> linear(std::span<const float> x, std::span<const float> w, std::span<const float> b);
void layer_norm(std::span<float> x, std::span<const float> scale, std::span<const float> shift);
float gelu(float x) noexcept;
void gelu_inplace(std::span<float> x) noexcept;
void relu_inplace(std::span<float> x) noexcept;
void softmax_inplace(std::span<float> x) noexcept;

}  // namespace vidart::model::detail
