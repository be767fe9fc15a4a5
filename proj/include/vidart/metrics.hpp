#pragma once

#include <cstddef>

#include "vidart/frame_io.hpp"

// Severity measures used to check artifact strength.
namespace vidart::metrics {

double mean_luma(const io::Clip& clip);
std::size_t distinct_luma_values(const io::Clip& clip);
// Variance of the 4-neighbour Laplacian over interior luma samples.
double laplacian_variance(const io::Clip& clip);
// Sample standard deviation of (b - a) over all luma samples.
double residual_std(const io::Clip& a, const io::Clip& b);
double mean_abs_error(const io::Clip& a, const io::Clip& b);

}  // namespace vidart::metrics
