#pragma once

#include <cstdint>

#include "lrru/tensor.hpp"

namespace lrru::ops {

/// 2-D cross-correlation. weight is (outC, inC, kh, kw) and bias is (1, outC, 1, 1).
Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias, int stride,
              int padding);

/// Samples a single-channel map at M fractional (y, x) positions per pixel.
///
/// positions is (N, 2M, H', W') with channel 2m holding y and 2m+1 holding x,
/// both absolute pixel coordinates whose origin is the centre of pixel (0, 0).
/// Coordinates are clamped to [0, H-1] x [0, W-1] before interpolation.
/// Returns (N, M, H', W').
Tensor grid_sample_bilinear(const Tensor& input, const Tensor& positions);

Tensor sigmoid(const Tensor& x);
Tensor leaky_relu(const Tensor& x, double slope);

/// Subtracts the per-pixel channel mean, so every pixel's channels sum to zero.
Tensor mean_subtract_channels(const Tensor& x);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double factor);
Tensor abs(const Tensor& x);
Tensor square(const Tensor& x);

/// Sum of all elements as a (1,1,1,1) tensor.
Tensor sum(const Tensor& x);
/// Per-pixel sum over channels: (N,C,H,W) -> (N,1,H,W).
Tensor sum_channels(const Tensor& x);

Tensor concat_channels(const Tensor& a, const Tensor& b);
Tensor slice_channels(const Tensor& x, std::int64_t begin, std::int64_t count);
/// Inserts `count` all-zero channels before channel index `at`.
Tensor insert_zero_channels(const Tensor& x, std::int64_t at, std::int64_t count);

/// Bilinear upsampling by an integer factor with half-pixel centres
/// (corners not aligned).
Tensor upsample_bilinear(const Tensor& x, int factor);
/// Keeps the top-left h x w window.
Tensor crop_spatial(const Tensor& x, std::int64_t h, std::int64_t w);
/// Mirrors the width axis.
Tensor flip_horizontal(const Tensor& x);

}  // namespace lrru::ops
