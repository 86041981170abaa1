#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lrru/tensor.hpp"

namespace lrru {

/// Single-channel depth image in millimetres. Invalid pixels carry depth 0.
struct DepthMap {
  int height = 0;
  int width = 0;
  std::vector<double> depth;
  std::vector<std::uint8_t> valid;

  DepthMap() = default;
  DepthMap(int h, int w);

  std::size_t index(int y, int x) const { return static_cast<std::size_t>(y) * width + x; }
  std::size_t size() const { return depth.size(); }
  std::size_t valid_count() const;
  bool fully_valid() const { return valid_count() == size(); }

  void set(int y, int x, double d);
  void clear(int y, int x);

  bool operator==(const DepthMap&) const = default;
};

/// Interleaved RGB image with channels in [0, 1].
struct RgbImage {
  int height = 0;
  int width = 0;
  std::vector<double> data;  // (y, x, channel)

  RgbImage() = default;
  RgbImage(int h, int w) : height(h), width(w), data(static_cast<std::size_t>(h) * w * 3, 0.0) {}

  double& at(int y, int x, int c) { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
  double at(int y, int x, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  bool operator==(const RgbImage&) const = default;
};

/// One training/evaluation example. All members share extents.
struct DepthSample {
  std::optional<RgbImage> rgb;  // absent in depth-only data
  DepthMap sparse;
  DepthMap gt;
};

DepthMap flip_horizontal(const DepthMap& map);
RgbImage flip_horizontal(const RgbImage& image);

/// (N,1,H,W) tensor of depth values multiplied by `scale`; invalid pixels are 0.
Tensor depth_batch_tensor(const std::vector<const DepthMap*>& maps, double scale = 1.0);
/// (N,1,H,W) tensor holding 1 on valid pixels.
Tensor mask_batch_tensor(const std::vector<const DepthMap*>& maps);
/// (N,3,H,W) tensor.
Tensor rgb_batch_tensor(const std::vector<const RgbImage*>& images);

/// Converts sample `n` of a (N,1,H,W) millimetre tensor to a fully valid map.
DepthMap depth_from_tensor(const Tensor& t, std::int64_t n = 0);

/// Like depth_from_tensor, with values clamped to [min_mm, max_mm] so every
/// pixel is a usable depth.
DepthMap prediction_from_tensor(const Tensor& t, double min_mm, double max_mm, std::int64_t n = 0);

}  // namespace lrru
