#pragma once

#include <cstdint>
#include <vector>

#include "lrru/depth_map.hpp"

namespace lrru {

/// Binary structuring element with odd extents, centred on its middle cell.
struct KernelMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> on;
  bool full = false;

  static KernelMask full_square(int size);
  /// Cells with |dy| + |dx| <= size / 2.
  static KernelMask diamond(int size);
};

// Grayscale morphology restricted to valid pixels: invalid pixels never
// contribute, and a pixel is valid in the output when any valid pixel lies
// under the kernel.
DepthMap dilate(const DepthMap& map, const KernelMask& kernel);
DepthMap erode(const DepthMap& map, const KernelMask& kernel);
DepthMap close(const DepthMap& map, const KernelMask& kernel);
/// Lower median of the valid pixels under a size x size window.
DepthMap median_filter(const DepthMap& map, int size);

/// Densifies a sparse map with a fixed morphological pipeline. Near depths
/// are propagated over far ones, every originally valid pixel keeps its exact
/// value and the output is fully valid.
DepthMap prefill(const DepthMap& sparse, double max_depth_mm);

}  // namespace lrru
