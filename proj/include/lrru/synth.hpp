#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lrru/depth_map.hpp"

namespace lrru {

/// A generated scene plus the region label of every pixel. Labels below
/// `first_occluder_label` belong to background planes.
struct SyntheticScene {
  DepthSample sample;
  std::vector<int> labels;
  int first_occluder_label = 0;
};

/// Deterministic piecewise-planar scene: 3-6 slanted background planes and
/// 1-3 nearer rectangular or elliptical occluders, with an RGB rendering whose
/// edges coincide with the region boundaries. Depths are quantised to the
/// 16-bit PNG grid. The returned sparse map is empty.
SyntheticScene synth_scene(std::uint64_t seed, int height, int width, double max_depth_mm);

/// Keeps n valid pixels chosen uniformly without replacement.
DepthMap sparsify_random(const DepthMap& gt, std::size_t n, std::uint64_t seed);

/// Keeps rows r with (r + j_r) mod keep_every == 0, j_r uniform in [0, jitter].
DepthMap sparsify_lines(const DepthMap& gt, int keep_every, int jitter, std::uint64_t seed);

/// Sparsification recipe: "random:N" or "lines:K".
struct Sparsity {
  enum class Mode { kRandom, kLines } mode = Mode::kRandom;
  std::size_t count = 500;
  int keep_every = 1;
  int jitter = 0;

  static Sparsity parse(const std::string& text);
  std::string str() const;
  DepthMap apply(const DepthMap& gt, std::uint64_t seed) const;
};

/// synth_scene followed by sparsification with a seed derived from `seed`.
DepthSample synth_sample(std::uint64_t seed, int height, int width, double max_depth_mm,
                         const Sparsity& sparsity);

}  // namespace lrru
