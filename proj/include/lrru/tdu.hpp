#pragma once

#include <string>
#include <vector>

#include "lrru/params.hpp"
#include "lrru/tensor.hpp"

namespace lrru {

/// Per-pixel spatially-variant kernel.
///
/// weights: (N, k*k, H, W), zero-sum over channels at every pixel.
/// offsets: (N, 2*k*k, H, W), channel 2j = dy and 2j+1 = dx of tap j relative
/// to its regular-grid position. Taps are row-major over the k x k grid and
/// the centre tap (index k*k/2) always has offset (0, 0).
struct KernelField {
  Tensor weights;
  Tensor offsets;
  int kernel_size = 3;
};

/// Parameters of one weight/offset prediction head pair.
struct TduHead {
  Tensor weight_w;
  Tensor weight_b;
  Tensor offset_w;
  Tensor offset_b;

  /// Head `iteration` of a parameter set created by init_model_params.
  static TduHead from_params(const ModelParams& params, int iteration);
};

/// Regular-grid displacement (dy, dx) of tap j.
std::pair<int, int> tap_displacement(int tap, int kernel_size);

KernelField predict_kernel(const Tensor& cross_feat, const Tensor& self_feat, const TduHead& head,
                           int kernel_size = 3);

/// target + sum_j weights_j * target(p + g_j + offset_j), with clamped bilinear sampling.
Tensor apply_update(const Tensor& target, const KernelField& kf);

/// Absolute sampling coordinates p + g_j + offset_j, laid out like offsets.
Tensor sampling_positions(const KernelField& kf);

struct ScopeStats {
  double mean_dist_px = 0.0;
  double max_dist_px = 0.0;
};

/// Distance of every non-centre tap's effective location from its reference
/// pixel, averaged and maximised over taps and pixels, one entry per image.
std::vector<ScopeStats> kernel_scope_stats(const KernelField& kf);

}  // namespace lrru
