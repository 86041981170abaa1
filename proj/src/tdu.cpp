#include "lrru/tdu.hpp"

#include <algorithm>
#include <cmath>

#include "lrru/error.hpp"
#include "lrru/ops.hpp"

namespace lrru {

TduHead TduHead::from_params(const ModelParams& params, int iteration) {
  const std::string name = "tdu." + std::to_string(iteration);
  return {params.get(name + ".weight_head.weight"), params.get(name + ".weight_head.bias"),
          params.get(name + ".offset_head.weight"), params.get(name + ".offset_head.bias")};
}

std::pair<int, int> tap_displacement(int tap, int kernel_size) {
  const int r = kernel_size / 2;
  return {tap / kernel_size - r, tap % kernel_size - r};
}

KernelField predict_kernel(const Tensor& cross_feat, const Tensor& self_feat, const TduHead& head,
                           int kernel_size) {
  const Shape a = cross_feat.shape();
  const Shape b = self_feat.shape();
  if (a.n != b.n || a.h != b.h || a.w != b.w) {
    throw DimensionError("predict_kernel: feature extents differ " + a.str() + " vs " + b.str());
  }
  const int k2 = kernel_size * kernel_size;
  const Tensor feats = ops::concat_channels(cross_feat, self_feat);
  KernelField kf;
  kf.kernel_size = kernel_size;
  kf.weights = ops::mean_subtract_channels(
      ops::sigmoid(ops::conv2d(feats, head.weight_w, head.weight_b, 1, 0)));
  if (kf.weights.shape().c != k2) {
    throw DimensionError("weight head must emit k*k channels");
  }
  const Tensor raw = ops::conv2d(feats, head.offset_w, head.offset_b, 1, 0);
  if (raw.shape().c != 2 * (k2 - 1)) {
    throw DimensionError("offset head must emit 2*(k*k-1) channels");
  }
  kf.offsets = ops::insert_zero_channels(raw, 2 * (k2 / 2), 2);
  return kf;
}

Tensor sampling_positions(const KernelField& kf) {
  const Shape s = kf.offsets.shape();
  const int k2 = kf.kernel_size * kf.kernel_size;
  if (s.c != 2 * k2) throw DimensionError("offsets must have 2*k*k channels");
  std::vector<double> grid(static_cast<std::size_t>(s.numel()));
  for (std::int64_t n = 0; n < s.n; ++n) {
    for (int j = 0; j < k2; ++j) {
      const auto [gy, gx] = tap_displacement(j, kf.kernel_size);
      double* py = grid.data() + (n * s.c + 2 * j) * s.plane();
      double* px = py + s.plane();
      for (std::int64_t y = 0; y < s.h; ++y) {
        for (std::int64_t x = 0; x < s.w; ++x) {
          py[y * s.w + x] = static_cast<double>(y + gy);
          px[y * s.w + x] = static_cast<double>(x + gx);
        }
      }
    }
  }
  return ops::add(kf.offsets, Tensor(s, std::move(grid)));
}

Tensor apply_update(const Tensor& target, const KernelField& kf) {
  const Shape t = target.shape();
  const Shape w = kf.weights.shape();
  const Shape o = kf.offsets.shape();
  const int k2 = kf.kernel_size * kf.kernel_size;
  if (t.c != 1 || w.n != t.n || w.h != t.h || w.w != t.w || w.c != k2 || o.n != t.n ||
      o.h != t.h || o.w != t.w) {
    throw DimensionError("apply_update: kernel field " + w.str() + "/" + o.str() +
                         " does not match target " + t.str());
  }
  const Tensor samples = ops::grid_sample_bilinear(target, sampling_positions(kf));
  const Tensor residual = ops::sum_channels(ops::mul(kf.weights, samples));
  return ops::add(target, residual);
}

std::vector<ScopeStats> kernel_scope_stats(const KernelField& kf) {
  const Shape s = kf.offsets.shape();
  const int k = kf.kernel_size;
  const int k2 = k * k;
  if (s.c != 2 * k2) throw DimensionError("offsets must have 2*k*k channels");
  const auto off = kf.offsets.data();
  std::vector<ScopeStats> out(static_cast<std::size_t>(s.n));
  for (std::int64_t n = 0; n < s.n; ++n) {
    double total = 0.0;
    double worst = 0.0;
    std::int64_t count = 0;
    for (int j = 0; j < k2; ++j) {
      if (j == k2 / 2) continue;
      const auto [gy, gx] = tap_displacement(j, k);
      const double* dy = off.data() + (n * s.c + 2 * j) * s.plane();
      const double* dx = dy + s.plane();
      for (std::int64_t i = 0; i < s.plane(); ++i) {
        const double d = std::hypot(gy + dy[i], gx + dx[i]);
        total += d;
        worst = std::max(worst, d);
        ++count;
      }
    }
    out[static_cast<std::size_t>(n)] = {count ? total / static_cast<double>(count) : 0.0, worst};
  }
  return out;
}

}  // namespace lrru
