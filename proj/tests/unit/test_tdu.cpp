#include <doctest.h>

#include <cmath>

#include "lrru/error.hpp"
#include "lrru/ops.hpp"
#include "lrru/tdu.hpp"
#include "test_util.hpp"

using namespace lrru;
using lrru::testing::random_tensor;

namespace {

TduHead random_head(int cross_c, int self_c, std::uint64_t seed, bool zero_bias) {
  const int in = cross_c + self_c;
  return {random_tensor({9, in, 1, 1}, seed, -1, 1),
          zero_bias ? Tensor::zeros({1, 9, 1, 1}) : random_tensor({1, 9, 1, 1}, seed + 1, -1, 1),
          random_tensor({16, in, 1, 1}, seed + 2, -0.5, 0.5),
          zero_bias ? Tensor::zeros({1, 16, 1, 1}) : random_tensor({1, 16, 1, 1}, seed + 3, -1, 1)};
}

double bilinear(const Tensor& img, double y, double x) {
  const std::int64_t h = img.shape().h, w = img.shape().w;
  y = std::clamp(y, 0.0, static_cast<double>(h - 1));
  x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  const auto y0 = static_cast<std::int64_t>(std::floor(y)), x0 = static_cast<std::int64_t>(std::floor(x));
  const std::int64_t y1 = std::min(y0 + 1, h - 1), x1 = std::min(x0 + 1, w - 1);
  const double fy = y - static_cast<double>(y0), fx = x - static_cast<double>(x0);
  return (1 - fy) * ((1 - fx) * img.at(0, 0, y0, x0) + fx * img.at(0, 0, y0, x1)) +
         fy * ((1 - fx) * img.at(0, 0, y1, x0) + fx * img.at(0, 0, y1, x1));
}

// Per-pixel loop over the nine taps.
std::vector<double> naive_update(const Tensor& target, const Tensor& weights, const Tensor& offsets) {
  const std::int64_t h = target.shape().h, w = target.shape().w;
  std::vector<double> out;
  for (std::int64_t y = 0; y < h; ++y)
    for (std::int64_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int j = 0; j < 9; ++j) {
        const double qy = static_cast<double>(y + j / 3 - 1) + offsets.at(0, 2 * j, y, x);
        const double qx = static_cast<double>(x + j % 3 - 1) + offsets.at(0, 2 * j + 1, y, x);
        acc += weights.at(0, j, y, x) * bilinear(target, qy, qx);
      }
      out.push_back(target.at(0, 0, y, x) + acc);
    }
  return out;
}

}  // namespace

TEST_CASE("kernel prediction invariants on random inputs") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TduHead head = random_head(6, 4, 1000 + seed, false);
    const KernelField kf = predict_kernel(random_tensor({2, 6, 5, 7}, seed), random_tensor({2, 4, 5, 7}, seed + 500), head);
    CHECK(kf.weights.shape() == Shape{2, 9, 5, 7});
    CHECK(kf.offsets.shape() == Shape{2, 18, 5, 7});
    const Tensor sums = ops::sum_channels(kf.weights);
    for (double v : sums.data()) CHECK(std::abs(v) < 1e-10);
    const auto plane = kf.offsets.shape().plane();
    for (std::int64_t n = 0; n < 2; ++n)
      for (std::int64_t i = 0; i < 2 * plane; ++i) {
        CHECK(kf.offsets.data()[static_cast<std::size_t>((n * 18 + 8) * plane + i)] == 0.0);
      }
  }
}

TEST_CASE("zero features with zero biases give a null kernel and identity update") {
  const TduHead head = random_head(8, 8, 7, true);
  const KernelField kf = predict_kernel(Tensor::zeros({1, 8, 4, 4}), Tensor::zeros({1, 8, 4, 4}), head);
  for (double v : kf.weights.data()) CHECK(v == 0.0);
  for (double v : kf.offsets.data()) CHECK(v == 0.0);
  const Tensor target = random_tensor({1, 1, 4, 4}, 8, 100, 9000);
  const Tensor out = apply_update(target, kf);
  CHECK(std::equal(out.data().begin(), out.data().end(), target.data().begin()));
}

TEST_CASE("apply_update equals a per-pixel loop") {
  for (int h = 3; h <= 8; ++h)
    for (int w = 3; w <= 8; ++w) {
      const std::uint64_t seed = static_cast<std::uint64_t>(h * 31 + w);
      const Tensor target = random_tensor({1, 1, h, w}, seed, 500, 5000);
      const Tensor weights = random_tensor({1, 9, h, w}, seed + 1, -1, 1);
      Tensor offsets = random_tensor({1, 18, h, w}, seed + 2, -2.5, 2.5);
      auto od = offsets.mutable_data();
      for (std::int64_t i = 0; i < 2 * h * w; ++i) od[static_cast<std::size_t>(8 * h * w + i)] = 0.0;
      const KernelField kf{weights, offsets, 3};
      const Tensor out = apply_update(target, kf);
      CHECK(lrru::testing::max_abs_diff(out.data(), naive_update(target, weights, offsets)) < 1e-12);
    }
}

TEST_CASE("zero-sum weights annihilate constant images") {
  const TduHead head = random_head(5, 3, 9, false);
  const KernelField kf = predict_kernel(random_tensor({1, 5, 6, 6}, 10), random_tensor({1, 3, 6, 6}, 11), head);
  const Tensor c = Tensor::full({1, 1, 6, 6}, 4321.0);
  const Tensor out = apply_update(c, kf);
  for (double v : out.data()) CHECK(std::abs(v - 4321.0) < 1e-10);
}

TEST_CASE("the centre tap samples the reference pixel itself") {
  // Only the centre weight is non-zero, so the residual is w * target(p).
  const Tensor target = random_tensor({1, 1, 4, 4}, 12, 1, 10);
  std::vector<double> wv(9 * 16, 0.0);
  for (int i = 0; i < 16; ++i) wv[static_cast<std::size_t>(4 * 16 + i)] = 0.5;
  Tensor offsets = random_tensor({1, 18, 4, 4}, 13);
  auto od = offsets.mutable_data();
  for (int i = 0; i < 32; ++i) od[static_cast<std::size_t>(8 * 16 + i)] = 0.0;
  const Tensor out = apply_update(target, {Tensor({1, 9, 4, 4}, wv), offsets, 3});
  for (int i = 0; i < 16; ++i) CHECK(out.data()[i] == doctest::Approx(1.5 * target.data()[i]).epsilon(1e-15));
}

TEST_CASE("kernel scope statistics") {
  KernelField kf{Tensor::zeros({1, 9, 3, 3}), Tensor::zeros({1, 18, 3, 3}), 3};
  ScopeStats s = kernel_scope_stats(kf).front();
  CHECK(s.mean_dist_px == doctest::Approx((4.0 + 4.0 * std::sqrt(2.0)) / 8.0).epsilon(1e-14));
  CHECK(s.max_dist_px == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  // Shift every off-centre tap by (0, +2) and recompute the distances directly.
  std::vector<double> off(18 * 9, 0.0);
  double total = 0.0, worst = 0.0;
  for (int j = 0; j < 9; ++j) {
    if (j == 4) continue;
    for (int i = 0; i < 9; ++i) off[static_cast<std::size_t>((2 * j + 1) * 9 + i)] = 2.0;
    const double d = std::hypot(j / 3 - 1, j % 3 - 1 + 2.0);
    total += d;
    worst = std::max(worst, d);
  }
  kf.offsets = Tensor({1, 18, 3, 3}, off);
  s = kernel_scope_stats(kf).front();
  CHECK(s.mean_dist_px == doctest::Approx(total / 8.0).epsilon(1e-14));
  CHECK(s.max_dist_px == doctest::Approx(worst).epsilon(1e-14));

  // One pixel: clamping does not enter the statistics.
  std::vector<double> single(18, 0.0);
  single[0] = -0.5;
  kf.offsets = Tensor({1, 18, 1, 1}, single);
  kf.weights = Tensor::zeros({1, 9, 1, 1});
  s = kernel_scope_stats(kf).front();
  const double want = (std::hypot(-1.5, -1.0) + 4.0 + 3.0 * std::sqrt(2.0)) / 8.0;
  CHECK(s.mean_dist_px == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("shape errors") {
  const TduHead head = random_head(4, 4, 14, false);
  CHECK_THROWS_AS(predict_kernel(Tensor::zeros({1, 4, 4, 4}), Tensor::zeros({1, 4, 5, 4}), head), DimensionError);
  const KernelField kf{Tensor::zeros({1, 9, 4, 4}), Tensor::zeros({1, 18, 4, 4}), 3};
  CHECK_THROWS_AS(apply_update(Tensor::zeros({1, 1, 3, 4}), kf), DimensionError);
}
