#include "lrru/gradcheck_suite.hpp"

#include <cmath>
#include <functional>
#include <random>

#include "lrru/error.hpp"
#include "lrru/grad_check.hpp"
#include "lrru/ops.hpp"
#include "lrru/params.hpp"
#include "lrru/guidance.hpp"
#include "lrru/tdu.hpp"

namespace lrru {

namespace {

using Fn = std::function<Tensor(std::span<const Tensor>)>;

class Inputs {
 public:
  explicit Inputs(std::uint64_t seed) : rng_(seed) {}

  Tensor uniform(Shape s, double lo = -2.0, double hi = 2.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(static_cast<std::size_t>(s.numel()));
    for (double& x : v) x = d(rng_);
    return Tensor(s, std::move(v));
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Scalar reduction with distinct weights per element so that every output
// element influences the result differently.
Tensor weighted_sum(const Tensor& x) {
  std::vector<double> w(static_cast<std::size_t>(x.numel()));
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::sin(0.37 * static_cast<double>(i) + 0.1);
  return ops::sum(ops::mul(x, Tensor(x.shape(), std::move(w))));
}

double min_distance_to_integer(std::span<const double> v) {
  double best = 1.0;
  for (double x : v) best = std::min(best, std::fabs(x - std::round(x)));
  return best;
}

}  // namespace

std::vector<GradCheckResult> run_gradient_suite(std::uint64_t seed, double eps) {
  Inputs in(seed);
  std::vector<GradCheckResult> results;
  GradCheckOptions opt;
  opt.eps = eps;
  auto check = [&](const std::string& name, std::vector<Tensor> inputs, const Fn& f,
                   std::vector<std::size_t> kinks = {}) {
    GradCheckOptions o = opt;
    o.kink_inputs = std::move(kinks);
    results.push_back({name, grad_check(f, inputs, o)});
  };

  check("conv2d", {in.uniform({2, 3, 5, 5}), in.uniform({4, 3, 3, 3}), in.uniform({1, 4, 1, 1})},
        [](std::span<const Tensor> x) { return weighted_sum(ops::conv2d(x[0], x[1], x[2], 1, 1)); });
  check("conv2d_stride2",
        {in.uniform({2, 3, 6, 6}), in.uniform({4, 3, 3, 3}), in.uniform({1, 4, 1, 1})},
        [](std::span<const Tensor> x) { return weighted_sum(ops::conv2d(x[0], x[1], x[2], 2, 1)); });
  {
    // Positions spread over [-1, 7] so some samples exercise the clamped border.
    Tensor pos = in.uniform({2, 6, 6, 6}, -1.0, 7.0);
    check("grid_sample_bilinear", {in.uniform({2, 1, 6, 6}), pos},
          [](std::span<const Tensor> x) { return weighted_sum(ops::grid_sample_bilinear(x[0], x[1])); },
          {1});
  }
  check("sigmoid", {in.uniform({2, 3, 4, 4})},
        [](std::span<const Tensor> x) { return weighted_sum(ops::sigmoid(x[0])); });
  check("leaky_relu", {in.uniform({2, 3, 4, 4})},
        [](std::span<const Tensor> x) { return weighted_sum(ops::leaky_relu(x[0], kLeakySlope)); });
  check("mean_subtract_channels", {in.uniform({2, 9, 4, 4})},
        [](std::span<const Tensor> x) { return weighted_sum(ops::mean_subtract_channels(x[0])); });
  check("add", {in.uniform({2, 3, 4, 4}), in.uniform({2, 3, 4, 4})},
        [](std::span<const Tensor> x) { return weighted_sum(ops::add(x[0], x[1])); });
  check("sub", {in.uniform({2, 3, 4, 4}), in.uniform({2, 3, 4, 4})},
        [](std::span<const Tensor> x) { return weighted_sum(ops::sub(x[0], x[1])); });
  check("mul", {in.uniform({2, 3, 4, 4}), in.uniform({2, 3, 4, 4})},
        [](std::span<const Tensor> x) { return weighted_sum(ops::mul(x[0], x[1])); });
  check("scale", {in.uniform({2, 3, 4, 4})},
        [](std::span<const Tensor> x) { return weighted_sum(ops::scale(x[0], -1.7)); });
  check("abs", {in.uniform({2, 3, 4, 4})},
        [](std::span<const Tensor> x) { return weighted_sum(ops::abs(x[0])); });
  check("square", {in.uniform({2, 3, 4, 4})},
        [](std::span<const Tensor> x) { return weighted_sum(ops::square(x[0])); });
  check("sum", {in.uniform({2, 3, 4, 4})}, [](std::span<const Tensor> x) { return ops::sum(x[0]); });
  check("sum_channels", {in.uniform({2, 5, 4, 4})},
        [](std::span<const Tensor> x) { return weighted_sum(ops::sum_channels(x[0])); });
  check("concat_channels", {in.uniform({2, 3, 4, 4}), in.uniform({2, 2, 4, 4})},
        [](std::span<const Tensor> x) { return weighted_sum(ops::concat_channels(x[0], x[1])); });
  check("slice_channels", {in.uniform({2, 6, 4, 4})},
        [](std::span<const Tensor> x) { return weighted_sum(ops::slice_channels(x[0], 1, 3)); });
  check("insert_zero_channels", {in.uniform({2, 4, 4, 4})},
        [](std::span<const Tensor> x) { return weighted_sum(ops::insert_zero_channels(x[0], 2, 2)); });
  check("upsample_bilinear", {in.uniform({2, 3, 4, 4})},
        [](std::span<const Tensor> x) { return weighted_sum(ops::upsample_bilinear(x[0], 2)); });
  check("crop_spatial", {in.uniform({2, 3, 5, 5})},
        [](std::span<const Tensor> x) { return weighted_sum(ops::crop_spatial(x[0], 4, 3)); });
  check("flip_horizontal", {in.uniform({2, 3, 4, 5})},
        [](std::span<const Tensor> x) { return weighted_sum(ops::flip_horizontal(x[0])); });
  check("conv_sigmoid_sum", {in.uniform({2, 3, 5, 5}), in.uniform({4, 3, 3, 3}), in.uniform({1, 4, 1, 1})},
        [](std::span<const Tensor> x) {
          return ops::sum(ops::sigmoid(ops::conv2d(x[0], x[1], x[2], 1, 1)));
        });
  {
    ModelParams p;
    p.add("self_guided.weight", in.uniform({8, 1, 3, 3}, -0.5, 0.5));
    p.add("self_guided.bias", in.uniform({1, 8, 1, 1}, -0.5, 0.5));
    check("self_guided", {in.uniform({2, 1, 6, 6}), p.get("self_guided.weight"), p.get("self_guided.bias")},
          [](std::span<const Tensor> x) {
            ModelParams q;
            q.add("self_guided.weight", x[1]);
            q.add("self_guided.bias", x[2]);
            return weighted_sum(extract_self_guided(x[0], q));
          });
  }
  {
    // Composed kernel prediction + update. Draw until no sampling coordinate
    // sits near an integer, where bilinear interpolation has a kink.
    std::vector<Tensor> x;
    bool clean = false;
    for (int attempt = 0; attempt < 200 && !clean; ++attempt) {
      x = {in.uniform({2, 6, 6, 6}),          in.uniform({2, 2, 6, 6}),
           in.uniform({9, 8, 1, 1}, -1, 1),   in.uniform({1, 9, 1, 1}, -1, 1),
           in.uniform({16, 8, 1, 1}, -0.5, 0.5), in.uniform({1, 16, 1, 1}, -1.5, 1.5),
           in.uniform({2, 1, 6, 6})};
      const KernelField kf = predict_kernel(x[0], x[1], {x[2], x[3], x[4], x[5]});
      const Tensor pos = sampling_positions(kf);
      std::vector<double> off_center;
      const Shape s = pos.shape();
      for (std::int64_t n = 0; n < s.n; ++n) {
        for (std::int64_t c = 0; c < s.c; ++c) {
          if (c / 2 == 4) continue;  // centre tap sits exactly on its pixel
          for (std::int64_t i = 0; i < s.plane(); ++i) off_center.push_back(pos.data()[static_cast<std::size_t>((n * s.c + c) * s.plane() + i)]);
        }
      }
      clean = min_distance_to_integer(off_center) > 1e-3;
    }
    if (!clean) throw Error("gradient suite: no kink-free draw for the composed TDU check");
    check("tdu_predict_apply", x, [](std::span<const Tensor> t) {
      const KernelField kf = predict_kernel(t[0], t[1], {t[2], t[3], t[4], t[5]});
      return weighted_sum(apply_update(t[6], kf));
    });
  }
  return results;
}

}  // namespace lrru
