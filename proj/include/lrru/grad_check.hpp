#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "lrru/tensor.hpp"

namespace lrru {

struct GradCheckOptions {
  double eps = 1e-4;
  /// Inputs holding sampling coordinates. Elements within 10*eps of an
  /// integer (a bilinear kink) are moved to integer + 10*eps before checking.
  std::vector<std::size_t> kink_inputs;
};

/// Compares reverse-mode gradients of a scalar function with central
/// differences. Returns max |analytic - numeric| / max(1, |analytic|, |numeric|)
/// over every element of every input.
double grad_check(const std::function<Tensor(std::span<const Tensor>)>& f,
                  std::vector<Tensor>& inputs, const GradCheckOptions& options = {});

}  // namespace lrru
