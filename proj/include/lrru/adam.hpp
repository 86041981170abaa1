#pragma once

#include <cstdint>
#include <vector>

#include "lrru/params.hpp"

namespace lrru {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// L2 coefficient added to the gradient before the moment updates.
  double weight_decay = 0.0;
};

struct AdamState {
  std::int64_t step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

/// One bias-corrected Adam update using each parameter's accumulated gradient.
/// Parameters without a gradient are treated as having a zero gradient.
void adam_step(ModelParams& params, AdamState& state, const AdamOptions& options);

}  // namespace lrru
