#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lrru {

struct GradCheckResult {
  std::string op;
  double max_rel_error = 0.0;
};

/// Finite-difference check of every differentiable op, the self-guided conv,
/// a conv->sigmoid->sum chain and the composed kernel prediction + update, on
/// seeded random inputs in [-2, 2] no larger than 4x8x8x8.
std::vector<GradCheckResult> run_gradient_suite(std::uint64_t seed, double eps = 1e-4);

}  // namespace lrru
