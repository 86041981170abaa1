#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lrru {

enum class LossTerm { kL1, kL2 };

struct LrSchedule {
  int constant_epochs = 15;
  int decay_every = 5;
  double decay_factor = 0.5;
};

struct OptimizerConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double weight_decay = 1e-6;
  int batch_size = 8;
  int epochs = 40;
  LrSchedule lr_schedule;
};

struct LrruConfig {
  std::string variant = "mini";
  std::array<int, 5> channels{8, 16, 32, 32, 32};
  int kernel_size = 3;
  int iterations = 4;
  /// Guidance scale used by each iteration, coarse to fine (1/8 .. 1).
  std::vector<double> scale_schedule{0.125, 0.25, 0.5, 1.0};
  double gamma = 0.8;
  std::vector<LossTerm> loss_terms{LossTerm::kL1, LossTerm::kL2};
  double max_depth_mm = 100000.0;
  OptimizerConfig optimizer;
  bool depth_only = false;
  std::uint64_t seed = 0;

  /// Throws UsageError when an invariant is broken.
  void validate() const;

  static LrruConfig mini();
  static LrruConfig tiny();
  static LrruConfig small();
  static LrruConfig base();
  static LrruConfig for_variant(const std::string& name);
};

/// Learning rate for a 0-based epoch index.
double learning_rate_at(const OptimizerConfig& opt, int epoch);

/// Upsampling factor that brings a schedule scale back to full resolution.
int upsample_factor(double scale);

nlohmann::json to_json(const LrruConfig& cfg);
/// Strict parse: unknown keys and wrong types raise UsageError.
LrruConfig config_from_json(const nlohmann::json& j);
LrruConfig load_config(const std::string& path);

}  // namespace lrru
