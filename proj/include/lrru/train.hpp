#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lrru/config.hpp"
#include "lrru/depth_map.hpp"
#include "lrru/params.hpp"
#include "lrru/tdu.hpp"

namespace lrru {

/// Per-stage quality over a dataset. Index 0 of rmse/mae is the pre-filled
/// map; index t is the output of iteration t. scope has one entry per
/// iteration.
struct IterationEval {
  std::vector<double> rmse_mm;
  std::vector<double> mae_mm;
  std::vector<ScopeStats> scope;
};

IterationEval evaluate_iterations(const std::vector<DepthSample>& data, const ModelParams& params,
                                  const LrruConfig& cfg);

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  double lr = 0.0;
  IterationEval validation;  // empty when no validation set was given
  double wall_seconds = 0.0;
};

nlohmann::json to_json(const EpochRecord& r);

struct TrainLog {
  std::vector<EpochRecord> epochs;
  /// One JSON record per line.
  std::string to_ndjson() const;
};

struct TrainOptions {
  const std::vector<DepthSample>* validation = nullptr;
  /// When set, last.ckpt is rewritten after every epoch and model.ckpt at the end.
  std::filesystem::path checkpoint_dir;
  std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainResult {
  ModelParams params;
  TrainLog log;
};

/// Adam over shuffled minibatches with the configured step schedule. Fully
/// deterministic for a given config and dataset. Throws NumericError when the
/// loss stops being finite.
TrainResult train(const std::vector<DepthSample>& data, const LrruConfig& cfg,
                  const TrainOptions& options = {});

/// Metadata stored with checkpoints written by the trainer.
nlohmann::json checkpoint_metadata(const LrruConfig& cfg, int epoch);
/// Config recovered from checkpoint metadata.
LrruConfig config_from_checkpoint(const nlohmann::json& metadata);

}  // namespace lrru
