#include "lrru/train.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "lrru/adam.hpp"
#include "lrru/checkpoint.hpp"
#include "lrru/error.hpp"
#include "lrru/guidance.hpp"
#include "lrru/metrics.hpp"
#include "lrru/pipeline.hpp"
#include "lrru/prefill.hpp"

namespace lrru {

namespace {

std::optional<Tensor> batch_rgb(const std::vector<const DepthSample*>& batch, const LrruConfig& cfg) {
  if (cfg.depth_only) return std::nullopt;
  std::vector<const RgbImage*> images;
  for (const DepthSample* s : batch) {
    if (!s->rgb) throw DataError("training sample without RGB but depth_only is false");
    images.push_back(&*s->rgb);
  }
  return rgb_batch_tensor(images);
}

}  // namespace

IterationEval evaluate_iterations(const std::vector<DepthSample>& data, const ModelParams& params,
                                  const LrruConfig& cfg) {
  if (data.empty()) throw DataError("evaluate_iterations: empty dataset");
  const NoGradGuard no_grad;
  const std::size_t stages = static_cast<std::size_t>(cfg.iterations) + 1;
  IterationEval ev;
  ev.rmse_mm.assign(stages, 0.0);
  ev.mae_mm.assign(stages, 0.0);
  ev.scope.assign(static_cast<std::size_t>(cfg.iterations), {});
  for (const DepthSample& s : data) {
    const DepthMap initial = prefill(s.sparse, cfg.max_depth_mm);
    const ForwardOutput fw =
        lrru_forward_batch(batch_rgb({&s}, cfg), depth_batch_tensor({&s.sparse}),
                           depth_batch_tensor({&initial}), params, cfg);
    for (std::size_t t = 0; t < stages; ++t) {
      const DepthMap pred = t == 0 ? initial : to_prediction(fw.updates[t - 1], cfg);
      const MetricReport r = metrics(pred, s.gt);
      ev.rmse_mm[t] += r.rmse_mm;
      ev.mae_mm[t] += r.mae_mm;
    }
    for (std::size_t t = 0; t < fw.kernels.size(); ++t) {
      const ScopeStats st = kernel_scope_stats(fw.kernels[t]).front();
      ev.scope[t].mean_dist_px += st.mean_dist_px;
      ev.scope[t].max_dist_px = std::max(ev.scope[t].max_dist_px, st.max_dist_px);
    }
  }
  const double k = static_cast<double>(data.size());
  for (std::size_t t = 0; t < stages; ++t) {
    ev.rmse_mm[t] /= k;
    ev.mae_mm[t] /= k;
  }
  for (auto& st : ev.scope) st.mean_dist_px /= k;
  return ev;
}

nlohmann::json to_json(const EpochRecord& r) {
  nlohmann::json j{{"epoch", r.epoch}, {"loss", r.loss}, {"lr", r.lr},
                   {"wall_seconds", r.wall_seconds}};
  if (!r.validation.rmse_mm.empty()) {
    j["val_rmse_mm"] = r.validation.rmse_mm;
    j["val_mae_mm"] = r.validation.mae_mm;
    nlohmann::json scope = nlohmann::json::array();
    for (std::size_t t = 0; t < r.validation.scope.size(); ++t) {
      scope.push_back({{"iteration", t + 1},
                       {"mean_dist_px", r.validation.scope[t].mean_dist_px},
                       {"max_dist_px", r.validation.scope[t].max_dist_px}});
    }
    j["kernel_scope"] = scope;
  }
  return j;
}

std::string TrainLog::to_ndjson() const {
  std::string out;
  for (const auto& e : epochs) out += to_json(e).dump() + "\n";
  return out;
}

nlohmann::json checkpoint_metadata(const LrruConfig& cfg, int epoch) {
  return {{"config", to_json(cfg)}, {"epoch", epoch}};
}

LrruConfig config_from_checkpoint(const nlohmann::json& metadata) {
  if (!metadata.contains("config")) throw DataError("checkpoint carries no config");
  return config_from_json(metadata.at("config"));
}

TrainResult train(const std::vector<DepthSample>& data, const LrruConfig& cfg,
                  const TrainOptions& options) {
  cfg.validate();
  if (data.empty()) throw DataError("train: dataset is empty");
  const auto clock_start = std::chrono::steady_clock::now();

  TrainResult result{init_model_params(cfg, cfg.seed), {}};
  ModelParams& params = result.params;

  std::vector<DepthMap> initial;
  initial.reserve(data.size());
  for (const DepthSample& s : data) initial.push_back(prefill(s.sparse, cfg.max_depth_mm));

  AdamState state;
  AdamOptions adam;
  adam.beta1 = cfg.optimizer.beta1;
  adam.beta2 = cfg.optimizer.beta2;
  adam.weight_decay = cfg.optimizer.weight_decay;

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 shuffle_rng(cfg.seed ^ 0x5deece66dULL);
  const std::size_t batch_size = static_cast<std::size_t>(cfg.optimizer.batch_size);

  if (!options.checkpoint_dir.empty()) std::filesystem::create_directories(options.checkpoint_dir);

  for (int epoch = 0; epoch < cfg.optimizer.epochs; ++epoch) {
    adam.lr = learning_rate_at(cfg.optimizer, epoch);
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
      const std::size_t end = std::min(order.size(), begin + batch_size);
      std::vector<const DepthSample*> batch;
      std::vector<const DepthMap*> sparse, init, gt;
      for (std::size_t i = begin; i < end; ++i) {
        const DepthSample& s = data[order[i]];
        batch.push_back(&s);
        sparse.push_back(&s.sparse);
        init.push_back(&initial[order[i]]);
        gt.push_back(&s.gt);
      }
      const ForwardOutput fw = lrru_forward_batch(batch_rgb(batch, cfg), depth_batch_tensor(sparse),
                                                  depth_batch_tensor(init), params, cfg);
      const Tensor loss = lrru_loss(fw.updates, depth_batch_tensor(gt), mask_batch_tensor(gt), cfg);
      const double value = loss.item();
      if (!std::isfinite(value)) {
        throw NumericError("training diverged: non-finite loss at epoch " + std::to_string(epoch + 1));
      }
      params.zero_grad();
      loss.backward();
      adam_step(params, state, adam);
      loss_sum += value * static_cast<double>(end - begin);
    }

    EpochRecord rec;
    rec.epoch = epoch + 1;
    rec.loss = loss_sum / static_cast<double>(data.size());
    rec.lr = adam.lr;
    if (options.validation && !options.validation->empty()) {
      rec.validation = evaluate_iterations(*options.validation, params, cfg);
    }
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
    if (!options.checkpoint_dir.empty()) {
      save_checkpoint(options.checkpoint_dir / "last.ckpt", params, checkpoint_metadata(cfg, rec.epoch));
    }
    if (options.on_epoch) options.on_epoch(rec);
    result.log.epochs.push_back(std::move(rec));
  }
  if (!options.checkpoint_dir.empty()) {
    save_checkpoint(options.checkpoint_dir / "model.ckpt", params,
                    checkpoint_metadata(cfg, cfg.optimizer.epochs));
  }
  params.zero_grad();
  return result;
}

}  // namespace lrru
