#include "lrru/config.hpp"

#include <cmath>
#include <set>

#include "lrru/error.hpp"
#include "lrru/io_util.hpp"

namespace lrru {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw UsageError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw UsageError("unknown config key '" + key + "' in " + where);
  }
}

template <typename T>
void read_field(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError("config key '" + std::string(key) + "' in " + where + " has the wrong type");
  }
}

const char* term_name(LossTerm t) { return t == LossTerm::kL1 ? "l1" : "l2"; }

}  // namespace

void LrruConfig::validate() const {
  for (int c : channels) {
    if (c < 1) throw UsageError("channel widths must be positive");
  }
  if (kernel_size < 1 || kernel_size % 2 == 0) throw UsageError("kernel_size must be odd");
  if (iterations < 1) throw UsageError("iterations must be >= 1");
  if (static_cast<int>(scale_schedule.size()) != iterations) {
    throw UsageError("scale_schedule length must equal iterations");
  }
  for (double s : scale_schedule) upsample_factor(s);
  if (!(gamma > 0.0 && gamma <= 1.0)) throw UsageError("gamma must lie in (0, 1]");
  if (loss_terms.empty()) throw UsageError("loss_terms must not be empty");
  if (!(max_depth_mm > 0.0)) throw UsageError("max_depth_mm must be positive");
  if (optimizer.batch_size < 1) throw UsageError("batch_size must be >= 1");
  if (optimizer.epochs < 0) throw UsageError("epochs must be >= 0");
  if (optimizer.lr < 0.0) throw UsageError("lr must be non-negative");
  if (optimizer.lr_schedule.decay_every < 1) throw UsageError("decay_every must be >= 1");
}

LrruConfig LrruConfig::mini() { return LrruConfig{}; }

LrruConfig LrruConfig::tiny() {
  LrruConfig c;
  c.variant = "tiny";
  c.channels = {16, 32, 64, 64, 64};
  return c;
}

LrruConfig LrruConfig::small() {
  LrruConfig c;
  c.variant = "small";
  c.channels = {32, 64, 128, 128, 128};
  return c;
}

LrruConfig LrruConfig::base() {
  LrruConfig c;
  c.variant = "base";
  c.channels = {64, 128, 256, 256, 256};
  return c;
}

LrruConfig LrruConfig::for_variant(const std::string& name) {
  if (name == "mini") return mini();
  if (name == "tiny") return tiny();
  if (name == "small") return small();
  if (name == "base") return base();
  throw UsageError("unknown variant '" + name + "'");
}

double learning_rate_at(const OptimizerConfig& opt, int epoch) {
  const LrSchedule& s = opt.lr_schedule;
  if (epoch < s.constant_epochs) return opt.lr;
  const int decays = (epoch - s.constant_epochs) / s.decay_every + 1;
  return opt.lr * std::pow(s.decay_factor, decays);
}

int upsample_factor(double scale) {
  if (!(scale > 0.0 && scale <= 1.0)) throw UsageError("schedule scales must lie in (0, 1]");
  const double inv = 1.0 / scale;
  const long r = std::lround(inv);
  if (std::fabs(inv - static_cast<double>(r)) > 1e-9 || (r & (r - 1)) != 0 || r > 8) {
    throw UsageError("schedule scales must be one of 1/8, 1/4, 1/2, 1");
  }
  return static_cast<int>(r);
}

nlohmann::json to_json(const LrruConfig& cfg) {
  json terms = json::array();
  for (LossTerm t : cfg.loss_terms) terms.push_back(term_name(t));
  const auto& o = cfg.optimizer;
  return {{"variant", cfg.variant},
          {"channels", cfg.channels},
          {"kernel_size", cfg.kernel_size},
          {"iterations", cfg.iterations},
          {"scale_schedule", cfg.scale_schedule},
          {"gamma", cfg.gamma},
          {"loss_terms", terms},
          {"max_depth_mm", cfg.max_depth_mm},
          {"optimizer",
           {{"lr", o.lr},
            {"beta1", o.beta1},
            {"beta2", o.beta2},
            {"weight_decay", o.weight_decay},
            {"batch_size", o.batch_size},
            {"epochs", o.epochs},
            {"lr_schedule",
             {{"constant_epochs", o.lr_schedule.constant_epochs},
              {"decay_every", o.lr_schedule.decay_every},
              {"decay_factor", o.lr_schedule.decay_factor}}}}},
          {"depth_only", cfg.depth_only},
          {"seed", cfg.seed}};
}

LrruConfig config_from_json(const nlohmann::json& j) {
  reject_unknown(j,
                 {"variant", "channels", "kernel_size", "iterations", "scale_schedule", "gamma",
                  "loss_terms", "max_depth_mm", "optimizer", "depth_only", "seed"},
                 "config");
  LrruConfig cfg;
  if (j.contains("variant")) {
    std::string v;
    read_field(j, "variant", v, "config");
    cfg = LrruConfig::for_variant(v);
  }
  read_field(j, "channels", cfg.channels, "config");
  read_field(j, "kernel_size", cfg.kernel_size, "config");
  read_field(j, "iterations", cfg.iterations, "config");
  read_field(j, "scale_schedule", cfg.scale_schedule, "config");
  read_field(j, "gamma", cfg.gamma, "config");
  read_field(j, "max_depth_mm", cfg.max_depth_mm, "config");
  read_field(j, "depth_only", cfg.depth_only, "config");
  read_field(j, "seed", cfg.seed, "config");
  if (j.contains("loss_terms")) {
    std::vector<std::string> names;
    read_field(j, "loss_terms", names, "config");
    cfg.loss_terms.clear();
    for (const auto& n : names) {
      if (n == "l1") {
        cfg.loss_terms.push_back(LossTerm::kL1);
      } else if (n == "l2") {
        cfg.loss_terms.push_back(LossTerm::kL2);
      } else {
        throw UsageError("unknown loss term '" + n + "' (expected l1 or l2)");
      }
    }
  }
  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    reject_unknown(o,
                   {"lr", "beta1", "beta2", "weight_decay", "batch_size", "epochs", "lr_schedule"},
                   "optimizer");
    auto& opt = cfg.optimizer;
    read_field(o, "lr", opt.lr, "optimizer");
    read_field(o, "beta1", opt.beta1, "optimizer");
    read_field(o, "beta2", opt.beta2, "optimizer");
    read_field(o, "weight_decay", opt.weight_decay, "optimizer");
    read_field(o, "batch_size", opt.batch_size, "optimizer");
    read_field(o, "epochs", opt.epochs, "optimizer");
    if (o.contains("lr_schedule")) {
      const json& s = o.at("lr_schedule");
      reject_unknown(s, {"constant_epochs", "decay_every", "decay_factor"}, "lr_schedule");
      read_field(s, "constant_epochs", opt.lr_schedule.constant_epochs, "lr_schedule");
      read_field(s, "decay_every", opt.lr_schedule.decay_every, "lr_schedule");
      read_field(s, "decay_factor", opt.lr_schedule.decay_factor, "lr_schedule");
    }
  }
  cfg.validate();
  return cfg;
}

LrruConfig load_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw UsageError("malformed config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace lrru
