// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any
// gated criterion fails. Criteria 7-12 share one trained model.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <random>
#include <set>
#include <sstream>

#include "lrru/checkpoint.hpp"
#include "lrru/cli.hpp"
#include "lrru/config.hpp"
#include "lrru/dataset.hpp"
#include "lrru/error.hpp"
#include "lrru/gradcheck_suite.hpp"
#include "lrru/io_util.hpp"
#include "lrru/metrics.hpp"
#include "lrru/ops.hpp"
#include "lrru/pipeline.hpp"
#include "lrru/prefill.hpp"
#include "lrru/synth.hpp"
#include "lrru/tdu.hpp"
#include "lrru/train.hpp"

using namespace lrru;
namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

constexpr int kTrainCount = 64;
constexpr int kHeldOutCount = 16;
constexpr std::uint64_t kTrainSeed = 1000;
constexpr std::uint64_t kHeldOutSeed = 9000;
constexpr int kSize = 64;
constexpr double kMaxDepth = 10000.0;

int g_failures = 0;

void report(int id, bool pass, const std::string& text, bool gating = true) {
  const char* tag = pass ? "PASS" : (gating ? "FAIL" : "INFO");
  std::cout << "[" << tag << "] criterion " << id << ": " << text << std::endl;
  if (!pass && gating) ++g_failures;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Tensor uniform(Shape s, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(static_cast<std::size_t>(s.numel()));
  for (double& x : v) x = d(rng);
  return Tensor(s, std::move(v));
}

TduHead random_head(std::int64_t in, std::mt19937_64& rng, bool zero_bias) {
  TduHead h;
  h.weight_w = uniform({9, in, 1, 1}, rng, -1.0, 1.0);
  h.weight_b = zero_bias ? Tensor::zeros({1, 9, 1, 1}) : uniform({1, 9, 1, 1}, rng, -1.0, 1.0);
  h.offset_w = uniform({16, in, 1, 1}, rng, -0.5, 0.5);
  h.offset_b = zero_bias ? Tensor::zeros({1, 16, 1, 1}) : uniform({1, 16, 1, 1}, rng, -1.0, 1.0);
  return h;
}

// ---------------------------------------------------------------- 1

void criterion1() {
  const auto t0 = Clock::now();
  const std::vector<GradCheckResult> results = run_gradient_suite(20240601);
  const double secs = seconds_since(t0);
  double worst = 0.0;
  std::string worst_op;
  for (const auto& r : results) {
    if (!(r.max_rel_error <= worst)) {
      worst = r.max_rel_error;
      worst_op = r.op;
    }
  }
  const bool pass = worst < 1e-4 && secs < 60.0;
  report(1, pass,
         "gradient suite over " + std::to_string(results.size()) + " ops, worst " + worst_op + " " +
             fmt("%.2e", worst) + " (< 1e-4), " + fmt("%.1f", secs) + " s (< 60 s)");
}

// ---------------------------------------------------------------- 2

void criterion2() {
  std::mt19937_64 rng(77);
  double worst_sum = 0.0, worst_identity = 0.0, worst_const = 0.0;
  bool centre_zero = true, raw_in_range = true;
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<int> ext(1, 8), ch(1, 6);
    const std::int64_t n = ext(rng) % 2 + 1, h = ext(rng), w = ext(rng), cc = ch(rng), sc = ch(rng);
    const TduHead head = random_head(cc + sc, rng, false);
    const Tensor cross = uniform({n, cc, h, w}, rng, -3.0, 3.0);
    const Tensor self = uniform({n, sc, h, w}, rng, -3.0, 3.0);
    const KernelField kf = predict_kernel(cross, self, head);

    const Tensor sums = ops::sum_channels(kf.weights);
    for (double v : sums.data()) worst_sum = std::max(worst_sum, std::abs(v));
    const std::int64_t plane = h * w;
    for (std::int64_t b = 0; b < n; ++b)
      for (std::int64_t i = 0; i < 2 * plane; ++i)
        centre_zero = centre_zero && kf.offsets.data()[static_cast<std::size_t>((b * 18 + 8) * plane + i)] == 0.0;
    // Raw weights are sigmoids: weights + per-pixel mean lie in (0, 1).
    const Tensor raw = ops::sigmoid(ops::conv2d(ops::concat_channels(cross, self), head.weight_w, head.weight_b, 1, 0));
    for (double v : raw.data()) raw_in_range = raw_in_range && v > 0.0 && v < 1.0;

    // Constant images are fixed points of any predicted kernel.
    const double c = std::uniform_real_distribution<double>(500.0, 9000.0)(rng);
    const Tensor constant = Tensor::full({n, 1, h, w}, c);
    const Tensor updated = apply_update(constant, kf);
    for (double v : updated.data()) worst_const = std::max(worst_const, std::abs(v - c));

    // Zero features with zero biases leave the target untouched.
    const TduHead zb = random_head(cc + sc, rng, true);
    const KernelField zk = predict_kernel(Tensor::zeros({n, cc, h, w}), Tensor::zeros({n, sc, h, w}), zb);
    const Tensor target = uniform({n, 1, h, w}, rng, 500.0, 9000.0);
    const Tensor out = apply_update(target, zk);
    for (std::size_t i = 0; i < out.data().size(); ++i)
      worst_identity = std::max(worst_identity, std::abs(out.data()[i] - target.data()[i]));
  }
  const bool pass = worst_sum < 1e-10 && centre_zero && worst_identity == 0.0 && worst_const < 1e-10 && raw_in_range;
  report(2, pass,
         "100 inputs: max |weight sum| " + fmt("%.1e", worst_sum) + ", centre offsets " +
             (centre_zero ? "exactly 0" : "NONZERO") + ", zero-feature identity error " +
             fmt("%.1e", worst_identity) + ", constant fixed-point error " + fmt("%.1e", worst_const) +
             (raw_in_range ? "" : ", raw weights outside (0,1)"));
}

// ---------------------------------------------------------------- 3

double bilinear_clamped(const std::vector<double>& img, int h, int w, double y, double x) {
  y = std::min(std::max(y, 0.0), h - 1.0);
  x = std::min(std::max(x, 0.0), w - 1.0);
  const int y0 = static_cast<int>(std::floor(y)), x0 = static_cast<int>(std::floor(x));
  const int y1 = std::min(y0 + 1, h - 1), x1 = std::min(x0 + 1, w - 1);
  const double fy = y - y0, fx = x - x0;
  const auto at = [&](int yy, int xx) { return img[static_cast<std::size_t>(yy * w + xx)]; };
  return (1 - fy) * ((1 - fx) * at(y0, x0) + fx * at(y0, x1)) + fy * ((1 - fx) * at(y1, x0) + fx * at(y1, x1));
}

void criterion3() {
  std::mt19937_64 rng(303);
  double worst = 0.0;
  int maps = 0;
  for (int h = 3; h <= 8; ++h) {
    for (int w = 3; w <= 8; ++w) {
      const Tensor target = uniform({1, 1, h, w}, rng, -2.0, 2.0);
      const Tensor weights = uniform({1, 9, h, w}, rng, -1.0, 1.0);
      std::vector<double> off(static_cast<std::size_t>(18 * h * w));
      std::uniform_real_distribution<double> d(-2.5, 2.5);
      for (int ch = 0; ch < 18; ++ch)
        for (int i = 0; i < h * w; ++i) off[static_cast<std::size_t>(ch * h * w + i)] = (ch / 2 == 4) ? 0.0 : d(rng);
      const Tensor offsets({1, 18, h, w}, off);
      const Tensor out = apply_update(target, KernelField{weights, offsets, 3});
      const std::vector<double> img(target.data().begin(), target.data().end());
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          double acc = 0.0;
          for (int j = 0; j < 9; ++j) {
            const double dy = off[static_cast<std::size_t>((2 * j) * h * w + y * w + x)];
            const double dx = off[static_cast<std::size_t>((2 * j + 1) * h * w + y * w + x)];
            acc += weights.at(0, j, y, x) * bilinear_clamped(img, h, w, y + j / 3 - 1 + dy, x + j % 3 - 1 + dx);
          }
          const double want = img[static_cast<std::size_t>(y * w + x)] + acc;
          worst = std::max(worst, std::abs(want - out.at(0, 0, y, x)));
        }
      }
      ++maps;
    }
  }
  report(3, worst < 1e-12,
         std::to_string(maps) + " maps H,W in 3..8: max |apply_update - loop| " + fmt("%.2e", worst) + " (< 1e-12)");
}

// ---------------------------------------------------------------- 4

void criterion4() {
  std::mt19937_64 rng(404);
  bool dense = true, kept = true, bounded = true;
  std::uniform_real_distribution<double> log_density(std::log(0.001), std::log(0.5));
  std::uniform_real_distribution<double> depth(500.0, 9000.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double density = std::exp(log_density(rng));
    const int total = kSize * kSize;
    const int n = std::max(1, static_cast<int>(std::lround(density * total)));
    std::vector<int> idx(static_cast<std::size_t>(total));
    for (int i = 0; i < total; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    DepthMap sparse(kSize, kSize);
    double lo = INFINITY, hi = -INFINITY;
    for (int i = 0; i < n; ++i) {
      const double v = depth(rng);
      sparse.depth[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = v;
      sparse.valid[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = 1;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const DepthMap out = prefill(sparse, kMaxDepth);
    dense = dense && out.fully_valid();
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (sparse.valid[i]) kept = kept && out.depth[i] == sparse.depth[i];
      bounded = bounded && out.depth[i] >= lo && out.depth[i] <= hi;
    }
  }
  report(4, dense && kept && bounded,
         std::string("100 masks, densities 0.1%-50% on 64x64: dense ") + (dense ? "yes" : "NO") +
             ", seeds bit-exact " + (kept ? "yes" : "NO") + ", within seed range " + (bounded ? "yes" : "NO"));
}

// ---------------------------------------------------------------- 5

void criterion5(const std::vector<DepthSample>& samples) {
  DepthMap gt(1, 1), pred(1, 1);
  gt.set(0, 0, 2000.0);
  pred.set(0, 0, 2500.0);
  const MetricReport r = metrics(pred, gt);
  const bool hand = r.rmse_mm == 500.0 && r.mae_mm == 500.0 && r.rel == 0.25 &&
                    std::abs(r.irmse_per_km - 100.0) < 1e-12 && std::abs(r.imae_per_km - 100.0) < 1e-12 &&
                    r.delta1 == 0.0 && r.delta2 == 100.0 && r.delta3 == 100.0;
  bool self = true;
  int maps = 0;
  for (const DepthSample& s : samples) {
    for (const DepthMap* m : {&s.gt, &s.sparse}) {
      const MetricReport q = metrics(*m, *m);
      self = self && q.rmse_mm == 0.0 && q.mae_mm == 0.0 && q.irmse_per_km == 0.0 && q.imae_per_km == 0.0 &&
             q.rel == 0.0 && q.delta1 == 100.0 && q.delta2 == 100.0 && q.delta3 == 100.0;
      ++maps;
    }
  }
  report(5, hand && self,
         "single pixel: RMSE " + fmt("%.6g", r.rmse_mm) + " MAE " + fmt("%.6g", r.mae_mm) + " REL " +
             fmt("%.6g", r.rel) + " iRMSE " + fmt("%.12g", r.irmse_per_km) + " iMAE " + fmt("%.12g", r.imae_per_km) +
             " d1/d2/d3 " + fmt("%g", r.delta1) + "/" + fmt("%g", r.delta2) + "/" + fmt("%g", r.delta3) +
             "; metrics(x,x) exact on " + std::to_string(maps) + " synthetic maps: " + (self ? "yes" : "NO"));
}

// ---------------------------------------------------------------- 6

void criterion6() {
  const std::vector<double> w = iteration_weights(4, 0.8);
  const std::vector<double> want{0.512, 0.64, 0.8, 1.0};
  double worst = w.size() == want.size() ? 0.0 : INFINITY;
  for (std::size_t i = 0; i < std::min(w.size(), want.size()); ++i) worst = std::max(worst, std::abs(w[i] - want[i]));
  std::string list;
  for (double v : w) list += (list.empty() ? "" : ", ") + fmt("%.17g", v);
  report(6, worst <= 1e-15, "weights [" + list + "], max deviation " + fmt("%.1e", worst) + " (<= 1e-15)");
}

// ---------------------------------------------------------------- 7-12

struct Workspace {
  fs::path root;
  fs::path train() const { return root / "train"; }
  fs::path held_out() const { return root / "heldout"; }
  fs::path lines(int k) const { return root / ("heldout_lines" + std::to_string(k)); }
};

int cli(const std::vector<std::string>& args, std::string* captured = nullptr) {
  std::ostringstream out;
  const int code = run_cli(args, out, std::cerr);
  if (captured) *captured = out.str();
  if (code != 0) std::cerr << "lrru " << args.front() << " exited with " << code << "\n";
  return code;
}

void synth_set(const fs::path& dir, int count, std::uint64_t seed, const std::string& sparsity) {
  if (cli({"synth", "--out", dir.string(), "--count", std::to_string(count), "--size",
           std::to_string(kSize) + "x" + std::to_string(kSize), "--seed", std::to_string(seed), "--sparsity",
           sparsity, "--max-depth", fmt("%g", kMaxDepth), "--force"}) != 0) {
    throw lrru::Error("dataset synthesis failed for " + dir.string());
  }
}

LrruConfig acceptance_config(bool depth_only) {
  LrruConfig cfg = LrruConfig::mini();
  cfg.max_depth_mm = kMaxDepth;
  cfg.depth_only = depth_only;
  cfg.seed = 7;
  return cfg;
}

struct TrainedModel {
  Checkpoint ckpt;
  LrruConfig cfg;
  std::vector<json> log;
  double seconds = 0.0;
};

TrainedModel train_via_cli(const Workspace& ws, const std::string& name, const LrruConfig& cfg, bool with_val) {
  const fs::path cfg_path = ws.root / (name + ".json");
  write_file_atomic(cfg_path, to_json(cfg).dump(2));
  std::vector<std::string> args{"train", "--config", cfg_path.string(), "--data", ws.train().string(), "--out",
                                (ws.root / name).string()};
  if (with_val) {
    args.push_back("--val");
    args.push_back(ws.held_out().string());
  }
  TrainedModel m;
  m.cfg = cfg;
  const auto t0 = Clock::now();
  std::string ndjson;
  if (cli(args, &ndjson) != 0) throw lrru::Error("training failed for " + name);
  m.seconds = seconds_since(t0);
  std::istringstream lines(ndjson);
  for (std::string line; std::getline(lines, line);) m.log.push_back(json::parse(line));
  m.ckpt = load_checkpoint(ws.root / name / "model.ckpt");
  return m;
}

std::string join(const std::vector<double>& v, const char* f = "%.1f") {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " / ") + fmt(f, x);
  return s;
}

void criterion7(const TrainedModel& m, const IterationEval& ev, const std::vector<DepthSample>& train_data) {
  // Determinism: two fresh one-epoch runs agree bit for bit with each other
  // and with the first epoch of the full run.
  LrruConfig one = m.cfg;
  one.optimizer.epochs = 1;
  const TrainResult a = train(train_data, one), b = train(train_data, one);
  bool same_params = a.params.size() == b.params.size();
  for (std::size_t i = 0; same_params && i < a.params.size(); ++i) {
    const auto x = a.params.tensors()[i].data(), y = b.params.tensors()[i].data();
    same_params = std::equal(x.begin(), x.end(), y.begin(), y.end());
  }
  const double first_loss = m.log.front()["loss"].get<double>();
  const bool deterministic =
      same_params && a.log.epochs[0].loss == b.log.epochs[0].loss && a.log.epochs[0].loss == first_loss;

  const double ratio = ev.rmse_mm.back() / ev.rmse_mm.front();
  const int epochs = static_cast<int>(m.log.size());
  const bool pass = ratio <= 0.5 && epochs <= 40 && m.seconds < 1200.0 && deterministic;
  report(7, pass,
         "held-out RMSE prefill " + fmt("%.1f", ev.rmse_mm.front()) + " mm -> final " + fmt("%.1f", ev.rmse_mm.back()) +
             " mm, ratio " + fmt("%.3f", ratio) + " (<= 0.5); " + std::to_string(epochs) + " epochs, training " +
             fmt("%.0f", m.seconds) + " s (< 1200 s); deterministic " + (deterministic ? "yes" : "NO") +
             "; train loss " + fmt("%.4g", first_loss) + " -> " + fmt("%.4g", m.log.back()["loss"].get<double>()));
}

void criterion8(const IterationEval& ev) {
  int steps = 0;
  for (std::size_t t = 1; t < ev.rmse_mm.size(); ++t) steps += ev.rmse_mm[t] <= ev.rmse_mm[t - 1];
  report(8, steps >= 3,
         "held-out RMSE by stage " + join(ev.rmse_mm) + " mm; non-increasing on " + std::to_string(steps) +
             " of 4 updates (>= 3)");
}

DepthMap mirror(const DepthMap& m) {
  DepthMap out(m.height, m.width);
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x) {
      const std::size_t i = m.index(y, m.width - 1 - x), o = out.index(y, x);
      out.depth[o] = m.depth[i];
      out.valid[o] = m.valid[i];
    }
  return out;
}

RgbImage mirror(const RgbImage& im) {
  RgbImage out(im.height, im.width);
  for (int y = 0; y < im.height; ++y)
    for (int x = 0; x < im.width; ++x)
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = im.at(y, im.width - 1 - x, c);
  return out;
}

// Left half copied onto the mirrored right half.
DepthMap symmetrise(const DepthMap& m) {
  DepthMap out = m;
  for (int y = 0; y < m.height; ++y)
    for (int x = m.width / 2; x < m.width; ++x) {
      out.depth[out.index(y, x)] = m.depth[m.index(y, m.width - 1 - x)];
      out.valid[out.index(y, x)] = m.valid[m.index(y, m.width - 1 - x)];
    }
  return out;
}

RgbImage symmetrise(const RgbImage& im) {
  RgbImage out = im;
  for (int y = 0; y < im.height; ++y)
    for (int x = im.width / 2; x < im.width; ++x)
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = im.at(y, im.width - 1 - x, c);
  return out;
}

void criterion9(const TrainedModel& m, const std::vector<DepthSample>& held_out) {
  double worst_def = 0.0, worst_sym = 0.0;
  for (const DepthSample& s : held_out) {
    const DepthMap tta = infer(s.rgb, s.sparse, m.ckpt.params, m.cfg, true);
    const DepthMap plain = infer(s.rgb, s.sparse, m.ckpt.params, m.cfg, false);
    const DepthMap flipped = mirror(infer(mirror(*s.rgb), mirror(s.sparse), m.ckpt.params, m.cfg, false));
    for (std::size_t i = 0; i < tta.size(); ++i) {
      worst_def = std::max(worst_def, std::abs(tta.depth[i] - 0.5 * (plain.depth[i] + flipped.depth[i])));
    }
    const RgbImage rgb = symmetrise(*s.rgb);
    const DepthMap sparse = symmetrise(s.sparse);
    const DepthMap sym_tta = infer(rgb, sparse, m.ckpt.params, m.cfg, true);
    const DepthMap sym_plain = infer(rgb, sparse, m.ckpt.params, m.cfg, false);
    for (std::size_t i = 0; i < sym_tta.size(); ++i) {
      worst_sym = std::max(worst_sym, std::abs(sym_tta.depth[i] - sym_plain.depth[i]));
    }
  }
  report(9, worst_def <= 1e-12 && worst_sym <= 1e-9,
         "TTA vs mean of plain and flipped-back output: max diff " + fmt("%.2e", worst_def) +
             " mm (<= 1e-12); mirror-symmetric inputs, TTA vs plain: max diff " + fmt("%.3e", worst_sym) +
             " mm (<= 1e-9)");
}

void criterion10(const Workspace& ws) {
  std::vector<double> rmse;
  for (int k : {2, 4, 8}) {
    synth_set(ws.lines(k), kHeldOutCount, kHeldOutSeed, "lines:" + std::to_string(k));
    const fs::path pred = ws.root / ("pred_lines" + std::to_string(k));
    const fs::path rep = ws.root / ("report_lines" + std::to_string(k) + ".json");
    if (cli({"infer", "--ckpt", (ws.root / "rgb" / "model.ckpt").string(), "--in", ws.lines(k).string(), "--out",
             pred.string()}) != 0 ||
        cli({"eval", "--pred", pred.string(), "--gt", ws.lines(k).string(), "--report", rep.string()}) != 0) {
      throw lrru::Error("inference or evaluation failed for lines:" + std::to_string(k));
    }
    rmse.push_back(json::parse(read_file(rep))["mean"]["rmse_mm"].get<double>());
  }
  const bool pass = rmse[0] <= rmse[1] && rmse[1] <= rmse[2];
  report(10, pass, "cmd_eval RMSE at lines:2 / lines:4 / lines:8 = " + join(rmse) + " mm (non-decreasing)");
}

void criterion11(const Workspace& ws, const std::vector<DepthSample>& held_out) {
  const TrainedModel d = train_via_cli(ws, "depth_only", acceptance_config(true), false);
  std::vector<DepthSample> no_rgb = held_out;
  for (DepthSample& s : no_rgb) s.rgb.reset();
  const IterationEval ev = evaluate_iterations(no_rgb, d.ckpt.params, d.cfg);
  report(11, ev.rmse_mm.back() < ev.rmse_mm.front(),
         "depth-only model trained in " + fmt("%.0f", d.seconds) + " s; held-out RMSE prefill " +
             fmt("%.1f", ev.rmse_mm.front()) + " mm -> final " + fmt("%.1f", ev.rmse_mm.back()) + " mm (stages " +
             join(ev.rmse_mm) + ")");
}

void criterion12(const Workspace& ws) {
  const fs::path stats = ws.root / "diag.json";
  std::string stdout_text;
  if (cli({"diag", "--ckpt", (ws.root / "rgb" / "model.ckpt").string(), "--data", ws.held_out().string(), "--out",
           stats.string()},
          &stdout_text) != 0) {
    throw lrru::Error("diagnostics failed");
  }
  const json j = json::parse(read_file(stats));
  std::vector<double> mean, max;
  for (const json& r : j) {
    mean.push_back(r["mean_dist_px"].get<double>());
    max.push_back(r["max_dist_px"].get<double>());
  }
  const bool emitted = mean.size() == 4;
  const bool trend = emitted && mean.front() > mean.back();
  report(12, emitted && trend,
         "cmd_diag mean distance per iteration " + join(mean, "%.3f") + " px, max " + join(max, "%.2f") +
             " px; long-to-short trend (iter 1 mean > iter 4 mean) " + (trend ? "observed" : "not observed") +
             " (reported, not gated)",
         !emitted);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  std::string work = (fs::temp_directory_path() / "lrru_acceptance").string();
  bool keep = false;
  app.add_option("--only", only, "Run only these criteria (1-12)")->delimiter(',');
  app.add_option("--work", work, "Scratch directory for datasets and checkpoints");
  app.add_flag("--keep", keep, "Keep the scratch directory");
  CLI11_PARSE(app, argc, argv);
  const std::set<int> selected(only.begin(), only.end());
  const auto want = [&](int id) { return selected.empty() || selected.count(id) != 0; };
  const auto t0 = Clock::now();

  try {
    if (want(1)) criterion1();
    if (want(2)) criterion2();
    if (want(3)) criterion3();
    if (want(4)) criterion4();

    const bool need_data = want(5) || std::any_of(selected.begin(), selected.end(), [](int id) { return id >= 7; }) ||
                           selected.empty();
    if (!need_data && want(6)) criterion6();
    if (need_data) {
      Workspace ws{work};
      fs::remove_all(ws.root);
      fs::create_directories(ws.root);
      synth_set(ws.train(), kTrainCount, kTrainSeed, "random:500");
      synth_set(ws.held_out(), kHeldOutCount, kHeldOutSeed, "random:500");
      const std::vector<DepthSample> train_data = load_dataset(ws.train());
      const std::vector<DepthSample> held_out = load_dataset(ws.held_out());
      if (want(5)) {
        std::vector<DepthSample> all = train_data;
        all.insert(all.end(), held_out.begin(), held_out.end());
        criterion5(all);
      }
      if (want(6)) criterion6();
      if (want(7) || want(8) || want(9) || want(10) || want(12)) {
        const TrainedModel m = train_via_cli(ws, "rgb", acceptance_config(false), true);
        const IterationEval ev = evaluate_iterations(held_out, m.ckpt.params, m.cfg);
        if (want(7)) criterion7(m, ev, train_data);
        if (want(8)) criterion8(ev);
        if (want(9)) criterion9(m, held_out);
        if (want(10)) criterion10(ws);
        if (want(12)) criterion12(ws);
      }
      if (want(11)) criterion11(ws, held_out);
      if (!keep) fs::remove_all(ws.root);
    }
  } catch (const std::exception& e) {
    std::cout << "[FAIL] aborted: " << e.what() << std::endl;
    return 1;
  }
  std::cout << (g_failures == 0 ? "all gated criteria passed" : std::to_string(g_failures) + " gated criteria failed")
            << " (" << fmt("%.0f", seconds_since(t0)) << " s)" << std::endl;
  return g_failures == 0 ? 0 : 1;
}
