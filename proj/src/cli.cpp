#include "lrru/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>

#include "lrru/checkpoint.hpp"
#include "lrru/config.hpp"
#include "lrru/dataset.hpp"
#include "lrru/error.hpp"
#include "lrru/gradcheck_suite.hpp"
#include "lrru/io_util.hpp"
#include "lrru/metrics.hpp"
#include "lrru/parallel.hpp"
#include "lrru/pipeline.hpp"
#include "lrru/png_io.hpp"
#include "lrru/prefill.hpp"
#include "lrru/synth.hpp"
#include "lrru/train.hpp"

namespace lrru {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kGradTolerance = 1e-4;

void require_file(const fs::path& p, const char* what) {
  if (!fs::is_regular_file(p)) throw DataError(std::string(what) + " not found: " + p.string());
}

void require_dir(const fs::path& p, const char* what) {
  if (!fs::is_directory(p)) throw DataError(std::string(what) + " is not a directory: " + p.string());
}

// Parent directory of an output file must exist already.
void require_output_parent(const fs::path& p) {
  const fs::path parent = p.has_parent_path() ? p.parent_path() : fs::path(".");
  if (!fs::is_directory(parent)) throw DataError("output directory does not exist: " + parent.string());
}

void write_json(const fs::path& p, const json& j) { write_file_atomic(p, j.dump(2) + "\n"); }

std::pair<int, int> parse_size(const std::string& text) {
  const auto x = text.find('x');
  std::size_t used_h = 0, used_w = 0;
  int h = 0, w = 0;
  try {
    if (x == std::string::npos) throw std::invalid_argument("");
    h = std::stoi(text.substr(0, x), &used_h);
    w = std::stoi(text.substr(x + 1), &used_w);
  } catch (const std::exception&) {
    throw UsageError("--size must look like HxW, got '" + text + "'");
  }
  if (used_h != x || used_w != text.size() - x - 1 || h <= 0 || w <= 0) {
    throw UsageError("--size must look like HxW, got '" + text + "'");
  }
  return {h, w};
}

// Directory of depth PNGs: `dir/sub` when present, otherwise `dir` itself.
fs::path depth_dir(const fs::path& dir, const char* sub) {
  require_dir(dir, "input");
  if (fs::is_directory(dir / sub) && list_pngs(dir).empty()) return dir / sub;
  return dir;
}

struct InferInput {
  fs::path sparse;
  std::optional<fs::path> rgb;
};

std::vector<InferInput> collect_infer_inputs(const std::vector<std::string>& inputs) {
  std::vector<InferInput> out;
  for (const std::string& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      const bool dataset = fs::is_directory(p / "sparse");
      const fs::path sparse_dir = dataset ? p / "sparse" : p;
      for (const fs::path& f : list_pngs(sparse_dir)) {
        InferInput item{f, std::nullopt};
        if (dataset && fs::is_regular_file(p / "rgb" / f.filename())) item.rgb = p / "rgb" / f.filename();
        out.push_back(item);
      }
    } else {
      require_file(p, "input");
      InferInput item{p, std::nullopt};
      const fs::path sibling = p.parent_path().parent_path() / "rgb" / p.filename();
      if (p.parent_path().filename() == "sparse" && fs::is_regular_file(sibling)) item.rgb = sibling;
      out.push_back(item);
    }
  }
  if (out.empty()) throw DataError("no input depth maps found");
  std::map<fs::path, int> names;
  for (const InferInput& item : out) {
    if (names[item.sparse.filename()]++ > 0) {
      throw UsageError("two inputs share the file name " + item.sparse.filename().string());
    }
  }
  return out;
}

Checkpoint load_model(const fs::path& ckpt) {
  require_file(ckpt, "checkpoint");
  return load_checkpoint(ckpt);
}

// Samples through which the diagnostics and inference commands pass.
std::vector<DepthSample> load_eval_data(const fs::path& dir) {
  require_dir(dir, "data");
  return load_dataset(dir);
}

json scope_records(const IterationEval& ev) {
  json records = json::array();
  for (std::size_t t = 0; t < ev.scope.size(); ++t) {
    records.push_back({{"iteration", t + 1},
                       {"mean_dist_px", ev.scope[t].mean_dist_px},
                       {"max_dist_px", ev.scope[t].max_dist_px}});
  }
  return records;
}

int cmd_synth(const fs::path& out_dir, int count, const std::string& size, std::uint64_t seed,
              const std::string& sparsity_text, double max_depth, bool force, std::ostream& out) {
  if (count < 1) throw UsageError("--count must be at least 1");
  const auto [h, w] = parse_size(size);
  if (h % 8 != 0 || w % 8 != 0) throw UsageError("--size extents must be multiples of 8");
  const Sparsity sparsity = Sparsity::parse(sparsity_text);
  if (fs::exists(out_dir)) {
    require_dir(out_dir, "--out");
    if (!fs::is_empty(out_dir) && !force) {
      throw UsageError(out_dir.string() + " is not empty (use --force to overwrite)");
    }
  }
  std::vector<DepthSample> samples;
  samples.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    samples.push_back(synth_sample(seed + static_cast<std::uint64_t>(i), h, w, max_depth, sparsity));
  }
  if (force) {
    for (const char* sub : {"rgb", "sparse", "gt"}) fs::remove_all(out_dir / sub);
    fs::remove(out_dir / "manifest.json");
  }
  fs::create_directories(out_dir);
  write_dataset(out_dir, samples);
  const json manifest{{"count", count},
                      {"size", std::to_string(h) + "x" + std::to_string(w)},
                      {"height", h},
                      {"width", w},
                      {"seed", seed},
                      {"sparsity", sparsity.str()},
                      {"max_depth_mm", max_depth}};
  write_json(out_dir / "manifest.json", manifest);
  out << manifest.dump() << "\n";
  return kExitOk;
}

int cmd_prefill(const fs::path& in, const fs::path& out_path, double max_depth, std::ostream& out) {
  require_file(in, "--in");
  require_output_parent(out_path);
  const DepthMap sparse = read_depth_png(in);
  const DepthMap dense = prefill(sparse, max_depth);
  write_depth_png(dense, out_path);
  out << json{{"in", in.string()},
              {"out", out_path.string()},
              {"seeds", sparse.valid_count()},
              {"pixels", dense.size()},
              {"invalid", dense.size() - dense.valid_count()}}
             .dump()
      << "\n";
  return kExitOk;
}

int cmd_train(const fs::path& config_path, const fs::path& data_dir, const fs::path& out_dir,
              const std::optional<fs::path>& val_dir, std::ostream& out, std::ostream& err) {
  require_file(config_path, "--config");
  require_dir(data_dir, "--data");
  if (val_dir) require_dir(*val_dir, "--val");
  const LrruConfig cfg = load_config(config_path.string());
  const std::vector<DepthSample> data = load_dataset(data_dir);
  std::vector<DepthSample> val;
  if (val_dir) val = load_dataset(*val_dir);
  fs::create_directories(out_dir);

  TrainOptions opt;
  opt.checkpoint_dir = out_dir;
  if (val_dir) opt.validation = &val;
  std::string log_text;
  opt.on_epoch = [&](const EpochRecord& r) {
    const std::string line = to_json(r).dump();
    log_text += line + "\n";
    write_file_atomic(out_dir / "train_log.ndjson", log_text);
    out << line << "\n" << std::flush;
    err << "epoch " << r.epoch << "  loss " << r.loss << "  lr " << r.lr << "\n";
  };
  train(data, cfg, opt);
  return kExitOk;
}

int cmd_infer(const fs::path& ckpt, const std::vector<std::string>& inputs, const fs::path& out_dir,
              bool tta, std::ostream& out) {
  const std::vector<InferInput> items = collect_infer_inputs(inputs);
  const Checkpoint model = load_model(ckpt);
  const LrruConfig cfg = config_from_checkpoint(model.metadata);

  std::vector<std::pair<fs::path, DepthMap>> preds;
  for (const InferInput& item : items) {
    const DepthMap sparse = read_depth_png(item.sparse);
    std::optional<RgbImage> rgb;
    if (!cfg.depth_only) {
      if (!item.rgb) throw DataError("no RGB image found for " + item.sparse.string());
      rgb = read_rgb_png(*item.rgb);
    }
    preds.emplace_back(item.sparse.filename(), infer(rgb, sparse, model.params, cfg, tta));
  }
  fs::create_directories(out_dir);
  json written = json::array();
  for (const auto& [name, pred] : preds) {
    write_depth_png(pred, out_dir / name);
    written.push_back((out_dir / name).string());
  }
  out << json{{"count", preds.size()}, {"tta", tta}, {"outputs", written}}.dump() << "\n";
  return kExitOk;
}

int cmd_eval(const fs::path& pred_arg, const fs::path& gt_arg, const fs::path& report_path,
             std::ostream& out) {
  const fs::path pred_dir = depth_dir(pred_arg, "gt");
  const fs::path gt_dir = depth_dir(gt_arg, "gt");
  require_output_parent(report_path);
  const std::vector<fs::path> preds = list_pngs(pred_dir);
  if (preds.empty()) throw DataError("no predictions in " + pred_dir.string());

  std::vector<MetricReport> reports;
  json per_image = json::array();
  for (const fs::path& p : preds) {
    const fs::path g = gt_dir / p.filename();
    require_file(g, "ground truth");
    const MetricReport r = metrics(read_depth_png(p), read_depth_png(g));
    json entry = to_json(r);
    entry["file"] = p.filename().string();
    per_image.push_back(entry);
    reports.push_back(r);
  }
  const json report{{"count", reports.size()},
                    {"pred", pred_dir.string()},
                    {"gt", gt_dir.string()},
                    {"mean", to_json(average_reports(reports))},
                    {"per_image", per_image}};
  write_json(report_path, report);
  out << report["mean"].dump() << "\n";
  return kExitOk;
}

int cmd_gradcheck(std::uint64_t seed, std::ostream& out, std::ostream& err) {
  const std::vector<GradCheckResult> results = run_gradient_suite(seed);
  bool ok = true;
  json ops = json::array();
  for (const GradCheckResult& r : results) {
    const bool pass = r.max_rel_error < kGradTolerance;
    ok = ok && pass;
    ops.push_back({{"op", r.op}, {"max_rel_error", r.max_rel_error}, {"pass", pass}});
    err << std::left << std::setw(24) << r.op << std::scientific << std::setprecision(3)
        << r.max_rel_error << (pass ? "  ok" : "  FAIL") << "\n";
  }
  out << json{{"seed", seed}, {"tolerance", kGradTolerance}, {"pass", ok}, {"ops", ops}}.dump() << "\n";
  return ok ? kExitOk : kExitNumeric;
}

int cmd_viz(const fs::path& in, const fs::path& out_path, std::ostream& out) {
  require_file(in, "--in");
  require_output_parent(out_path);
  const DepthMap map = read_depth_png(in);
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (!map.valid[i]) continue;
    lo = std::min(lo, map.depth[i]);
    hi = std::max(hi, map.depth[i]);
  }
  if (!std::isfinite(lo)) throw DataError(in.string() + " has no valid pixels");
  RgbImage image(map.height, map.width);
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      const std::size_t i = map.index(y, x);
      if (!map.valid[i]) continue;
      const double near = hi > lo ? (hi - map.depth[i]) / (hi - lo) : 1.0;
      const Rgb8 c = depth_colormap(static_cast<int>(std::lround(near * 255.0)));
      image.at(y, x, 0) = c.r / 255.0;
      image.at(y, x, 1) = c.g / 255.0;
      image.at(y, x, 2) = c.b / 255.0;
    }
  }
  write_rgb_png(image, out_path);
  fs::path sidecar = out_path;
  sidecar.replace_extension(".json");
  const json meta{{"in", in.string()},       {"min_mm", lo},        {"max_mm", hi},
                  {"valid", map.valid_count()}, {"colormap", "turbo"}, {"near", "warm"},
                  {"invalid_color", "black"}};
  write_json(sidecar, meta);
  out << meta.dump() << "\n";
  return kExitOk;
}

int cmd_diag(const fs::path& ckpt, const fs::path& data_dir, const fs::path& out_path,
             std::ostream& out) {
  require_output_parent(out_path);
  const Checkpoint model = load_model(ckpt);
  const LrruConfig cfg = config_from_checkpoint(model.metadata);
  const std::vector<DepthSample> data = load_eval_data(data_dir);
  const IterationEval ev = evaluate_iterations(data, model.params, cfg);
  const json records = scope_records(ev);
  write_json(out_path, records);
  for (const json& r : records) out << r.dump() << "\n";
  return kExitOk;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return kExitUsage;
  if (dynamic_cast<const NumericError*>(&e)) return kExitNumeric;
  if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const fs::filesystem_error*>(&e)) return kExitData;
  return kExitUsage;
}

}  // namespace

Rgb8 depth_colormap(int index) {
  // Polynomial fit of the Turbo colormap (blue -> red).
  const double t = std::clamp(index, 0, 255) / 255.0;
  const double r = 0.13572138 + t * (4.61539260 + t * (-42.66032258 + t * (132.13108234 + t * (-152.94239396 + t * 59.28637943))));
  const double g = 0.09140261 + t * (2.19418839 + t * (4.84296658 + t * (-14.18503333 + t * (4.27729857 + t * 2.82956604))));
  const double b = 0.10667330 + t * (12.64194608 + t * (-60.58204836 + t * (110.36276771 + t * (-89.90310912 + t * 27.34824973))));
  const auto q = [](double v) { return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
  return {q(r), q(g), q(b)};
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse depth completion with long-short range recurrent updates", "lrru"};
  app.require_subcommand(1);

  std::string out_s, in_s, size = "64x64", sparsity = "random:500", ckpt, data, config, pred, gt, report;
  std::optional<std::string> val;
  std::vector<std::string> inputs;
  int count = 1;
  std::uint64_t seed = 0;
  double max_depth = 10000.0;
  bool force = false, tta = false;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset directory");
  synth->add_option("--out", out_s, "Dataset directory")->required();
  synth->add_option("--count", count, "Number of scenes");
  synth->add_option("--size", size, "Image size HxW");
  synth->add_option("--seed", seed, "Seed of the first scene");
  synth->add_option("--sparsity", sparsity, "random:N or lines:K");
  synth->add_option("--max-depth", max_depth, "Far limit of generated depth in mm");
  synth->add_flag("--force", force, "Overwrite a non-empty directory");

  auto* pre = app.add_subcommand("prefill", "Densify a sparse depth PNG");
  pre->add_option("--in", in_s, "Sparse depth PNG")->required();
  pre->add_option("--out", out_s, "Dense depth PNG")->required();
  pre->add_option("--max-depth", max_depth, "Depth range in mm");

  auto* tr = app.add_subcommand("train", "Train a model");
  tr->add_option("--config", config, "Config JSON")->required();
  tr->add_option("--data", data, "Training dataset directory")->required();
  tr->add_option("--out", out_s, "Checkpoint directory")->required();
  tr->add_option("--val", val, "Validation dataset directory");

  auto* inf = app.add_subcommand("infer", "Complete depth maps with a trained model");
  inf->add_option("--ckpt", ckpt, "Checkpoint")->required();
  inf->add_option("--in", inputs, "Dataset directories or sparse depth PNGs")->required()->expected(1, -1);
  inf->add_option("--out", out_s, "Output directory")->required();
  inf->add_flag("--tta", tta, "Average with the mirrored prediction");

  auto* ev = app.add_subcommand("eval", "Score predictions against ground truth");
  ev->add_option("--pred", pred, "Prediction directory")->required();
  ev->add_option("--gt", gt, "Ground-truth directory")->required();
  ev->add_option("--report", report, "Report JSON")->required();

  auto* gc = app.add_subcommand("gradcheck", "Finite-difference check of every differentiable op");
  gc->add_option("--seed", seed, "Input seed");

  auto* viz = app.add_subcommand("viz", "Colourise a depth PNG");
  viz->add_option("--in", in_s, "Depth PNG")->required();
  viz->add_option("--out", out_s, "Colour PNG")->required();

  auto* diag = app.add_subcommand("diag", "Per-iteration kernel scope statistics");
  diag->add_option("--ckpt", ckpt, "Checkpoint")->required();
  diag->add_option("--data", data, "Dataset directory")->required();
  diag->add_option("--out", out_s, "Statistics JSON")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    apply_thread_env();
    if (synth->parsed()) return cmd_synth(out_s, count, size, seed, sparsity, max_depth, force, out);
    if (pre->parsed()) return cmd_prefill(in_s, out_s, max_depth, out);
    if (tr->parsed()) {
      std::optional<fs::path> val_dir;
      if (val) val_dir = *val;
      return cmd_train(config, data, out_s, val_dir, out, err);
    }
    if (inf->parsed()) return cmd_infer(ckpt, inputs, out_s, tta, out);
    if (ev->parsed()) return cmd_eval(pred, gt, report, out);
    if (gc->parsed()) return cmd_gradcheck(seed, out, err);
    if (viz->parsed()) return cmd_viz(in_s, out_s, out);
    if (diag->parsed()) return cmd_diag(ckpt, data, out_s, out);
  } catch (const std::exception& e) {
    err << "lrru: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitUsage;
}

}  // namespace lrru
