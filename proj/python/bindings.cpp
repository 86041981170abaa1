#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "lrru/checkpoint.hpp"
#include "lrru/cli.hpp"
#include "lrru/config.hpp"
#include "lrru/error.hpp"
#include "lrru/gradcheck_suite.hpp"
#include "lrru/guidance.hpp"
#include "lrru/metrics.hpp"
#include "lrru/pipeline.hpp"
#include "lrru/png_io.hpp"
#include "lrru/prefill.hpp"
#include "lrru/synth.hpp"
#include "lrru/train.hpp"

namespace py = pybind11;
using namespace lrru;
using nlohmann::json;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Depth maps cross the boundary as float64 (H, W) arrays with 0 = invalid.
DepthMap to_depth(const Array& a) {
  if (a.ndim() != 2) throw DimensionError("depth arrays must be 2-D (H, W)");
  DepthMap m(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  const double* p = a.data();
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < 0.0) throw DataError("depth values must be finite and non-negative");
    if (p[i] > 0.0) {
      m.depth[i] = p[i];
      m.valid[i] = 1;
    }
  }
  return m;
}

Array from_depth(const DepthMap& m) {
  Array a({m.height, m.width});
  double* p = a.mutable_data();
  for (std::size_t i = 0; i < m.size(); ++i) p[i] = m.valid[i] ? m.depth[i] : 0.0;
  return a;
}

RgbImage to_rgb(const Array& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw DimensionError("rgb arrays must be (H, W, 3)");
  RgbImage im(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  std::copy(a.data(), a.data() + im.data.size(), im.data.begin());
  return im;
}

Array from_rgb(const RgbImage& im) {
  Array a({im.height, im.width, 3});
  std::copy(im.data.begin(), im.data.end(), a.mutable_data());
  return a;
}

std::optional<RgbImage> optional_rgb(const std::optional<Array>& a) {
  return a ? std::optional<RgbImage>(to_rgb(*a)) : std::nullopt;
}

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

json from_py(const py::object& o) {
  return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::dict sample_dict(const DepthSample& s) {
  py::dict d;
  d["rgb"] = s.rgb ? py::object(from_rgb(*s.rgb)) : py::none();
  d["sparse"] = from_depth(s.sparse);
  d["gt"] = from_depth(s.gt);
  return d;
}

DepthSample sample_from(const py::handle& h) {
  const py::dict d = py::reinterpret_borrow<py::dict>(h);
  DepthSample s;
  if (d.contains("rgb") && !d["rgb"].is_none()) s.rgb = to_rgb(d["rgb"].cast<Array>());
  s.sparse = to_depth(d["sparse"].cast<Array>());
  s.gt = to_depth(d["gt"].cast<Array>());
  return s;
}

std::vector<DepthSample> samples_from(const py::iterable& items) {
  std::vector<DepthSample> out;
  for (const py::handle& h : items) out.push_back(sample_from(h));
  return out;
}

LrruConfig config_arg(const py::object& cfg) {
  if (cfg.is_none()) return LrruConfig::mini();
  if (py::isinstance<py::str>(cfg)) return LrruConfig::for_variant(cfg.cast<std::string>());
  return config_from_json(from_py(cfg));
}

struct Model {
  LrruConfig cfg;
  ModelParams params;

  std::vector<Array> forward(const std::optional<Array>& rgb, const Array& sparse) const {
    std::vector<Array> out;
    for (const DepthMap& m : lrru_forward(optional_rgb(rgb), to_depth(sparse), params, cfg)) out.push_back(from_depth(m));
    return out;
  }
};

}  // namespace

PYBIND11_MODULE(lrru, m) {
  m.doc() = "Sparse depth completion: pre-fill, recurrent refinement network, metrics and data tools.";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  static py::exception<UsageError> usage(m, "UsageError", error.ptr());
  static py::exception<DataError> data(m, "DataError", error.ptr());
  static py::exception<DimensionError> dim(m, "DimensionError", data.ptr());
  static py::exception<NumericError> numeric(m, "NumericError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DimensionError& e) {
      PyErr_SetString(dim.ptr(), e.what());
    } catch (const DataError& e) {
      PyErr_SetString(data.ptr(), e.what());
    } catch (const UsageError& e) {
      PyErr_SetString(usage.ptr(), e.what());
    } catch (const NumericError& e) {
      PyErr_SetString(numeric.ptr(), e.what());
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), e.what());
    }
  });

  m.def("prefill", [](const Array& sparse, double max_depth_mm) { return from_depth(prefill(to_depth(sparse), max_depth_mm)); },
        py::arg("sparse"), py::arg("max_depth_mm") = 100000.0, "Densify a sparse depth map (mm, 0 = invalid).");

  m.def("metrics", [](const Array& pred, const Array& gt) { return to_py(to_json(metrics(to_depth(pred), to_depth(gt)))); },
        py::arg("pred"), py::arg("gt"));

  m.def("synth_scene",
        [](std::uint64_t seed, int height, int width, double max_depth_mm) {
          const SyntheticScene s = synth_scene(seed, height, width, max_depth_mm);
          py::dict d = sample_dict(s.sample);
          d["labels"] = py::array_t<int>({height, width}, s.labels.data());
          d["first_occluder_label"] = s.first_occluder_label;
          return d;
        },
        py::arg("seed"), py::arg("height") = 64, py::arg("width") = 64, py::arg("max_depth_mm") = 10000.0);
  m.def("synth_sample",
        [](std::uint64_t seed, int height, int width, double max_depth_mm, const std::string& sparsity) {
          return sample_dict(synth_sample(seed, height, width, max_depth_mm, Sparsity::parse(sparsity)));
        },
        py::arg("seed"), py::arg("height") = 64, py::arg("width") = 64, py::arg("max_depth_mm") = 10000.0,
        py::arg("sparsity") = "random:500");
  m.def("sparsify_random", [](const Array& gt, std::size_t n, std::uint64_t seed) { return from_depth(sparsify_random(to_depth(gt), n, seed)); },
        py::arg("gt"), py::arg("n"), py::arg("seed") = 0);
  m.def("sparsify_lines",
        [](const Array& gt, int keep_every, int jitter, std::uint64_t seed) {
          return from_depth(sparsify_lines(to_depth(gt), keep_every, jitter, seed));
        },
        py::arg("gt"), py::arg("keep_every"), py::arg("jitter") = 0, py::arg("seed") = 0);

  m.def("read_depth_png", [](const std::filesystem::path& p) { return from_depth(read_depth_png(p)); });
  m.def("write_depth_png", [](const Array& a, const std::filesystem::path& p) { write_depth_png(to_depth(a), p); });
  m.def("read_rgb_png", [](const std::filesystem::path& p) { return from_rgb(read_rgb_png(p)); });
  m.def("write_rgb_png", [](const Array& a, const std::filesystem::path& p) { write_rgb_png(to_rgb(a), p); });

  m.def("iteration_weights", &iteration_weights, py::arg("iterations") = 4, py::arg("gamma") = 0.8);
  m.def("default_config", [](const std::string& variant) { return to_py(to_json(LrruConfig::for_variant(variant))); },
        py::arg("variant") = "mini");
  m.def("gradient_suite",
        [](std::uint64_t seed) {
          py::dict d;
          for (const GradCheckResult& r : run_gradient_suite(seed)) d[py::str(r.op)] = r.max_rel_error;
          return d;
        },
        py::arg("seed") = 0, "Maximum relative finite-difference error of every differentiable op.");

  py::class_<Model>(m, "Model")
      .def(py::init([](const py::object& config, std::uint64_t seed) {
             Model md{config_arg(config), {}};
             md.params = init_model_params(md.cfg, seed);
             return md;
           }),
           py::arg("config") = py::none(), py::arg("seed") = 0)
      .def_static("load",
                  [](const std::filesystem::path& p) {
                    Checkpoint c = load_checkpoint(p);
                    return Model{config_from_checkpoint(c.metadata), std::move(c.params)};
                  })
      .def("save", [](const Model& md, const std::filesystem::path& p) { save_checkpoint(p, md.params, checkpoint_metadata(md.cfg, 0)); })
      .def_property_readonly("config", [](const Model& md) { return to_py(to_json(md.cfg)); })
      .def_property_readonly("num_parameters", [](const Model& md) { return md.params.total_numel(); })
      .def("infer",
           [](const Model& md, const std::optional<Array>& rgb, const Array& sparse, bool tta) {
             return from_depth(infer(optional_rgb(rgb), to_depth(sparse), md.params, md.cfg, tta));
           },
           py::arg("rgb"), py::arg("sparse"), py::arg("tta") = false)
      .def("forward", &Model::forward, py::arg("rgb"), py::arg("sparse"),
           "Every refined map, first iteration to last.")
      .def("evaluate",
           [](const Model& md, const py::iterable& samples) {
             const IterationEval ev = evaluate_iterations(samples_from(samples), md.params, md.cfg);
             py::dict d;
             d["rmse_mm"] = ev.rmse_mm;
             d["mae_mm"] = ev.mae_mm;
             py::list scope;
             for (const ScopeStats& s : ev.scope) scope.append(py::make_tuple(s.mean_dist_px, s.max_dist_px));
             d["scope"] = scope;
             return d;
           });

  m.def("train",
        [](const py::iterable& samples, const py::object& config, const py::object& validation,
           const std::optional<std::filesystem::path>& checkpoint_dir, const py::object& on_epoch) {
          const std::vector<DepthSample> data = samples_from(samples);
          std::vector<DepthSample> val;
          TrainOptions opt;
          if (!validation.is_none()) {
            val = samples_from(validation);
            opt.validation = &val;
          }
          if (checkpoint_dir) opt.checkpoint_dir = *checkpoint_dir;
          if (!on_epoch.is_none()) opt.on_epoch = [&](const EpochRecord& r) { on_epoch(to_py(to_json(r))); };
          const LrruConfig cfg = config_arg(config);
          TrainResult res = train(data, cfg, opt);
          py::list log;
          for (const EpochRecord& r : res.log.epochs) log.append(to_py(to_json(r)));
          return py::make_tuple(Model{cfg, std::move(res.params)}, log);
        },
        py::arg("samples"), py::arg("config") = py::none(), py::arg("validation") = py::none(),
        py::arg("checkpoint_dir") = py::none(), py::arg("on_epoch") = py::none(),
        "Train on a list of {'rgb', 'sparse', 'gt'} dicts; returns (Model, epoch log).");

  m.def("cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          const int code = run_cli(args, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run an lrru subcommand in-process; returns (exit_code, stdout, stderr).");
}
