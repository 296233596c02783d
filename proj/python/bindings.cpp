// Python bindings for the core operations: pooling, segmentation,
// decomposition, detection, metrics and the scene generator.

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dynabg/detection.hpp"
#include "dynabg/evaluation.hpp"
#include "dynabg/image_io.hpp"

namespace py = pybind11;
using namespace dynabg;

namespace {

Frame frame_from_array(const py::array_t<std::uint8_t, py::array::c_style>& array) {
  if (array.ndim() != 2) {
    throw std::invalid_argument("expected a 2-d uint8 array (height, width)");
  }
  Frame f(static_cast<int>(array.shape(1)), static_cast<int>(array.shape(0)));
  std::copy(array.data(), array.data() + array.size(), f.data.begin());
  return f;
}

py::array_t<std::uint8_t> frame_to_array(const Frame& f) {
  py::array_t<std::uint8_t> array({f.height, f.width});
  std::copy(f.data.begin(), f.data.end(), array.mutable_data());
  return array;
}

FrameSequence sequence_from_array(
    const py::array_t<std::uint8_t, py::array::c_style>& array) {
  if (array.ndim() != 3) {
    throw std::invalid_argument("expected a 3-d uint8 array (frames, height, width)");
  }
  FrameSequence seq;
  const auto n = array.shape(0);
  const auto h = static_cast<int>(array.shape(1));
  const auto w = static_cast<int>(array.shape(2));
  const std::size_t per_frame = static_cast<std::size_t>(h) * w;
  for (py::ssize_t k = 0; k < n; ++k) {
    Frame f(w, h);
    std::copy(array.data() + k * static_cast<py::ssize_t>(per_frame),
              array.data() + (k + 1) * static_cast<py::ssize_t>(per_frame),
              f.data.begin());
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

py::array_t<std::uint8_t> sequence_to_array(const FrameSequence& seq) {
  seq.validate();
  py::array_t<std::uint8_t> array(
      {static_cast<py::ssize_t>(seq.size()), static_cast<py::ssize_t>(seq.height()),
       static_cast<py::ssize_t>(seq.width())});
  auto* out = array.mutable_data();
  for (const Frame& f : seq.frames) {
    out = std::copy(f.data.begin(), f.data.end(), out);
  }
  return array;
}

WeightMode parse_weight_mode(const std::string& name) {
  if (name == "sqrt") return WeightMode::Sqrt;
  if (name == "linear") return WeightMode::Linear;
  throw std::invalid_argument("weight_mode must be 'sqrt' or 'linear'");
}

SolverConfig solver_config(std::optional<double> lambda, double mu0, double rho,
                           double tol, int max_iter, bool trace) {
  SolverConfig config;
  config.lambda = lambda;
  config.mu0 = mu0;
  config.rho = rho;
  config.tol = tol;
  config.max_iter = max_iter;
  config.trace = trace;
  return config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Moving-object detection in dynamic backgrounds";
  m.attr("__version__") = DYNABG_VERSION;

  // ---- imaging ----
  m.def("to_grayscale", &to_grayscale, py::arg("r"), py::arg("g"), py::arg("b"));
  m.def(
      "stack",
      [](const py::array_t<std::uint8_t, py::array::c_style>& frames) {
        return stack(sequence_from_array(frames));
      },
      py::arg("frames"), "Stack (frames, height, width) uint8 into a pixels-by-frames matrix");
  m.def(
      "unstack",
      [](const Eigen::MatrixXd& matrix, int width, int height) {
        return sequence_to_array(unstack(matrix, width, height));
      },
      py::arg("matrix"), py::arg("width"), py::arg("height"));
  m.def(
      "load_sequence",
      [](const std::string& directory, const std::string& pattern, int downscale) {
        return sequence_to_array(load_sequence(directory, pattern, downscale));
      },
      py::arg("directory"), py::arg("pattern") = "*", py::arg("downscale") = 1);
  m.def(
      "save_frame",
      [](const py::array_t<std::uint8_t, py::array::c_style>& frame,
         const std::string& file) { save_frame(frame_from_array(frame), file); },
      py::arg("frame"), py::arg("file"));

  // ---- gaussian max-pooling ----
  m.def("conditional_prob", &conditional_prob, py::arg("u_prime"), py::arg("u"),
        py::arg("sigma"));
  m.def(
      "stable_value",
      [](const std::vector<std::uint8_t>& window, double sigma) {
        return static_cast<int>(stable_value(window, sigma));
      },
      py::arg("window"), py::arg("sigma") = 10.0);
  m.def(
      "pool_frame",
      [](const py::array_t<std::uint8_t, py::array::c_style>& frame, int window,
         double sigma) {
        return frame_to_array(
            pool_frame(frame_from_array(frame), {.window_size = window, .sigma = sigma}));
      },
      py::arg("frame"), py::arg("window") = 5, py::arg("sigma") = 10.0);
  m.def(
      "pool_sequence",
      [](const py::array_t<std::uint8_t, py::array::c_style>& frames, int window,
         double sigma) {
        return sequence_to_array(pool_sequence(sequence_from_array(frames),
                                               {.window_size = window, .sigma = sigma}));
      },
      py::arg("frames"), py::arg("window") = 5, py::arg("sigma") = 10.0);

  // ---- partitions & segmentation ----
  py::class_<PartitionStats>(m, "PartitionStats")
      .def_readonly("group_count", &PartitionStats::group_count)
      .def_readonly("entry_count", &PartitionStats::entry_count)
      .def_readonly("min_size", &PartitionStats::min_size)
      .def_readonly("max_size", &PartitionStats::max_size)
      .def_readonly("mean_size", &PartitionStats::mean_size)
      .def_readonly("size_histogram", &PartitionStats::size_histogram);

  py::class_<GroupPartition>(m, "GroupPartition")
      .def_static("from_labels", &GroupPartition::from_labels, py::arg("labels"))
      .def_static("singletons", &GroupPartition::singletons, py::arg("rows"),
                  py::arg("cols"))
      .def_static("whole_columns", &GroupPartition::whole_columns, py::arg("rows"),
                  py::arg("cols"))
      .def_property_readonly("rows", [](const GroupPartition& p) { return p.rows; })
      .def_property_readonly("cols", [](const GroupPartition& p) { return p.cols; })
      .def_property_readonly("group_count",
                             [](const GroupPartition& p) { return p.group_count(); })
      .def("labels", &GroupPartition::labels)
      .def("validate", &GroupPartition::validate)
      .def("stats", [](const GroupPartition& p) { return partition_stats(p); })
      .def("save", [](const GroupPartition& p, const std::string& file) {
        save_partition(p, file);
      })
      .def_static("load", [](const std::string& file) { return load_partition(file); });

  m.def(
      "video_segmentation",
      [](const py::array_t<std::uint8_t, py::array::c_style>& frames, int superpixels,
         double compactness, double merge_threshold, double center_threshold,
         double similarity_threshold) {
        SegmentationConfig config;
        config.target_superpixels = superpixels;
        config.compactness = compactness;
        config.merge_threshold = merge_threshold;
        config.center_threshold = center_threshold;
        config.similarity_threshold = similarity_threshold;
        return video_segmentation(sequence_from_array(frames), config);
      },
      py::arg("frames"), py::arg("superpixels") = 200, py::arg("compactness") = 10.0,
      py::arg("merge_threshold") = 12.0, py::arg("center_threshold") = 20.0,
      py::arg("similarity_threshold") = 8.0);

  // ---- solver ----
  py::class_<Decomposition>(m, "Decomposition")
      .def_readonly("A", &Decomposition::A)
      .def_readonly("E", &Decomposition::E)
      .def_readonly("Y", &Decomposition::Y)
      .def_readonly("iterations", &Decomposition::iterations)
      .def_readonly("final_residual", &Decomposition::final_residual)
      .def_readonly("objective", &Decomposition::objective)
      .def_readonly("converged", &Decomposition::converged)
      .def_readonly("rank", &Decomposition::rank);

  m.def(
      "svd_economy",
      [](const Eigen::MatrixXd& matrix) {
        const SvdResult r = svd_economy(matrix);
        return py::make_tuple(r.U, r.S, r.V);
      },
      py::arg("matrix"));
  m.def("svt", &svt, py::arg("matrix"), py::arg("tau"));
  m.def("l1_shrink", &l1_shrink, py::arg("matrix"), py::arg("t"));
  m.def("generalized_l21_norm", &generalized_l21_norm, py::arg("matrix"),
        py::arg("partition"));
  m.def(
      "group_shrink",
      [](const Eigen::MatrixXd& matrix, const GroupPartition& partition, double lambda,
         double mu, const std::string& weight_mode) {
        return group_shrink(matrix, partition, lambda, mu, parse_weight_mode(weight_mode));
      },
      py::arg("matrix"), py::arg("partition"), py::arg("lambda_"), py::arg("mu"),
      py::arg("weight_mode") = "sqrt");
  m.def(
      "solve_rpca",
      [](const Eigen::MatrixXd& d, std::optional<double> lambda, double mu0, double rho,
         double tol, int max_iter, bool trace) {
        return solve_rpca(d, solver_config(lambda, mu0, rho, tol, max_iter, trace));
      },
      py::arg("d"), py::arg("lambda_") = std::nullopt, py::arg("mu0") = 1e-6,
      py::arg("rho") = 1.1, py::arg("tol") = 1e-7, py::arg("max_iter") = 1000,
      py::arg("trace") = false);
  m.def(
      "solve_sc_rpca",
      [](const Eigen::MatrixXd& d, const GroupPartition& partition,
         std::optional<double> lambda, double mu0, double rho, double tol, int max_iter,
         const std::string& weight_mode, bool trace) {
        return solve_sc_rpca(d, partition,
                             solver_config(lambda, mu0, rho, tol, max_iter, trace),
                             parse_weight_mode(weight_mode));
      },
      py::arg("d"), py::arg("partition"), py::arg("lambda_") = std::nullopt,
      py::arg("mu0") = 1e-6, py::arg("rho") = 1.1, py::arg("tol") = 1e-7,
      py::arg("max_iter") = 1000, py::arg("weight_mode") = "sqrt",
      py::arg("trace") = false);

  // ---- detection ----
  m.def(
      "binarize",
      [](const Eigen::MatrixXd& e, double epsilon, int width, int height) {
        return sequence_to_array(binarize(e, epsilon, width, height));
      },
      py::arg("e"), py::arg("epsilon"), py::arg("width"), py::arg("height"));
  m.def(
      "detect",
      [](const py::array_t<std::uint8_t, py::array::c_style>& frames,
         const std::string& mode, int window, double sigma, int superpixels,
         double compactness, double merge_threshold, double center_threshold,
         double similarity_threshold, std::optional<double> lambda, double mu0,
         double rho, double tol, int max_iter, double epsilon,
         const std::string& weight_mode) {
        DetectionConfig config;
        config.mode = parse_pipeline_mode(mode);
        config.pooling = {.window_size = window, .sigma = sigma};
        config.segmentation.target_superpixels = superpixels;
        config.segmentation.compactness = compactness;
        config.segmentation.merge_threshold = merge_threshold;
        config.segmentation.center_threshold = center_threshold;
        config.segmentation.similarity_threshold = similarity_threshold;
        config.solver = solver_config(lambda, mu0, rho, tol, max_iter, false);
        config.binarize_epsilon = epsilon;
        config.weight_mode = parse_weight_mode(weight_mode);
        const DetectionResult result = detect(sequence_from_array(frames), config);
        py::dict out;
        out["masks"] = sequence_to_array(result.masks);
        out["decomposition"] = result.decomposition;
        out["partition"] = result.partition.rows > 0
                               ? py::cast(result.partition)
                               : py::none().cast<py::object>();
        out["features"] = sequence_to_array(result.features);
        return out;
      },
      py::arg("frames"), py::arg("mode") = "sc-rpca-stable", py::arg("window") = 5,
      py::arg("sigma") = 10.0, py::arg("superpixels") = 200,
      py::arg("compactness") = 10.0, py::arg("merge_threshold") = 12.0,
      py::arg("center_threshold") = 20.0, py::arg("similarity_threshold") = 8.0,
      py::arg("lambda_") = std::nullopt, py::arg("mu0") = 1e-6, py::arg("rho") = 1.1,
      py::arg("tol") = 1e-7, py::arg("max_iter") = 1000,
      py::arg("epsilon") = 1e-6 * 255.0, py::arg("weight_mode") = "sqrt");

  // ---- evaluation ----
  py::class_<ConfusionCounts>(m, "ConfusionCounts")
      .def(py::init<>())
      .def_readwrite("tp", &ConfusionCounts::tp)
      .def_readwrite("fn", &ConfusionCounts::fn)
      .def_readwrite("fp", &ConfusionCounts::fp)
      .def_readwrite("evaluated", &ConfusionCounts::evaluated)
      .def("tn", &ConfusionCounts::tn)
      .def("__iadd__", &ConfusionCounts::operator+=);
  py::class_<MetricReport>(m, "MetricReport")
      .def_readonly("recall", &MetricReport::recall)
      .def_readonly("precision", &MetricReport::precision)
      .def_readonly("f_measure", &MetricReport::f_measure)
      .def_readonly("degenerate", &MetricReport::degenerate);

  m.def(
      "compare",
      [](const py::array_t<std::uint8_t, py::array::c_style>& mask,
         const py::array_t<std::uint8_t, py::array::c_style>& gt,
         std::optional<py::array_t<std::uint8_t, py::array::c_style>> roi) {
        const Frame mask_frame = frame_from_array(mask);
        const Frame gt_frame = frame_from_array(gt);
        if (roi) {
          const Frame roi_frame = frame_from_array(*roi);
          return compare(mask_frame, gt_frame, &roi_frame);
        }
        return compare(mask_frame, gt_frame, nullptr);
      },
      py::arg("mask"), py::arg("gt"), py::arg("roi") = std::nullopt);
  m.def("metrics", &metrics, py::arg("counts"));
  m.def(
      "evaluate_sequence",
      [](const py::array_t<std::uint8_t, py::array::c_style>& masks,
         const std::string& gt_dir) {
        return evaluate_sequence(sequence_from_array(masks), gt_dir);
      },
      py::arg("masks"), py::arg("gt_dir"));

  m.def(
      "synth_scene",
      [](const std::string& kind, int width, int height, int frames, int object_size,
         double x0, double y0, double velocity_x, double velocity_y, int object_level,
         int background_level, double wave_amplitude, double wave_period,
         double snow_rate, double noise_sigma, std::uint64_t seed) {
        SceneConfig config;
        config.kind = parse_background_kind(kind);
        config.width = width;
        config.height = height;
        config.frame_count = frames;
        config.object_size = object_size;
        config.object_x0 = x0;
        config.object_y0 = y0;
        config.velocity_x = velocity_x;
        config.velocity_y = velocity_y;
        config.object_level = static_cast<std::uint8_t>(object_level);
        config.background_level = static_cast<std::uint8_t>(background_level);
        config.wave_amplitude = wave_amplitude;
        config.wave_period = wave_period;
        config.snow_rate = snow_rate;
        config.noise_sigma = noise_sigma;
        config.seed = seed;
        const SynthScene scene = synth_scene(config);
        return py::make_tuple(sequence_to_array(scene.frames),
                              sequence_to_array(scene.ground_truth));
      },
      py::arg("kind") = "static", py::arg("width") = 64, py::arg("height") = 64,
      py::arg("frames") = 30, py::arg("object_size") = 16, py::arg("x0") = 4.0,
      py::arg("y0") = 24.0, py::arg("velocity_x") = 1.5, py::arg("velocity_y") = 0.0,
      py::arg("object_level") = 230, py::arg("background_level") = 120,
      py::arg("wave_amplitude") = 25.0, py::arg("wave_period") = 16.0,
      py::arg("snow_rate") = 8.0, py::arg("noise_sigma") = 0.0, py::arg("seed") = 0);
}
