// Batch front end: pooling, video segmentation, moving-object detection,
// evaluation, synthetic scenes and solver benchmarks.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dynabg/detection.hpp"
#include "dynabg/evaluation.hpp"
#include "dynabg/image_io.hpp"
#include "dynabg/parallel.hpp"

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string frame_name(const char* prefix, int index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%06d.png", prefix, index);
  return buf;
}

void write_json(const json& j, const fs::path& file) {
  if (!file.parent_path().empty()) fs::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write: " + file.string());
  out << j.dump(2) << "\n";
}

json solver_json(const dynabg::Decomposition& dec) {
  return {{"iterations", dec.iterations},
          {"residual", dec.final_residual},
          {"converged", dec.converged},
          {"rank", dec.rank},
          {"objective", dec.objective}};
}

void write_trace_csv(const dynabg::Decomposition& dec, const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write: " + file.string());
  out << "iteration,residual,objective,rank\n";
  for (const auto& row : dec.trace) {
    out << row.iteration << "," << row.residual << "," << row.objective << ","
        << row.rank << "\n";
  }
}

// Pooling, segmentation and solver flags shared by several subcommands.
struct PipelineFlags {
  dynabg::DetectionConfig config;
  double lambda = 0.0;  // 0 = automatic 1/sqrt(max(m,n))
  std::string mode = "sc-rpca-stable";
  std::string weight_mode = "sqrt";
  int downscale = 1;
  std::string pattern = "*";
  bool trace = false;

  void add_pooling(CLI::App* cmd) {
    cmd->add_option("--window", config.pooling.window_size,
                    "Sampling window side length (odd)");
    cmd->add_option("--sigma", config.pooling.sigma, "Gaussian scale, intensity units");
  }
  void add_segmentation(CLI::App* cmd) {
    auto& seg = config.segmentation;
    cmd->add_option("--superpixels", seg.target_superpixels, "Superpixels per frame");
    cmd->add_option("--compactness", seg.compactness, "Superpixel compactness weight");
    cmd->add_option("--merge-threshold", seg.merge_threshold,
                    "Subregion merge threshold (intensity feature units)");
    cmd->add_option("--center-threshold", seg.center_threshold,
                    "Cross-frame centroid distance bound, px");
    cmd->add_option("--similarity-threshold", seg.similarity_threshold,
                    "Cross-frame linking stop threshold");
  }
  void add_solver(CLI::App* cmd) {
    auto& s = config.solver;
    cmd->add_option("--lambda", lambda, "Sparsity weight (default 1/sqrt(max(m,n)))");
    cmd->add_option("--rho", s.rho, "Penalty growth factor");
    cmd->add_option("--mu0", s.mu0, "Initial penalty");
    cmd->add_option("--tol", s.tol, "Relative primal-residual stop");
    cmd->add_option("--max-iter", s.max_iter, "Iteration cap");
    cmd->add_option("--weight-mode", weight_mode, "Group threshold weight: sqrt|linear");
    cmd->add_flag("--trace", trace, "Dump per-iteration trace CSV");
  }
  void add_io(CLI::App* cmd) {
    cmd->add_option("--pattern", pattern, "Filename glob for input frames");
    cmd->add_option("--downscale", downscale, "Integer box-filter downscale");
  }

  dynabg::DetectionConfig resolve() {
    if (lambda != 0.0) config.solver.lambda = lambda;
    config.solver.trace = trace;
    config.mode = dynabg::parse_pipeline_mode(mode);
    if (weight_mode == "sqrt") {
      config.weight_mode = dynabg::WeightMode::Sqrt;
    } else if (weight_mode == "linear") {
      config.weight_mode = dynabg::WeightMode::Linear;
    } else {
      throw std::invalid_argument("--weight-mode must be sqrt or linear");
    }
    config.validate();
    return config;
  }

  json echo() const {
    return {{"window", config.pooling.window_size},
            {"sigma", config.pooling.sigma},
            {"superpixels", config.segmentation.target_superpixels},
            {"compactness", config.segmentation.compactness},
            {"merge_threshold", config.segmentation.merge_threshold},
            {"center_threshold", config.segmentation.center_threshold},
            {"similarity_threshold", config.segmentation.similarity_threshold},
            {"lambda", lambda == 0.0 ? json("auto") : json(lambda)},
            {"rho", config.solver.rho},
            {"mu0", config.solver.mu0},
            {"tol", config.solver.tol},
            {"max_iter", config.solver.max_iter},
            {"epsilon", config.binarize_epsilon},
            {"weight_mode", weight_mode},
            {"mode", mode},
            {"pattern", pattern},
            {"downscale", downscale}};
  }
};

json base_report(const std::string& command) {
  return {{"command", command},
          {"version", DYNABG_VERSION},
          {"threads", dynabg::worker_count()}};
}

// Frames live either directly in the given directory or in its input/
// subdirectory (benchmark video layout).
fs::path resolve_input_dir(const fs::path& given) {
  if (fs::is_directory(given / "input")) return given / "input";
  return given;
}

int run_synth(const fs::path& out_dir, const dynabg::SceneConfig& scene,
              const std::string& kind_name) {
  const auto start = Clock::now();
  const dynabg::SynthScene result = dynabg::synth_scene(scene);
  fs::create_directories(out_dir / "input");
  fs::create_directories(out_dir / "groundtruth");
  for (std::size_t k = 0; k < result.frames.size(); ++k) {
    dynabg::save_frame(result.frames[k],
                       out_dir / "input" / frame_name("in", static_cast<int>(k) + 1));
    dynabg::save_frame(result.ground_truth[k],
                       out_dir / "groundtruth" / frame_name("gt", static_cast<int>(k) + 1));
  }
  json report = base_report("synth");
  report["config"] = {{"kind", kind_name},
                      {"width", scene.width},
                      {"height", scene.height},
                      {"frames", scene.frame_count},
                      {"object_size", scene.object_size},
                      {"object_level", scene.object_level},
                      {"background_level", scene.background_level},
                      {"object_x0", scene.object_x0},
                      {"object_y0", scene.object_y0},
                      {"velocity_x", scene.velocity_x},
                      {"velocity_y", scene.velocity_y},
                      {"wave_amplitude", scene.wave_amplitude},
                      {"wave_period", scene.wave_period},
                      {"snow_rate", scene.snow_rate},
                      {"noise_sigma", scene.noise_sigma},
                      {"seed", scene.seed}};
  report["timings_ms"] = {{"total", ms_since(start)}};
  report["outputs"] = {{"frames", result.frames.size()},
                       {"input_dir", (out_dir / "input").string()},
                       {"groundtruth_dir", (out_dir / "groundtruth").string()}};
  write_json(report, out_dir / "synth_report.json");
  std::cout << "wrote " << result.frames.size() << " frames to " << out_dir.string()
            << "\n";
  return 0;
}

int run_pool(const fs::path& in_dir, const fs::path& out_dir, PipelineFlags& flags) {
  flags.config.pooling.validate();
  const auto start = Clock::now();
  const fs::path frames_dir = resolve_input_dir(in_dir);
  const dynabg::FrameSequence seq =
      dynabg::load_sequence(frames_dir, flags.pattern, flags.downscale);
  const double load_ms = ms_since(start);

  const auto pool_start = Clock::now();
  const dynabg::FrameSequence pooled = dynabg::pool_sequence(seq, flags.config.pooling);
  const double pool_ms = ms_since(pool_start);

  fs::create_directories(out_dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(frames_dir)) {
    if (entry.is_regular_file() &&
        dynabg::glob_match(flags.pattern, entry.path().filename().string())) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
  for (std::size_t k = 0; k < pooled.size(); ++k) {
    dynabg::save_frame(pooled[k], out_dir / files[k].filename().replace_extension(".png"));
  }

  json report = base_report("pool");
  report["config"] = {{"window", flags.config.pooling.window_size},
                      {"sigma", flags.config.pooling.sigma},
                      {"pattern", flags.pattern},
                      {"downscale", flags.downscale}};
  report["timings_ms"] = {{"load", load_ms}, {"pool", pool_ms}};
  report["outputs"] = {{"frames", pooled.size()}, {"dir", out_dir.string()}};
  write_json(report, out_dir / "pool_report.json");
  std::cout << "pooled " << pooled.size() << " frames into " << out_dir.string() << "\n";
  return 0;
}

int run_segment(const fs::path& in_dir, const fs::path& out_dir, PipelineFlags& flags) {
  flags.config.pooling.validate();
  flags.config.segmentation.validate();
  const auto start = Clock::now();
  const dynabg::FrameSequence seq =
      dynabg::load_sequence(resolve_input_dir(in_dir), flags.pattern, flags.downscale);

  // segmentation consumes pooled frames (pipeline order)
  const auto pool_start = Clock::now();
  const dynabg::FrameSequence pooled = dynabg::pool_sequence(seq, flags.config.pooling);
  const double pool_ms = ms_since(pool_start);

  const auto seg_start = Clock::now();
  const dynabg::GroupPartition partition =
      dynabg::video_segmentation(pooled, flags.config.segmentation);
  const double seg_ms = ms_since(seg_start);

  fs::create_directories(out_dir);
  dynabg::save_partition(partition, out_dir / "partition.txt");

  const dynabg::PartitionStats stats = dynabg::partition_stats(partition);
  json histogram = json::object();
  for (const auto& [size, count] : stats.size_histogram) {
    histogram[std::to_string(size)] = count;
  }
  json report = base_report("segment");
  report["config"] = flags.echo();
  report["timings_ms"] = {
      {"total", ms_since(start)}, {"pool", pool_ms}, {"segment", seg_ms}};
  report["partition"] = {{"groups", stats.group_count},
                         {"entries", stats.entry_count},
                         {"min_size", stats.min_size},
                         {"max_size", stats.max_size},
                         {"mean_size", stats.mean_size},
                         {"size_histogram", histogram}};
  report["outputs"] = {{"partition", (out_dir / "partition.txt").string()}};
  write_json(report, out_dir / "partition_summary.json");
  std::cout << "partition: " << stats.group_count << " groups over "
            << stats.entry_count << " entries -> " << out_dir.string() << "\n";
  return 0;
}

int run_detect(const fs::path& in_dir, const fs::path& out_dir, PipelineFlags& flags,
               const std::string& partition_file, double epsilon) {
  if (epsilon >= 0.0) flags.config.binarize_epsilon = epsilon;
  dynabg::DetectionConfig config = flags.resolve();

  const auto start = Clock::now();
  const dynabg::FrameSequence seq =
      dynabg::load_sequence(resolve_input_dir(in_dir), flags.pattern, flags.downscale);
  const double load_ms = ms_since(start);

  dynabg::DetectionResult result;
  double detect_ms = 0.0;
  if (!partition_file.empty() && config.mode == dynabg::PipelineMode::ScRpcaStable) {
    // reuse a precomputed partition instead of re-running segmentation
    const auto t0 = Clock::now();
    result.partition = dynabg::load_partition(partition_file);
    result.features = dynabg::pool_sequence(seq, config.pooling);
    const dynabg::PixelMatrix d = dynabg::stack(result.features);
    result.decomposition =
        dynabg::solve_sc_rpca(d, result.partition, config.solver, config.weight_mode);
    result.masks = dynabg::binarize(result.decomposition.E, config.binarize_epsilon,
                                    seq.width(), seq.height());
    detect_ms = ms_since(t0);
  } else {
    const auto t0 = Clock::now();
    result = dynabg::detect(seq, config);
    detect_ms = ms_since(t0);
  }

  fs::create_directories(out_dir);
  for (std::size_t k = 0; k < result.masks.size(); ++k) {
    dynabg::save_frame(result.masks[k],
                       out_dir / frame_name("bin", static_cast<int>(k) + 1));
  }
  if (flags.trace) {
    write_trace_csv(result.decomposition, out_dir / "trace.csv");
  }

  json report = base_report("detect");
  report["config"] = flags.echo();
  report["config"]["epsilon"] = config.binarize_epsilon;
  report["input"] = {{"dir", in_dir.string()},
                     {"frames", seq.size()},
                     {"width", seq.width()},
                     {"height", seq.height()}};
  report["timings_ms"] = {{"load", load_ms}, {"detect", detect_ms}};
  report["solver"] = solver_json(result.decomposition);
  if (config.mode == dynabg::PipelineMode::ScRpcaStable) {
    report["partition"] = {{"groups", result.partition.group_count()}};
  }
  report["outputs"] = {{"masks", result.masks.size()}, {"dir", out_dir.string()}};
  write_json(report, out_dir / "detect_report.json");

  if (!result.decomposition.converged) {
    std::cerr << "warning: solver stopped at max-iter with residual "
              << result.decomposition.final_residual << "\n";
  }
  std::cout << "wrote " << result.masks.size() << " masks to " << out_dir.string()
            << " (" << result.decomposition.iterations << " iterations, residual "
            << result.decomposition.final_residual << ")\n";
  return 0;
}

int run_eval(const fs::path& masks_dir, const fs::path& gt_dir, const fs::path& out_dir,
             const std::string& video, const std::string& pattern,
             const std::string& roi_file, int first, int last) {
  const auto start = Clock::now();
  const dynabg::MaskSequence masks = dynabg::load_sequence(masks_dir, pattern);

  std::optional<dynabg::Frame> roi;
  fs::path roi_path = roi_file;
  if (roi_file.empty()) {
    // benchmark layout keeps a spatial ROI image next to groundtruth/
    for (const char* candidate : {"ROI.png", "ROI.bmp"}) {
      if (fs::exists(gt_dir.parent_path() / candidate)) {
        roi_path = gt_dir.parent_path() / candidate;
        break;
      }
    }
  }
  if (!roi_path.empty() && fs::exists(roi_path)) {
    roi = dynabg::load_frame(roi_path);
  }

  int first_frame = first, last_frame = last;
  const fs::path temporal = gt_dir.parent_path() / "temporalROI.txt";
  if (first_frame <= 0 && fs::exists(temporal)) {
    std::ifstream in(temporal);
    int a = 0, b = 0;
    if (in >> a >> b) {
      first_frame = a;
      last_frame = b;
    }
  }
  if (first_frame <= 0) first_frame = 1;

  const dynabg::ConfusionCounts counts = dynabg::accumulate_counts(
      masks, gt_dir, roi ? &*roi : nullptr, first_frame, last_frame);
  const dynabg::MetricReport report = dynabg::metrics(counts);

  const std::string name =
      video.empty() ? fs::weakly_canonical(gt_dir).parent_path().filename().string()
                    : video;
  fs::create_directories(out_dir);
  {
    std::ofstream csv(out_dir / "metrics.csv");
    csv << "video,recall,precision,fmeasure\n";
    csv << name << "," << report.recall << "," << report.precision << ","
        << report.f_measure << "\n";
  }
  json j = base_report("eval");
  j["video"] = name;
  j["counts"] = {{"tp", counts.tp},
                 {"fn", counts.fn},
                 {"fp", counts.fp},
                 {"tn", counts.tn()},
                 {"evaluated", counts.evaluated}};
  j["metrics"] = {{"recall", report.recall},
                  {"precision", report.precision},
                  {"fmeasure", report.f_measure},
                  {"degenerate", report.degenerate}};
  j["range"] = {{"first", first_frame}, {"last", last_frame}};
  j["timings_ms"] = {{"total", ms_since(start)}};
  write_json(j, out_dir / "metrics.json");

  std::cout << name << ": recall " << report.recall << ", precision "
            << report.precision << ", F " << report.f_measure << "\n";
  return 0;
}

int run_bench(std::uint64_t seed, const fs::path& out_dir) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto randn = [&](int r, int c) {
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = gauss(rng);
    return m;
  };

  // standard exact-recovery instance: 200x50 rank-2 plus group-sparse spikes
  const Eigen::MatrixXd a0 = randn(200, 2) * randn(2, 50);
  Eigen::MatrixXi labels(200, 50);
  std::uniform_int_distribution<int> pick(0, 49);
  for (int j = 0; j < 200; ++j)
    for (int k = 0; k < 50; ++k) labels(j, k) = pick(rng);
  const dynabg::GroupPartition partition = dynabg::GroupPartition::from_labels(labels);
  Eigen::MatrixXd e0 = Eigen::MatrixXd::Zero(200, 50);
  std::uniform_real_distribution<double> magnitude(25.0, 75.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::size_t g : {7u, 23u, 41u}) {
    for (const auto& entry : partition.groups[g]) {
      e0(entry.pixel, entry.frame) = (coin(rng) < 0.5 ? -1.0 : 1.0) * magnitude(rng);
    }
  }
  const Eigen::MatrixXd d = a0 + e0;

  json rows = json::array();
  std::printf("%-16s %8s %12s %10s %8s\n", "method", "iters", "residual", "relA",
              "seconds");
  auto run_case = [&](const std::string& label, auto&& solve) {
    const auto t0 = Clock::now();
    const dynabg::Decomposition dec = solve();
    const double seconds = ms_since(t0) / 1000.0;
    const double rel_a = (dec.A - a0).norm() / a0.norm();
    std::printf("%-16s %8d %12.3e %10.3e %8.3f\n", label.c_str(), dec.iterations,
                dec.final_residual, rel_a, seconds);
    rows.push_back({{"method", label},
                    {"iterations", dec.iterations},
                    {"residual", dec.final_residual},
                    {"rel_error_A", rel_a},
                    {"rel_error_E", (dec.E - e0).norm() / e0.norm()},
                    {"converged", dec.converged},
                    {"seconds", seconds}});
  };
  run_case("rpca", [&] { return dynabg::solve_rpca(d, {}); });
  run_case("sc-rpca/sqrt", [&] {
    return dynabg::solve_sc_rpca(d, partition, {}, dynabg::WeightMode::Sqrt);
  });
  run_case("sc-rpca/linear", [&] {
    return dynabg::solve_sc_rpca(d, partition, {}, dynabg::WeightMode::Linear);
  });

  if (!out_dir.empty()) {
    json report = base_report("bench");
    report["seed"] = seed;
    report["instance"] = {{"rows", 200},
                          {"cols", 50},
                          {"rank", 2},
                          {"groups", 50},
                          {"corrupted_groups", 3}};
    report["results"] = rows;
    write_json(report, out_dir / "bench_report.json");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moving-object detection in dynamic backgrounds"};
  app.require_subcommand(1);
  app.set_version_flag("--version", DYNABG_VERSION);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene");
  dynabg::SceneConfig scene;
  std::string kind = "static";
  std::string synth_out;
  int object_level = scene.object_level, background_level = scene.background_level;
  synth->add_option("--kind", kind, "Background kind: static|wave|snow");
  synth->add_option("--width", scene.width);
  synth->add_option("--height", scene.height);
  synth->add_option("--frames", scene.frame_count);
  synth->add_option("--object-size", scene.object_size);
  synth->add_option("--object-level", object_level);
  synth->add_option("--bg-level", background_level);
  synth->add_option("--x0", scene.object_x0);
  synth->add_option("--y0", scene.object_y0);
  synth->add_option("--velocity-x", scene.velocity_x);
  synth->add_option("--velocity-y", scene.velocity_y);
  synth->add_option("--amplitude", scene.wave_amplitude);
  synth->add_option("--period", scene.wave_period);
  synth->add_option("--snow-rate", scene.snow_rate);
  synth->add_option("--noise-sigma", scene.noise_sigma);
  synth->add_option("--seed", scene.seed);
  synth->add_option("--out", synth_out, "Output scene directory")->required();

  // pool
  auto* pool = app.add_subcommand("pool", "Replace pixels by window stable-values");
  std::string pool_in, pool_out;
  PipelineFlags pool_flags;
  pool->add_option("input", pool_in, "Frame directory")->required();
  pool->add_option("--out", pool_out, "Output directory")->required();
  pool_flags.add_pooling(pool);
  pool_flags.add_io(pool);

  // segment
  auto* segment = app.add_subcommand("segment", "Emit the cross-frame group partition");
  std::string seg_in, seg_out;
  PipelineFlags seg_flags;
  segment->add_option("input", seg_in, "Frame directory")->required();
  segment->add_option("--out", seg_out, "Output directory")->required();
  seg_flags.add_pooling(segment);
  seg_flags.add_segmentation(segment);
  seg_flags.add_io(segment);

  // detect
  auto* detect = app.add_subcommand("detect", "Run the full detection pipeline");
  std::string det_in, det_out, det_partition;
  double det_epsilon = -1.0;
  PipelineFlags det_flags;
  detect->add_option("input", det_in, "Frame directory (or video dir with input/)")
      ->required();
  detect->add_option("--out", det_out, "Mask output directory")->required();
  detect->add_option("--mode", det_flags.mode,
                     "Pipeline: rpca-pixel|rpca-stable|sc-rpca-stable");
  detect->add_option("--epsilon", det_epsilon, "Foreground threshold on |E|");
  detect->add_option("--partition", det_partition,
                     "Reuse a partition file from `segment`");
  det_flags.add_pooling(detect);
  det_flags.add_segmentation(detect);
  det_flags.add_solver(detect);
  det_flags.add_io(detect);

  // eval
  auto* eval = app.add_subcommand("eval", "Score masks against ground truth");
  std::string eval_masks, eval_gt, eval_out = ".", eval_video, eval_roi;
  std::string eval_pattern = "bin*.png";
  int eval_first = 0, eval_last = -1;
  eval->add_option("masks", eval_masks, "Mask directory")->required();
  eval->add_option("groundtruth", eval_gt, "Ground-truth directory")->required();
  eval->add_option("--out", eval_out, "Report directory");
  eval->add_option("--video", eval_video, "Video name for the CSV row");
  eval->add_option("--pattern", eval_pattern, "Mask filename glob");
  eval->add_option("--roi", eval_roi, "Spatial ROI image (0 = excluded)");
  eval->add_option("--first", eval_first, "First evaluated frame (1-based)");
  eval->add_option("--last", eval_last, "Last evaluated frame");

  // bench
  auto* bench = app.add_subcommand("bench", "Solver exact-recovery benchmark");
  std::uint64_t bench_seed = 7;
  std::string bench_out;
  bench->add_option("--seed", bench_seed);
  bench->add_option("--out", bench_out, "Report directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      scene.kind = dynabg::parse_background_kind(kind);
      scene.object_level = static_cast<std::uint8_t>(object_level);
      scene.background_level = static_cast<std::uint8_t>(background_level);
      scene.validate();
      return run_synth(synth_out, scene, kind);
    }
    if (pool->parsed()) return run_pool(pool_in, pool_out, pool_flags);
    if (segment->parsed()) return run_segment(seg_in, seg_out, seg_flags);
    if (detect->parsed()) {
      return run_detect(det_in, det_out, det_flags, det_partition, det_epsilon);
    }
    if (eval->parsed()) {
      return run_eval(eval_masks, eval_gt, eval_out, eval_video, eval_pattern,
                      eval_roi, eval_first, eval_last);
    }
    if (bench->parsed()) return run_bench(bench_seed, bench_out);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
