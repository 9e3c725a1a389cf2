#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "kernelseg/config.hpp"
#include "kernelseg/pipeline.hpp"
#include "kernelseg/pipeline_io.hpp"
#include "kernelseg/scene_io.hpp"

namespace fs = std::filesystem;
using namespace kernelseg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitInvalid = 2;

void apply_seed_override(RunConfig& config) {
  if (const char* env = std::getenv("KERNELSEG_SEED")) {
    try {
      uint64_t seed = std::stoull(env);
      config.scene_seed = seed;
      config.pipeline.noise.seed = seed;
    } catch (const std::exception&) {
      throw config_error("KERNELSEG_SEED must be an unsigned integer");
    }
  }
}

std::vector<fs::path> list_scene_dirs(const fs::path& root) {
  std::vector<fs::path> dirs;
  if (!fs::is_directory(root)) return dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "cloud.ply")) {
      dirs.push_back(entry.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

SimulatedPredictions scene_predictions(const fs::path& dir, const SyntheticScene& scene,
                                       const PipelineConfig& config) {
  fs::path pred_file = dir / "pred.bin";
  if (fs::exists(pred_file)) {
    SimulatedPredictions preds = load_predictions(pred_file);
    if (preds.heatmap.size() != scene.size()) {
      throw io_error(pred_file.string() + ": point count does not match the scene");
    }
    return preds;
  }
  // Fallback: regenerate from labels and the configured noise spec.
  return simulate_predictions(scene, config.noise, config.feature_dim,
                              config.class_embedding_dim, config.heatmap_alpha);
}

int cmd_gen(const fs::path& config_path, const fs::path& out_dir, int count,
            uint64_t cli_seed, bool seed_given) {
  RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
  apply_seed_override(config);  // KERNELSEG_SEED beats the config file
  uint64_t seed = seed_given ? cli_seed : config.scene_seed;
  fs::create_directories(out_dir);
  for (int k = 0; k < count; ++k) {
    uint64_t scene_seed = seed + static_cast<uint64_t>(k);
    SyntheticScene scene = generate_scene(config.scene, scene_seed);
    NoiseSpec noise = config.pipeline.noise;
    noise.seed = scene_seed;  // one stream per scene
    SimulatedPredictions preds =
        simulate_predictions(scene, noise, config.pipeline.feature_dim,
                             config.pipeline.class_embedding_dim,
                             config.pipeline.heatmap_alpha);
    char name[32];
    std::snprintf(name, sizeof(name), "scene_%04d", k);
    fs::path dir = out_dir / name;
    save_scene(dir, scene);
    save_predictions(dir / "pred.bin", preds);
    std::cout << dir.string() << " (" << scene.size() << " points, "
              << scene.instances.size() << " instances)\n";
  }
  return kExitOk;
}

struct SceneRun {
  std::string name;
  bool failed = false;
  std::string error;
  SegmentationResult result;
  PredictionSet predictions;
  GroundTruthSet ground_truth;
};

int cmd_run(const fs::path& scenes_dir, const fs::path& config_path, const fs::path& out_dir,
            int jobs_override, bool write_ply_flag) {
  RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
  apply_seed_override(config);
  auto dirs = list_scene_dirs(scenes_dir);
  if (dirs.empty()) {
    std::cerr << "error: no scene directories under " << scenes_dir.string() << "\n";
    return kExitInvalid;
  }
  fs::create_directories(out_dir);

  std::vector<SceneRun> runs(dirs.size());
  int jobs = jobs_override > 0 ? jobs_override : config.jobs;
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(dirs.size())));

  auto worker = [&](int start) {
    for (size_t s = start; s < dirs.size(); s += jobs) {
      SceneRun& run = runs[s];
      run.name = dirs[s].filename().string();
      try {
        SyntheticScene scene = load_scene(dirs[s]);
        SimulatedPredictions preds = scene_predictions(dirs[s], scene, config.pipeline);
        run.result = run_pipeline(scene, preds, config.pipeline);
        run.predictions = result_predictions(run.result);
        run.ground_truth = scene_ground_truth(scene);
      } catch (const std::exception& e) {
        run.failed = true;
        run.error = e.what();
      }
    }
  };
  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker, t);
    for (auto& t : pool) t.join();
  }

  std::vector<PredictionSet> all_preds;
  std::vector<GroundTruthSet> all_gts;
  std::vector<std::pair<std::string, StageTimings>> timing_rows;
  bool any_failed = false;
  for (size_t s = 0; s < runs.size(); ++s) {
    SceneRun& run = runs[s];
    if (run.failed) {
      any_failed = true;
      std::cerr << "error: " << run.name << ": " << run.error << "\n";
      continue;
    }
    fs::path scene_out = out_dir / run.name;
    fs::create_directories(scene_out);
    write_result_json(scene_out / "result.json", run.name, run.result);
    if (write_ply_flag || config.write_ply) {
      SyntheticScene scene = load_scene(dirs[s]);
      write_masks_ply(scene_out / "masks.ply", scene.cloud.positions,
                      run.result.hard_labels);
    }
    timing_rows.emplace_back(run.name, run.result.timings);
    all_preds.push_back(std::move(run.predictions));
    all_gts.push_back(std::move(run.ground_truth));
  }

  if (!all_preds.empty()) {
    MetricsReport report = map_suite(all_preds, all_gts);
    std::ofstream metrics_out(out_dir / "metrics.json");
    metrics_out << report_to_json(report) << "\n";
    write_timings_csv(out_dir / "timings.csv", timing_rows);
    std::cout << report_to_table(report);
  }
  return any_failed ? kExitPartial : kExitOk;
}

int cmd_ablate(const fs::path& scenes_dir, const fs::path& matrix_path,
               const fs::path& out_dir) {
  AblationMatrix matrix = load_ablation_config(matrix_path);
  auto dirs = list_scene_dirs(scenes_dir);
  if (dirs.empty()) {
    std::cerr << "error: no scene directories under " << scenes_dir.string() << "\n";
    return kExitInvalid;
  }
  fs::create_directories(out_dir);

  bool any_failed = false;
  std::vector<SyntheticScene> scenes;
  std::vector<std::vector<SimulatedPredictions>> per_variant_preds(matrix.variants.size());
  for (const auto& dir : dirs) {
    try {
      scenes.push_back(load_scene(dir));
      for (size_t v = 0; v < matrix.variants.size(); ++v) {
        per_variant_preds[v].push_back(scene_predictions(
            dir, scenes.back(), matrix.variants[v].second.pipeline));
      }
    } catch (const std::exception& e) {
      any_failed = true;
      std::cerr << "error: " << dir.string() << ": " << e.what() << "\n";
      scenes.pop_back();
    }
  }
  if (scenes.empty()) return kExitInvalid;

  std::vector<AblationRow> rows;
  for (size_t v = 0; v < matrix.variants.size(); ++v) {
    const auto& [name, run_config] = matrix.variants[v];
    std::vector<std::pair<std::string, PipelineConfig>> one{{name, run_config.pipeline}};
    auto result = run_ablation(one, scenes, per_variant_preds[v]);
    rows.push_back(result.front());
    std::cout << name << ": mAP=" << result.front().metrics.map
              << " AP@50=" << result.front().metrics.ap50
              << " AP@25=" << result.front().metrics.ap25 << "\n";
  }
  write_ablation_csv(out_dir / "ablation.csv", rows);
  return any_failed ? kExitPartial : kExitOk;
}

int cmd_eval(const fs::path& pred_dir, const fs::path& gt_dir) {
  auto dirs = list_scene_dirs(gt_dir);
  if (dirs.empty()) {
    std::cerr << "error: no scene directories under " << gt_dir.string() << "\n";
    return kExitInvalid;
  }
  std::vector<PredictionSet> preds;
  std::vector<GroundTruthSet> gts;
  for (const auto& dir : dirs) {
    fs::path result_file = pred_dir / dir.filename() / "result.json";
    SyntheticScene scene = load_scene(dir);
    StoredResult stored = load_result_json(result_file);
    if (stored.num_points != scene.size()) {
      std::cerr << "error: " << result_file.string() << ": point count "
                << stored.num_points << " does not match scene " << scene.size() << "\n";
      return kExitInvalid;
    }
    preds.push_back(stored_result_predictions(stored));
    gts.push_back(scene_ground_truth(scene));
  }
  MetricsReport report = map_suite(preds, gts);
  std::cout << report_to_json(report) << "\n";
  std::cout << report_to_table(report);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Instance-kernel point cloud segmentation pipeline"};
  app.require_subcommand(1);

  std::string config_path, out_dir, scenes_dir, matrix_path, pred_dir, gt_dir;
  int count = 1, jobs = 0;
  uint64_t seed = 0;
  bool ply = false;

  auto* gen = app.add_subcommand("gen", "Generate synthetic scene directories");
  gen->add_option("--config", config_path, "Config file");
  gen->add_option("--out-dir", out_dir, "Output directory")->required();
  gen->add_option("--count", count, "Number of scenes");
  gen->add_option("--seed", seed, "Base seed (scene k uses seed+k)");

  auto* run = app.add_subcommand("run", "Run the pipeline over scene directories");
  run->add_option("--scenes", scenes_dir, "Directory of scene directories")->required();
  run->add_option("--config", config_path, "Config file");
  run->add_option("--out", out_dir, "Results directory")->required();
  run->add_option("--jobs", jobs, "Scene-level parallelism (default: cores)");
  run->add_flag("--ply", ply, "Also write masks.ply per scene");

  auto* ablate = app.add_subcommand("ablate", "Run a config matrix and emit a CSV");
  ablate->add_option("--scenes", scenes_dir, "Directory of scene directories")->required();
  ablate->add_option("--matrix-config", matrix_path, "Matrix config file")->required();
  ablate->add_option("--out", out_dir, "Output directory")->required();

  auto* eval = app.add_subcommand("eval", "Re-evaluate stored results against ground truth");
  eval->add_option("--pred-dir", pred_dir, "Directory of per-scene result.json")->required();
  eval->add_option("--gt-dir", gt_dir, "Directory of scene directories")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (gen->parsed()) {
      return cmd_gen(config_path, out_dir, count, seed, gen->count("--seed") > 0);
    }
    if (run->parsed()) return cmd_run(scenes_dir, config_path, out_dir, jobs, ply);
    if (ablate->parsed()) return cmd_ablate(scenes_dir, matrix_path, out_dir);
    if (eval->parsed()) return cmd_eval(pred_dir, gt_dir);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
