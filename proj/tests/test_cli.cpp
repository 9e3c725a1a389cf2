#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kernelseg/config.hpp"
#include "kernelseg/pipeline_io.hpp"
#include "kernelseg/scene_io.hpp"

using namespace kernelseg;
namespace fs = std::filesystem;

#ifndef KERNELSEG_CLI
#error "KERNELSEG_CLI must point at the built binary"
#endif

namespace {

int run_cli(const std::string& args) {
  std::string command = std::string(KERNELSEG_CLI) + " " + args + " >/dev/null 2>&1";
  int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& file, const std::string& text) {
  std::ofstream out(file);
  out << text;
}

const char* kExactConfig =
    "scene.n_instances = 5\n"
    "scene.min_points = 150\n"
    "scene.max_points = 300\n"
    "scene.min_separation = 2.5\n"
    "scene.min_size = 0.4\n"
    "scene.max_size = 0.9\n"
    "scene.background_points = 400\n"
    "scene.room_x = 12\n"
    "scene.room_y = 12\n"
    "scene.room_z = 4\n"
    "aggregation.mode = oracle\n";

}  // namespace

TEST_CASE("config parsing rejects unknown keys and bad values") {
  CHECK_THROWS_AS(parse_config_text("bogus.key = 1\n"), config_error);
  CHECK_THROWS_AS(parse_config_text("mining.radius = fast\n"), config_error);
  CHECK_THROWS_AS(parse_config_text("mining.mode = sideways\n"), config_error);
  CHECK_THROWS_AS(parse_config_text("scene.n_instances\n"), config_error);

  RunConfig config = parse_config_text(
      "# comment\n"
      "scene.n_instances = 7\n"
      "mining.mode = plain_nms\n"
      "kernel.channels = 16, 8, 1\n"
      "postprocess.coverage = false\n"
      "noise.sigma_offset = 0.25\n");
  CHECK(config.scene.n_instances == 7);
  CHECK(config.pipeline.mining == MiningMode::PlainNms);
  CHECK(config.pipeline.decoder_channels == std::vector<int>{16, 8, 1});
  CHECK(config.pipeline.use_coverage == false);
  CHECK(config.pipeline.noise.sigma_offset == 0.25);
}

TEST_CASE("gen writes the requested scene directories deterministically") {
  TempDir tmp("kernelseg_cli_gen");
  write_file(tmp.path / "config.txt", kExactConfig);
  std::string base = " --config " + (tmp.path / "config.txt").string();

  CHECK(run_cli("gen" + base + " --out-dir " + (tmp.path / "a").string() +
                " --count 3 --seed 5") == 0);
  CHECK(fs::exists(tmp.path / "a/scene_0000/cloud.ply"));
  CHECK(fs::exists(tmp.path / "a/scene_0001/labels.json"));
  CHECK(fs::exists(tmp.path / "a/scene_0002/pred.bin"));

  CHECK(run_cli("gen" + base + " --out-dir " + (tmp.path / "b").string() +
                " --count 1 --seed 5") == 0);
  CHECK(slurp(tmp.path / "a/scene_0000/labels.json") ==
        slurp(tmp.path / "b/scene_0000/labels.json"));
  CHECK(slurp(tmp.path / "a/scene_0000/cloud.ply") ==
        slurp(tmp.path / "b/scene_0000/cloud.ply"));

  // invalid config key -> exit 2
  write_file(tmp.path / "bad.txt", "scene.made_up = 1\n");
  CHECK(run_cli("gen --config " + (tmp.path / "bad.txt").string() + " --out-dir " +
                (tmp.path / "c").string()) == 2);
}

TEST_CASE("run produces exact metrics on noiseless scenes and eval agrees") {
  TempDir tmp("kernelseg_cli_run");
  write_file(tmp.path / "config.txt", kExactConfig);
  std::string config_arg = " --config " + (tmp.path / "config.txt").string();
  REQUIRE(run_cli("gen" + config_arg + " --out-dir " + (tmp.path / "scenes").string() +
                  " --count 2 --seed 11") == 0);

  CHECK(run_cli("run --scenes " + (tmp.path / "scenes").string() + config_arg + " --out " +
                (tmp.path / "results").string() + " --jobs 1 --ply") == 0);
  CHECK(fs::exists(tmp.path / "results/scene_0000/result.json"));
  CHECK(fs::exists(tmp.path / "results/scene_0000/masks.ply"));
  CHECK(fs::exists(tmp.path / "results/timings.csv"));
  std::string metrics = slurp(tmp.path / "results/metrics.json");
  CHECK(metrics.find("\"mAP\": 1.0") != std::string::npos);

  // reruns are byte-identical
  REQUIRE(run_cli("run --scenes " + (tmp.path / "scenes").string() + config_arg +
                  " --out " + (tmp.path / "results2").string() + " --jobs 1") == 0);
  CHECK(slurp(tmp.path / "results/scene_0000/result.json") ==
        slurp(tmp.path / "results2/scene_0000/result.json"));
  CHECK(slurp(tmp.path / "results/metrics.json") ==
        slurp(tmp.path / "results2/metrics.json"));

  // eval recomputes the same metrics from the stored labels
  CHECK(run_cli("eval --pred-dir " + (tmp.path / "results").string() + " --gt-dir " +
                (tmp.path / "scenes").string()) == 0);

  // shuffling instance ids in the stored result leaves the metrics unchanged
  StoredResult stored = load_result_json(tmp.path / "results/scene_0000/result.json");
  StoredResult shuffled = stored;
  REQUIRE(shuffled.confidences.size() >= 2);
  std::swap(shuffled.confidences[0], shuffled.confidences[1]);
  std::swap(shuffled.instance_classes[0], shuffled.instance_classes[1]);
  for (int& label : shuffled.hard_labels) {
    if (label == 0) label = 1;
    else if (label == 1) label = 0;
  }
  auto preds_a = stored_result_predictions(stored);
  auto preds_b = stored_result_predictions(shuffled);
  GroundTruthSet gt = scene_ground_truth(load_scene(tmp.path / "scenes/scene_0000"));
  MetricsReport before = map_suite({preds_a}, {gt});
  MetricsReport after = map_suite({preds_b}, {gt});
  CHECK(before.map == after.map);
  CHECK(before.ap50 == after.ap50);

  // documented fallback: without pred.bin the predictions are regenerated
  // from the labels and the configured noise spec
  fs::remove(tmp.path / "scenes/scene_0001/pred.bin");
  REQUIRE(run_cli("run --scenes " + (tmp.path / "scenes").string() + config_arg +
                  " --out " + (tmp.path / "results_nopred").string() + " --jobs 1") == 0);
  CHECK(fs::exists(tmp.path / "results_nopred/scene_0001/result.json"));

  // a corrupt scene is reported but the run continues with exit 1
  fs::create_directories(tmp.path / "scenes/scene_bad");
  write_file(tmp.path / "scenes/scene_bad/cloud.ply", "not a ply\n");
  CHECK(run_cli("run --scenes " + (tmp.path / "scenes").string() + config_arg + " --out " +
                (tmp.path / "results3").string() + " --jobs 1") == 1);
  CHECK(fs::exists(tmp.path / "results3/scene_0000/result.json"));

  // empty scene list -> exit 2
  fs::create_directories(tmp.path / "nothing");
  CHECK(run_cli("run --scenes " + (tmp.path / "nothing").string() + config_arg +
                " --out " + (tmp.path / "results4").string()) == 2);
}

TEST_CASE("eval rejects a point-count mismatch with exit 2") {
  TempDir tmp("kernelseg_cli_eval");
  write_file(tmp.path / "config.txt", kExactConfig);
  std::string config_arg = " --config " + (tmp.path / "config.txt").string();
  REQUIRE(run_cli("gen" + config_arg + " --out-dir " + (tmp.path / "scenes").string() +
                  " --count 1 --seed 3") == 0);
  REQUIRE(run_cli("run --scenes " + (tmp.path / "scenes").string() + config_arg +
                  " --out " + (tmp.path / "results").string() + " --jobs 1") == 0);

  StoredResult stored = load_result_json(tmp.path / "results/scene_0000/result.json");
  stored.num_points -= 1;
  stored.hard_labels.pop_back();
  SegmentationResult fake;
  fake.hard_labels = stored.hard_labels;
  fake.confidences = stored.confidences;
  fake.instance_classes = stored.instance_classes;
  write_result_json(tmp.path / "results/scene_0000/result.json", "scene_0000", fake);
  CHECK(run_cli("eval --pred-dir " + (tmp.path / "results").string() + " --gt-dir " +
                (tmp.path / "scenes").string()) == 2);
}

TEST_CASE("ablate writes one CSV row per variant") {
  TempDir tmp("kernelseg_cli_ablate");
  write_file(tmp.path / "config.txt", kExactConfig);
  REQUIRE(run_cli("gen --config " + (tmp.path / "config.txt").string() + " --out-dir " +
                  (tmp.path / "scenes").string() + " --count 2 --seed 21") == 0);

  std::string matrix = std::string(kExactConfig) +
                       "postprocess.min_fragment_points = 10\n"
                       "variant.full.aggregation.mode = oracle\n"
                       "variant.no_agg.aggregation.mode = off\n"
                       "variant.plain.mining.mode = plain_nms\n";
  write_file(tmp.path / "matrix.txt", matrix);

  CHECK(run_cli("ablate --scenes " + (tmp.path / "scenes").string() + " --matrix-config " +
                (tmp.path / "matrix.txt").string() + " --out " +
                (tmp.path / "out").string()) == 0);
  std::string csv = slurp(tmp.path / "out/ablation.csv");
  CHECK(csv.find("variant,mining,aggregation,head,mAP,AP@50,AP@25,mCov,mWCov,mPrec,mRec") ==
        0);
  CHECK(csv.find("full,ln_nms,oracle,prototype,1.000000") != std::string::npos);
  CHECK(csv.find("no_agg,ln_nms,off,prototype") != std::string::npos);
  CHECK(csv.find("plain,plain_nms,oracle,prototype") != std::string::npos);
  // three variant rows, ordered as declared
  CHECK(csv.find("full,") < csv.find("no_agg,"));
  CHECK(csv.find("no_agg,") < csv.find("plain,"));

  // deterministic rerun
  CHECK(run_cli("ablate --scenes " + (tmp.path / "scenes").string() + " --matrix-config " +
                (tmp.path / "matrix.txt").string() + " --out " +
                (tmp.path / "out2").string()) == 0);
  CHECK(slurp(tmp.path / "out/ablation.csv") == slurp(tmp.path / "out2/ablation.csv"));
}

TEST_CASE("KERNELSEG_SEED overrides the config seed") {
  TempDir tmp("kernelseg_cli_seed");
  write_file(tmp.path / "config.txt", std::string(kExactConfig) + "scene.seed = 4\n");
  std::string config_arg = " --config " + (tmp.path / "config.txt").string();

  // without the env var: config seed 4
  REQUIRE(run_cli("gen" + config_arg + " --out-dir " + (tmp.path / "a").string() +
                  " --count 1") == 0);
  // with the env var: seed 9 wins over the config
  std::string env_cmd = "KERNELSEG_SEED=9 " + std::string(KERNELSEG_CLI) + " gen" +
                        config_arg + " --out-dir " + (tmp.path / "b").string() +
                        " --count 1 >/dev/null 2>&1";
  REQUIRE(WEXITSTATUS(std::system(env_cmd.c_str())) == 0);
  // seed 9 directly for comparison
  REQUIRE(run_cli("gen" + config_arg + " --out-dir " + (tmp.path / "c").string() +
                  " --count 1 --seed 9") == 0);

  CHECK(slurp(tmp.path / "a/scene_0000/cloud.ply") !=
        slurp(tmp.path / "b/scene_0000/cloud.ply"));
  CHECK(slurp(tmp.path / "b/scene_0000/cloud.ply") ==
        slurp(tmp.path / "c/scene_0000/cloud.ply"));
}
