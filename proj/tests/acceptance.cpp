// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <vector>

#include "kernelseg/aggregation.hpp"
#include "kernelseg/heatmap.hpp"
#include "kernelseg/kernels.hpp"
#include "kernelseg/matching.hpp"
#include "kernelseg/pipeline.hpp"
#include "kernelseg/postprocess.hpp"
#include "reference_impls.hpp"

using namespace kernelseg;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", criterion, pass ? "PASS" : "FAIL",
              detail.c_str());
  if (!pass) ++failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// criterion 1: kernel-length arithmetic, zero tolerance, < 1 s

void criterion_1() {
  auto start = Clock::now();
  bool pass = kernel_length({16, {8, 1}}) == 169 && kernel_length({16, {16, 1}}) == 337 &&
              kernel_length({16, {16, 8, 1}}) == 465 &&
              kernel_length({16, {16, 16, 1}}) == 609;
  double elapsed = seconds_since(start);
  pass = pass && elapsed < 1.0;
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "kernel lengths 169/337/465/609 exact, %.3f s", elapsed);
  report(1, pass, detail);
}

// ---------------------------------------------------------------------------
// criterion 2: end-to-end oracle exactness on 50 noiseless scenes

SceneConfig exact_scene_config(uint64_t seed) {
  SceneConfig config;
  config.n_instances = 5 + static_cast<int>(seed % 11);  // 5..15
  config.min_points = 150;
  config.max_points = 400;
  // Separation clears both the mining radius and the prototype decoder's
  // distance-gate geometry, so the run must be exact, not just likely so.
  config.min_separation = 2.3;
  config.min_size = 0.4;
  config.max_size = 0.9;
  config.background_points = 800;
  config.room_extent = Vec3(13, 13, 4);
  return config;
}

void criterion_2() {
  auto start = Clock::now();
  PipelineConfig config;
  config.mining = MiningMode::LnNms;
  config.aggregation = AggregationMode::Oracle;
  config.head = KernelHead::Prototype;

  std::vector<PredictionSet> preds;
  std::vector<GroundTruthSet> gts;
  for (uint64_t seed = 1; seed <= 50; ++seed) {
    SyntheticScene scene = generate_scene(exact_scene_config(seed), seed);
    SimulatedPredictions sim = simulate_predictions(scene, NoiseSpec{});
    SegmentationResult result = run_pipeline(scene, sim, config);
    preds.push_back(result_predictions(result));
    gts.push_back(scene_ground_truth(scene));
  }
  MetricsReport report_all = map_suite(preds, gts);
  double elapsed = seconds_since(start);
  bool pass = report_all.map == 1.0 && report_all.ap50 == 1.0 && report_all.ap25 == 1.0 &&
              elapsed < 60.0;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "50 noiseless scenes: mAP=%.6f AP@50=%.6f AP@25=%.6f, %.1f s",
                report_all.map, report_all.ap50, report_all.ap25, elapsed);
  report(2, pass, detail);
}

// ---------------------------------------------------------------------------
// criterion 3: LN-NMS equals the naive O(N^2) reference

struct RandomField {
  VecX heat;
  MatX positions;
  std::vector<int> labels;
  std::vector<char> foreground;
  MatX features;
  MatX offsets;
};

RandomField make_field(int n, double extent, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RandomField field;
  field.positions.resize(n, 3);
  field.heat.resize(n);
  field.labels.resize(n);
  field.foreground.resize(n);
  field.features.resize(n, 6);
  field.offsets.resize(n, 3);
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < 3; ++a) field.positions(i, a) = unit(rng) * extent;
    field.heat[i] = unit(rng);
    field.labels[i] = static_cast<int>(unit(rng) * 4);
    field.foreground[i] = unit(rng) < 0.85;
    for (int d = 0; d < 6; ++d) field.features(i, d) = unit(rng) * 2 - 1;
    for (int a = 0; a < 3; ++a) field.offsets(i, a) = unit(rng) * 0.4 - 0.2;
  }
  return field;
}

bool candidates_identical(const std::vector<Candidate>& a,
                          const std::vector<Candidate>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].point_index != b[i].point_index || a[i].fg_count != b[i].fg_count ||
        a[i].bg_count != b[i].bg_count || a[i].semantic_label != b[i].semantic_label ||
        a[i].centroid_score != b[i].centroid_score || a[i].position != b[i].position ||
        a[i].shifted_position != b[i].shifted_position ||
        a[i].fg_feature != b[i].fg_feature || a[i].bg_feature != b[i].bg_feature) {
      return false;
    }
  }
  return true;
}

void criterion_3() {
  MiningParams params;
  int checked = 0;
  bool pass = true;
  int max_n = 0;
  for (uint64_t scene = 0; scene < 100 && pass; ++scene) {
    int n = 200 + static_cast<int>(scene) * 18;
    if (n > 2000) n = 2000;
    if (scene >= 95) n = 2000;  // pin several runs at the size bound
    max_n = std::max(max_n, n);
    RandomField field = make_field(n, 2.0 + (scene % 5), 7000 + scene);
    SpatialGrid grid = build_grid(field.positions, params.radius);
    auto fast = ln_nms(field.heat, field.positions, field.labels, field.foreground,
                       field.features, field.offsets, params, grid);
    auto naive = reference::naive_ln_nms(field.heat, field.positions, field.labels,
                                         field.foreground, field.features, field.offsets,
                                         params);
    pass = candidates_identical(fast, naive);
    ++checked;
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "%d random scenes identical to naive reference (N up to %d)", checked,
                max_n);
  report(3, pass, detail);
}

// ---------------------------------------------------------------------------
// criterion 4: Hungarian equals factorial brute force

void criterion_4() {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> dim(1, 7);
  bool pass = true;
  double worst = 0.0;
  for (int trial = 0; trial < 200 && pass; ++trial) {
    int rows = dim(rng), cols = dim(rng);
    MatX cost(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) cost(i, j) = unit(rng);
    }
    double fast = hungarian(cost).total_cost;
    double brute = reference::brute_force_assignment(cost);
    worst = std::max(worst, std::abs(fast - brute));
    pass = std::abs(fast - brute) <= 1e-9;
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "200 matrices up to 7x7, max |fast - brute| = %.2e", worst);
  report(4, pass, detail);
}

// ---------------------------------------------------------------------------
// criterion 5: Otsu equals the exhaustive variance maximizer

void criterion_5() {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  bool pass = true;
  for (int trial = 0; trial < 100 && pass; ++trial) {
    int count = 20 + static_cast<int>(unit(rng) * 400);
    std::vector<double> values(count);
    double split = 0.2 + 0.6 * unit(rng);
    for (int i = 0; i < count; ++i) {
      double u = unit(rng);
      if (u < 0.45) values[i] = split * unit(rng);
      else if (u < 0.9) values[i] = split + (1 - split) * unit(rng);
      else values[i] = unit(rng);
    }
    pass = otsu_level(values, 256) == reference::exhaustive_otsu_level(values, 256);
  }
  report(5, pass, "100 random value sets, same quantized level as exhaustive scan");
}

// ---------------------------------------------------------------------------
// criterion 6: greedy merge equals the literal algorithm simulation

void criterion_6() {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  bool pass = true;
  for (int trial = 0; trial < 200 && pass; ++trial) {
    const int n = 10;
    MatX scores(n, n);
    for (int i = 0; i < n; ++i) {
      scores(i, i) = 0.0;
      for (int j = i + 1; j < n; ++j) {
        double v = unit(rng);
        scores(i, j) = v;
        scores(j, i) = v;
      }
    }
    VecX heat(n);
    for (int i = 0; i < n; ++i) heat[i] = unit(rng);
    InstanceGroups groups = greedy_merge(scores, heat, 0.5);
    auto expected = reference::simulate_merge(scores, heat, 0.5);
    pass = groups.groups.size() == expected.size();
    for (size_t g = 0; pass && g < expected.size(); ++g) {
      pass = groups.centers[g] == expected[g].center &&
             groups.groups[g] == expected[g].members;
    }
  }
  report(6, pass, "200 random 10x10 score maps, partitions identical");
}

// ---------------------------------------------------------------------------
// criterion 7: Monte-Carlo heatmap average near 0.1

void criterion_7() {
  SceneConfig config;
  config.n_instances = 10;
  config.min_points = 10000;
  config.max_points = 10000;
  config.background_points = 0;
  config.min_separation = 1.5;
  config.room_extent = Vec3(12, 12, 6);
  SyntheticScene scene = generate_scene(config, 777);
  VecX heat = pseudo_gt_heatmap(scene, 25.0);
  double mean = heat.mean();
  bool pass = mean > 0.05 && mean < 0.15;
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "10 instances x 10k points, mean pseudo heatmap = %.4f in [0.05, 0.15]",
                mean);
  report(7, pass, detail);
}

// ---------------------------------------------------------------------------
// criterion 8: loss identities

void criterion_8() {
  bool pass = true;
  std::string failed;

  SceneConfig config;
  config.n_instances = 4;
  config.min_points = 80;
  config.max_points = 150;
  config.background_points = 100;
  SyntheticScene scene = generate_scene(config, 88);
  VecX heat = pseudo_gt_heatmap(scene, 25.0);
  if (center_loss(heat, heat, scene.instance_ids) != 0.0) {
    pass = false;
    failed += " center";
  }

  MatX target(4, 4);
  target << 0, 1, 0, 0,
            1, 0, 0, 0,
            0, 0, 0, 1,
            0, 0, 1, 0;
  if (aggre_loss(target, target) > 1e-6) {
    pass = false;
    failed += " aggre";
  }

  // identical hard masks: dice term exactly zero, and a pair at IoU <= 0.25
  // contributes nothing
  MatX soft(2, 8);
  soft << 1, 1, 1, 0, 0, 0, 0, 0,
          1, 1, 0, 0, 0, 0, 0, 0;
  std::vector<std::vector<char>> gt_masks = {{1, 1, 1, 0, 0, 0, 0, 0},
                                             {0, 0, 1, 1, 1, 1, 1, 1}};
  Assignment assignment;
  assignment.pairs = {{0, 0}, {1, 1}};
  MaskLossResult ml = mask_loss(soft, gt_masks, assignment);
  // pair (1,1) has IoU 1/8 <= 0.25 -> excluded; pair (0,0) dice is exactly 0
  double dice_term = 1.0 - 2.0 * 3.0 / (3.0 + 3.0);
  if (ml.matched != 1 || std::abs(ml.value - dice_term) > 2e-7) {
    pass = false;
    failed += " mask";
  }

  MatX offsets = gt_offsets(scene);
  std::vector<char> is_instance(scene.size());
  for (int i = 0; i < scene.size(); ++i) is_instance[i] = scene.instance_ids[i] >= 0;
  if (offset_loss(offsets, offsets, is_instance) != 0.0) {
    pass = false;
    failed += " offset";
  }

  report(8, pass,
         pass ? "center/aggre/mask-dice/gating/offset identities hold"
              : "failed:" + failed);
}

// ---------------------------------------------------------------------------
// criteria 9 and 10: crowded noisy scenes

SceneConfig crowded_scene_config() {
  SceneConfig config;
  config.n_instances = 10;
  config.min_points = 25;
  config.max_points = 600;
  config.min_separation = 1.0;
  config.min_size = 0.25;
  config.max_size = 0.9;
  config.background_points = 1200;
  config.room_extent = Vec3(8, 8, 3);
  config.density_points_per_m3 = 600;  // small instances get weak peaks
  return config;
}

PipelineConfig crowded_pipeline_config() {
  PipelineConfig config;
  config.aggregation = AggregationMode::Analytic;
  config.min_fragment_points = 10;  // desk-scale instances go down to ~25 pts
  return config;
}

void criterion_9() {
  PipelineConfig ln = crowded_pipeline_config();
  PipelineConfig plain = ln;
  plain.mining = MiningMode::PlainNms;
  PipelineConfig random_mining = ln;
  random_mining.mining = MiningMode::Random;
  PipelineConfig agg_off = ln;
  agg_off.aggregation = AggregationMode::Off;

  std::vector<SyntheticScene> scenes;
  std::vector<SimulatedPredictions> preds;
  for (int s = 0; s < 30; ++s) {
    scenes.push_back(generate_scene(crowded_scene_config(), 9000 + s));
    NoiseSpec noise;
    noise.sigma_offset = 0.1;
    noise.sigma_heatmap = 0.05;
    noise.seed = 100 + s;
    preds.push_back(simulate_predictions(scenes.back(), noise));
  }
  auto rows = run_ablation({{"ln_nms", ln},
                            {"plain_nms", plain},
                            {"random", random_mining},
                            {"agg_off", agg_off}},
                           scenes, preds);
  double ap_ln = rows[0].metrics.ap50;
  double ap_plain = rows[1].metrics.ap50;
  double ap_random = rows[2].metrics.ap50;
  double ap_off = rows[3].metrics.ap50;
  const double tol = 0.02;
  bool pass = ap_ln >= ap_plain - tol && ap_plain >= ap_random - tol &&
              ap_ln >= ap_off - tol;
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "AP@50 ln=%.4f >= plain=%.4f >= random=%.4f; agg on=%.4f >= off=%.4f "
                "(tol %.2f)",
                ap_ln, ap_plain, ap_random, ap_ln, ap_off, tol);
  report(9, pass, detail);
}

void criterion_10() {
  PipelineConfig config = crowded_pipeline_config();
  std::vector<double> levels = {0.0, 0.05, 0.15, 0.30};
  std::vector<double> ap50;
  for (double sigma : levels) {
    std::vector<PredictionSet> preds;
    std::vector<GroundTruthSet> gts;
    for (int s = 0; s < 20; ++s) {
      SyntheticScene scene = generate_scene(crowded_scene_config(), 5000 + s);
      NoiseSpec noise;
      noise.sigma_offset = sigma;
      noise.sigma_heatmap = 0.05;
      noise.sigma_feature = 0.3;  // imperfect features make localization matter
      noise.seed = 300 + s;
      SimulatedPredictions sim = simulate_predictions(scene, noise);
      SegmentationResult result = run_pipeline(scene, sim, config);
      preds.push_back(result_predictions(result));
      gts.push_back(scene_ground_truth(scene));
    }
    ap50.push_back(map_suite(preds, gts).ap50);
  }
  bool pass = true;
  for (size_t k = 1; k < ap50.size(); ++k) {
    if (ap50[k] > ap50[k - 1] + 0.02) pass = false;
  }
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "AP@50 over sigma_offset {0, 0.05, 0.15, 0.30}: %.4f %.4f %.4f %.4f "
                "(non-increasing +-0.02)",
                ap50[0], ap50[1], ap50[2], ap50[3]);
  report(10, pass, detail);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  std::printf(
      "criterion 11: N/A   published leaderboard numbers require the trained backbone "
      "and full datasets; excluded by design, covered by criteria 2-10\n");
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
