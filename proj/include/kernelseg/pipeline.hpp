#pragma once

#include <set>
#include <string>
#include <vector>

#include "kernelseg/aggregation.hpp"
#include "kernelseg/kernels.hpp"
#include "kernelseg/metrics.hpp"
#include "kernelseg/mining.hpp"
#include "kernelseg/postprocess.hpp"
#include "kernelseg/scene.hpp"
#include "kernelseg/simulate.hpp"

namespace kernelseg {

enum class MiningMode { LnNms, PlainNms, Random };
enum class AggregationMode { Off, Oracle, Analytic };

struct SuperpointSpec {
  enum class Method { Oracle, Grid };
  Method method = Method::Oracle;
  double impurity = 0.0;
  double cell = 0.25;
  uint64_t seed = 0;
};

struct PipelineConfig {
  MiningMode mining = MiningMode::LnNms;
  AggregationMode aggregation = AggregationMode::Analytic;
  KernelHead head = KernelHead::Prototype;
  std::vector<int> decoder_channels{16, 1};
  MiningParams mining_params;
  uint64_t random_mining_seed = 0;
  double merge_threshold = 0.5;
  double analytic_beta0 = 4.0;
  double analytic_beta1 = 2.0;
  PrototypeHeadParams prototype;
  bool use_coverage = true;
  bool use_superpoints = false;
  SuperpointSpec superpoints;
  int min_fragment_points = 50;
  NoiseSpec noise;
  int feature_dim = 32;
  int class_embedding_dim = 16;
  double heatmap_alpha = 25.0;
  double mismatch_penalty = 1.0;
  std::set<int> background_classes{0};
  // Table-7 style diagnostic: pool instance features over all points of the
  // center candidate's ground-truth instance instead of over candidates.
  bool full_instance_features = false;
};

struct StageTimings {
  double encoding_ms = 0.0;  // mining + aggregation + kernel generation
  double decoding_ms = 0.0;
  double postprocess_ms = 0.0;
  double total_ms = 0.0;
};

struct LossReport {
  double center = 0.0;
  double aggre = 0.0;
  double mask = 0.0;
  double semantic = 0.0;
  double offset = 0.0;
  double total = 0.0;
  bool has_merge_scores = false;
  int mask_pairs = 0;
};

struct SegmentationResult {
  bool empty = false;  // no candidates were mined
  MatX soft_masks;     // kept instances x N
  std::vector<int> hard_labels;
  std::vector<double> confidences;
  std::vector<int> instance_classes;
  MatX instance_centroids;
  LossReport losses;
  StageTimings timings;
  MetricsReport metrics;
};

SegmentationResult run_pipeline(const SyntheticScene& scene,
                                const SimulatedPredictions& predictions,
                                const PipelineConfig& config);

/// Prediction/ground-truth sets for the metric suite, derived from hard labels.
PredictionSet result_predictions(const SegmentationResult& result);
GroundTruthSet scene_ground_truth(const SyntheticScene& scene);

struct AblationRow {
  std::string name;
  PipelineConfig config;
  MetricsReport metrics;
};

/// Runs every config over the same scene set and reports one row per config.
std::vector<AblationRow> run_ablation(
    const std::vector<std::pair<std::string, PipelineConfig>>& configs,
    const std::vector<SyntheticScene>& scenes,
    const std::vector<SimulatedPredictions>& predictions);

}  // namespace kernelseg
