#include "kernelseg/pipeline.hpp"

#include <chrono>
#include <stdexcept>

#include "kernelseg/heatmap.hpp"
#include "kernelseg/matching.hpp"

namespace kernelseg {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<char> foreground_flags(const std::vector<int>& hard_labels,
                                   const std::set<int>& background_classes) {
  std::vector<char> flags(hard_labels.size());
  for (size_t i = 0; i < hard_labels.size(); ++i) {
    flags[i] = background_classes.count(hard_labels[i]) == 0;
  }
  return flags;
}

}  // namespace

PredictionSet result_predictions(const SegmentationResult& result) {
  PredictionSet preds;
  const int n = static_cast<int>(result.hard_labels.size());
  for (size_t k = 0; k < result.confidences.size(); ++k) {
    InstancePrediction pred;
    pred.mask.assign(n, 0);
    int count = 0;
    for (int i = 0; i < n; ++i) {
      if (result.hard_labels[i] == static_cast<int>(k)) {
        pred.mask[i] = 1;
        ++count;
      }
    }
    if (count == 0) continue;  // instance lost all points in refinement
    pred.semantic_class = result.instance_classes[k];
    pred.confidence = result.confidences[k];
    preds.push_back(std::move(pred));
  }
  return preds;
}

GroundTruthSet scene_ground_truth(const SyntheticScene& scene) {
  GroundTruthSet gts(scene.instances.size());
  for (size_t g = 0; g < scene.instances.size(); ++g) {
    gts[g].mask.assign(scene.size(), 0);
    gts[g].semantic_class = scene.instances[g].semantic_class;
  }
  for (int i = 0; i < scene.size(); ++i) {
    if (scene.instance_ids[i] >= 0) gts[scene.instance_ids[i]].mask[i] = 1;
  }
  return gts;
}

SegmentationResult run_pipeline(const SyntheticScene& scene,
                                const SimulatedPredictions& predictions,
                                const PipelineConfig& config) {
  SegmentationResult result;
  const int n = scene.size();
  auto t_total = Clock::now();

  // Hard semantics and foreground flags from the predicted scores.
  std::vector<int> hard_labels(n);
  for (int i = 0; i < n; ++i) {
    int best = 0;
    for (int c = 1; c < predictions.semantic_scores.cols(); ++c) {
      if (predictions.semantic_scores(i, c) > predictions.semantic_scores(i, best)) best = c;
    }
    hard_labels[i] = best;
  }
  std::vector<char> is_foreground = foreground_flags(hard_labels, config.background_classes);

  // Reference targets used by the diagnostics.
  VecX target_heat = pseudo_gt_heatmap(scene, config.heatmap_alpha);
  MatX target_offsets = gt_offsets(scene);
  std::vector<char> is_instance(n);
  for (int i = 0; i < n; ++i) is_instance[i] = scene.instance_ids[i] >= 0;

  result.losses.center = center_loss(predictions.heatmap, target_heat, scene.instance_ids);
  result.losses.semantic = semantic_loss(predictions.semantic_scores, scene.semantic_labels);
  result.losses.offset = offset_loss(predictions.offsets, target_offsets, is_instance);

  // --- Encoding: mining, aggregation, kernel generation -------------------
  auto t_encode = Clock::now();
  SpatialGrid grid = build_grid(scene.cloud.positions, config.mining_params.radius);
  std::vector<Candidate> candidates;
  switch (config.mining) {
    case MiningMode::LnNms:
      candidates = ln_nms(predictions.heatmap, scene.cloud.positions, hard_labels,
                          is_foreground, predictions.point_features, predictions.offsets,
                          config.mining_params, grid);
      break;
    case MiningMode::PlainNms:
      candidates = plain_nms(predictions.heatmap, scene.cloud.positions, hard_labels,
                             is_foreground, predictions.point_features, predictions.offsets,
                             config.mining_params, grid);
      break;
    case MiningMode::Random:
      candidates = random_candidates(predictions.heatmap, scene.cloud.positions, hard_labels,
                                     is_foreground, predictions.point_features,
                                     predictions.offsets, config.mining_params, grid,
                                     config.random_mining_seed);
      break;
  }

  if (candidates.empty()) {
    result.empty = true;
    result.hard_labels.assign(n, -1);
    result.soft_masks.resize(0, n);
    result.instance_centroids.resize(0, 3);
    result.losses.total = result.losses.center + result.losses.semantic +
                          result.losses.offset;
    result.timings.encoding_ms = ms_since(t_encode);
    result.timings.total_ms = ms_since(t_total);
    result.metrics = map_suite({result_predictions(result)}, {scene_ground_truth(scene)});
    return result;
  }

  VecX candidate_scores(candidates.size());
  for (size_t i = 0; i < candidates.size(); ++i) {
    candidate_scores[i] = candidates[i].centroid_score;
  }

  InstanceGroups groups;
  MatX merge_scores;
  if (config.aggregation == AggregationMode::Off) {
    groups.center_of.resize(candidates.size());
    for (size_t i = 0; i < candidates.size(); ++i) {
      groups.center_of[i] = static_cast<int>(i);
      groups.centers.push_back(static_cast<int>(i));
      groups.groups.push_back({static_cast<int>(i)});
    }
  } else {
    if (config.aggregation == AggregationMode::Oracle) {
      merge_scores = score_map_oracle(candidates, scene.instance_ids);
    } else {
      merge_scores = score_map_analytic(build_aggregation_features(candidates),
                                        config.analytic_beta0, config.analytic_beta1);
    }
    groups = greedy_merge(merge_scores, candidate_scores, config.merge_threshold);
    result.losses.aggre =
        aggre_loss(merge_scores, score_map_oracle(candidates, scene.instance_ids));
    result.losses.has_merge_scores = true;
  }

  FusedInstances fused = fuse_instances(groups, candidates);
  if (config.full_instance_features) {
    // Diagnostic variant: pool features over every point of the center
    // candidate's ground-truth instance when it has one.
    for (int g = 0; g < groups.group_count(); ++g) {
      int gt = scene.instance_ids[candidates[groups.centers[g]].point_index];
      if (gt < 0) continue;
      VecX pooled = VecX::Zero(predictions.point_features.cols());
      int count = 0;
      for (int i = 0; i < n; ++i) {
        if (scene.instance_ids[i] == gt) {
          pooled += predictions.point_features.row(i).transpose();
          ++count;
        }
      }
      if (count > 0) fused.features.row(g) = (pooled / count).transpose();
    }
  }

  DecoderShape shape{static_cast<int>(predictions.point_features.cols()),
                     config.decoder_channels};
  std::vector<InstanceKernel> kernels =
      encode_kernels(fused.features, config.head, shape, config.prototype);
  result.timings.encoding_ms = ms_since(t_encode);

  // --- Decoding ------------------------------------------------------------
  auto t_decode = Clock::now();
  MatX soft_masks = decode_masks(predictions.point_features, scene.cloud.positions,
                                 fused.centroids, kernels, shape);
  result.timings.decoding_ms = ms_since(t_decode);

  // Diagnostics against ground truth use all decoded instances.
  SemanticVote vote = instance_semantic_vote(soft_masks, hard_labels);
  {
    MatX gt_centroids(scene.instances.size(), 3);
    std::vector<int> gt_classes(scene.instances.size());
    for (size_t g = 0; g < scene.instances.size(); ++g) {
      gt_centroids.row(g) = scene.instances[g].centroid.transpose();
      gt_classes[g] = scene.instances[g].semantic_class;
    }
    Assignment assignment =
        hungarian(cost_matrix(fused.centroids, vote.labels, gt_centroids, gt_classes,
                              config.mismatch_penalty));
    GroundTruthSet gts = scene_ground_truth(scene);
    std::vector<std::vector<char>> gt_masks;
    gt_masks.reserve(gts.size());
    for (auto& gt : gts) gt_masks.push_back(gt.mask);
    MaskLossResult mask = mask_loss(soft_masks, gt_masks, assignment);
    result.losses.mask = mask.value;
    result.losses.mask_pairs = mask.matched;
  }
  result.losses.total = result.losses.center + result.losses.aggre + result.losses.mask +
                        result.losses.semantic + result.losses.offset;

  // --- Post-processing -------------------------------------------------------
  auto t_post = Clock::now();
  std::vector<double> thresholds(soft_masks.rows());
  for (int k = 0; k < soft_masks.rows(); ++k) {
    std::vector<double> row(soft_masks.cols());
    for (int i = 0; i < soft_masks.cols(); ++i) row[i] = soft_masks(k, i);
    thresholds[k] = otsu_threshold(row);
  }

  // Small-fragment removal before coverage scoring.
  std::vector<int> kept;
  for (int k = 0; k < soft_masks.rows(); ++k) {
    int intra = 0;
    for (int i = 0; i < soft_masks.cols(); ++i) intra += soft_masks(k, i) > thresholds[k];
    if (intra >= config.min_fragment_points) kept.push_back(k);
  }
  result.soft_masks.resize(kept.size(), n);
  result.instance_centroids.resize(kept.size(), 3);
  std::vector<double> kept_thresholds(kept.size());
  result.instance_classes.resize(kept.size());
  for (size_t k = 0; k < kept.size(); ++k) {
    result.soft_masks.row(k) = soft_masks.row(kept[k]);
    result.instance_centroids.row(k) = fused.centroids.row(kept[k]);
    kept_thresholds[k] = thresholds[kept[k]];
    result.instance_classes[k] = vote.labels[kept[k]];
  }

  std::vector<int> labels;
  if (kept.empty()) {
    labels.assign(n, -1);  // every prediction was dropped as a fragment
  } else {
    labels = raw_labels(result.soft_masks);
    if (config.use_coverage) {
      std::vector<double> coverage =
          coverage_scores(result.soft_masks, labels, kept_thresholds);
      labels = refine_labels(result.soft_masks, coverage);
    }
  }
  if (config.use_superpoints) {
    SuperpointPartition partition =
        config.superpoints.method == SuperpointSpec::Method::Oracle
            ? oracle_superpoints(scene, config.superpoints.impurity, config.superpoints.seed)
            : grid_superpoints(scene.cloud.positions, config.superpoints.cell);
    labels = superpoint_refine(labels, partition);
  }
  result.hard_labels = std::move(labels);
  result.confidences = confidence_scores(result.soft_masks, predictions.semantic_scores,
                                         result.instance_classes, kept_thresholds);
  result.timings.postprocess_ms = ms_since(t_post);
  result.timings.total_ms = ms_since(t_total);

  result.metrics = map_suite({result_predictions(result)}, {scene_ground_truth(scene)});
  return result;
}

std::vector<AblationRow> run_ablation(
    const std::vector<std::pair<std::string, PipelineConfig>>& configs,
    const std::vector<SyntheticScene>& scenes,
    const std::vector<SimulatedPredictions>& predictions) {
  if (configs.empty()) throw std::invalid_argument("run_ablation: no configs");
  if (scenes.size() != predictions.size()) {
    throw std::invalid_argument("run_ablation: scene/prediction count mismatch");
  }
  std::vector<AblationRow> rows;
  for (const auto& [name, config] : configs) {
    std::vector<PredictionSet> preds;
    std::vector<GroundTruthSet> gts;
    for (size_t s = 0; s < scenes.size(); ++s) {
      SegmentationResult result = run_pipeline(scenes[s], predictions[s], config);
      preds.push_back(result_predictions(result));
      gts.push_back(scene_ground_truth(scenes[s]));
    }
    rows.push_back({name, config, map_suite(preds, gts)});
  }
  return rows;
}

}  // namespace kernelseg
