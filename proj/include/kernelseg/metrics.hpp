#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kernelseg/types.hpp"

namespace kernelseg {

struct InstancePrediction {
  std::vector<char> mask;
  int semantic_class = 0;
  double confidence = 0.0;
};

struct GroundTruthInstance {
  std::vector<char> mask;
  int semantic_class = 0;
};

using PredictionSet = std::vector<InstancePrediction>;
using GroundTruthSet = std::vector<GroundTruthInstance>;

struct ApResult {
  std::map<int, double> per_class;
  double mean = 0.0;
};

/// Average precision at one IoU threshold. Predictions are ranked by
/// confidence (ties keep scene order) and greedily matched to the unmatched
/// same-class ground truth with the highest IoU >= threshold in their scene.
/// AP is the area under the all-point interpolated PR curve; classes without
/// ground truth are excluded from the mean.
ApResult ap_at_iou(const std::vector<PredictionSet>& predictions,
                   const std::vector<GroundTruthSet>& ground_truth, double iou_threshold);

struct MetricsReport {
  std::vector<double> thresholds;             // 0.50 .. 0.95
  std::map<int, std::vector<double>> per_class_ap;  // class -> AP per threshold
  double map = 0.0;
  double ap50 = 0.0;
  double ap25 = 0.0;
  double mcov = 0.0;
  double mwcov = 0.0;
  double mprec = 0.0;
  double mrec = 0.0;
};

/// Full metric suite: mAP over IoU 0.50:0.05:0.95, AP@50, AP@25, and the
/// coverage/precision/recall quartet at IoU 0.5.
MetricsReport map_suite(const std::vector<PredictionSet>& predictions,
                        const std::vector<GroundTruthSet>& ground_truth);

struct Box {
  Vec3 min_corner;
  Vec3 max_corner;
};

/// Axis-aligned box over the member points of each mask; empty masks are
/// skipped (nullopt).
std::vector<std::optional<Box>> masks_to_boxes(const PredictionSet& predictions,
                                               const MatX& positions);

/// Volumetric intersection-over-union of two axis-aligned boxes.
double box_iou(const Box& a, const Box& b);

struct S3disMetrics {
  double mcov = 0.0;
  double mwcov = 0.0;
  double mprec = 0.0;
  double mrec = 0.0;
};

/// Coverage metrics pooled over scenes: mCov averages each ground truth's
/// best IoU against same-scene predictions, mWCov weights that average by
/// ground-truth point counts, and precision/recall come from greedy matching
/// at IoU >= 0.5 in confidence order.
S3disMetrics s3dis_metrics(const std::vector<PredictionSet>& predictions,
                           const std::vector<GroundTruthSet>& ground_truth);

std::string report_to_json(const MetricsReport& report);
std::string report_to_table(const MetricsReport& report);

}  // namespace kernelseg
