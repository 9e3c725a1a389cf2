#include "kernelseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kernelseg/matching.hpp"

namespace kernelseg {

ApResult ap_at_iou(const std::vector<PredictionSet>& predictions,
                   const std::vector<GroundTruthSet>& ground_truth, double iou_threshold) {
  if (predictions.size() != ground_truth.size()) {
    throw std::invalid_argument("ap_at_iou: scene count mismatch");
  }
  std::set<int> classes;
  for (const auto& scene : ground_truth) {
    for (const auto& gt : scene) classes.insert(gt.semantic_class);
  }

  ApResult result;
  for (int cls : classes) {
    struct Ranked {
      double confidence;
      int scene;
      int index;
    };
    std::vector<Ranked> ranked;
    int total_gt = 0;
    for (size_t s = 0; s < predictions.size(); ++s) {
      for (size_t p = 0; p < predictions[s].size(); ++p) {
        if (predictions[s][p].semantic_class == cls) {
          ranked.push_back({predictions[s][p].confidence, static_cast<int>(s),
                            static_cast<int>(p)});
        }
      }
      for (const auto& gt : ground_truth[s]) total_gt += gt.semantic_class == cls;
    }
    if (total_gt == 0) continue;

    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const Ranked& a, const Ranked& b) {
                       return a.confidence > b.confidence;
                     });

    std::vector<std::vector<char>> gt_used(ground_truth.size());
    for (size_t s = 0; s < ground_truth.size(); ++s) {
      gt_used[s].assign(ground_truth[s].size(), 0);
    }

    std::vector<char> is_tp(ranked.size(), 0);
    for (size_t r = 0; r < ranked.size(); ++r) {
      const auto& pred = predictions[ranked[r].scene][ranked[r].index];
      const auto& gts = ground_truth[ranked[r].scene];
      int best = -1;
      double best_iou = 0.0;
      for (size_t g = 0; g < gts.size(); ++g) {
        if (gts[g].semantic_class != cls || gt_used[ranked[r].scene][g]) continue;
        double overlap = iou(pred.mask, gts[g].mask);
        if (overlap >= iou_threshold && overlap > best_iou) {
          best_iou = overlap;
          best = static_cast<int>(g);
        }
      }
      if (best >= 0) {
        gt_used[ranked[r].scene][best] = 1;
        is_tp[r] = 1;
      }
    }

    // Area under the all-point interpolated precision-recall curve. Recall
    // increments are exactly is_tp / total_gt, so the area is the sum of the
    // interpolated precision at each true-positive rank divided by total_gt;
    // this form is exact (a perfect ranking yields exactly 1.0).
    std::vector<double> precision(ranked.size());
    int tp = 0;
    for (size_t r = 0; r < ranked.size(); ++r) {
      tp += is_tp[r];
      precision[r] = static_cast<double>(tp) / (r + 1);
    }
    double ap_sum = 0.0;
    double running_max = 0.0;
    for (int r = static_cast<int>(ranked.size()) - 1; r >= 0; --r) {
      running_max = std::max(running_max, precision[r]);
      if (is_tp[r]) ap_sum += running_max;
    }
    result.per_class[cls] = ap_sum / total_gt;
  }

  if (!result.per_class.empty()) {
    double sum = 0.0;
    for (const auto& [cls, ap] : result.per_class) sum += ap;
    result.mean = sum / result.per_class.size();
  }
  return result;
}

MetricsReport map_suite(const std::vector<PredictionSet>& predictions,
                        const std::vector<GroundTruthSet>& ground_truth) {
  MetricsReport report;
  for (int t = 50; t <= 95; t += 5) report.thresholds.push_back(t / 100.0);

  double sum = 0.0;
  for (size_t t = 0; t < report.thresholds.size(); ++t) {
    ApResult ap = ap_at_iou(predictions, ground_truth, report.thresholds[t]);
    sum += ap.mean;
    for (const auto& [cls, value] : ap.per_class) {
      auto& row = report.per_class_ap[cls];
      row.resize(report.thresholds.size(), 0.0);
      row[t] = value;
    }
    if (report.thresholds[t] == 0.5) report.ap50 = ap.mean;
  }
  report.map = report.thresholds.empty() ? 0.0 : sum / report.thresholds.size();
  report.ap25 = ap_at_iou(predictions, ground_truth, 0.25).mean;

  S3disMetrics quartet = s3dis_metrics(predictions, ground_truth);
  report.mcov = quartet.mcov;
  report.mwcov = quartet.mwcov;
  report.mprec = quartet.mprec;
  report.mrec = quartet.mrec;
  return report;
}

std::vector<std::optional<Box>> masks_to_boxes(const PredictionSet& predictions,
                                               const MatX& positions) {
  std::vector<std::optional<Box>> boxes;
  for (const auto& pred : predictions) {
    Box box{Vec3::Zero(), Vec3::Zero()};
    bool any = false;
    for (size_t i = 0; i < pred.mask.size(); ++i) {
      if (!pred.mask[i]) continue;
      Vec3 p = positions.row(static_cast<int>(i)).transpose();
      if (!any) {
        box.min_corner = p;
        box.max_corner = p;
        any = true;
      } else {
        box.min_corner = box.min_corner.cwiseMin(p);
        box.max_corner = box.max_corner.cwiseMax(p);
      }
    }
    boxes.push_back(any ? std::optional<Box>(box) : std::nullopt);
  }
  return boxes;
}

double box_iou(const Box& a, const Box& b) {
  double inter = 1.0, vol_a = 1.0, vol_b = 1.0;
  for (int axis = 0; axis < 3; ++axis) {
    double lo = std::max(a.min_corner[axis], b.min_corner[axis]);
    double hi = std::min(a.max_corner[axis], b.max_corner[axis]);
    inter *= std::max(0.0, hi - lo);
    vol_a *= std::max(0.0, a.max_corner[axis] - a.min_corner[axis]);
    vol_b *= std::max(0.0, b.max_corner[axis] - b.min_corner[axis]);
  }
  double uni = vol_a + vol_b - inter;
  return uni <= 0.0 ? 0.0 : inter / uni;
}

S3disMetrics s3dis_metrics(const std::vector<PredictionSet>& predictions,
                           const std::vector<GroundTruthSet>& ground_truth) {
  if (predictions.size() != ground_truth.size()) {
    throw std::invalid_argument("s3dis_metrics: scene count mismatch");
  }
  S3disMetrics metrics;

  double cov_sum = 0.0, wcov_sum = 0.0, weight_sum = 0.0;
  int total_gt = 0;
  for (size_t s = 0; s < ground_truth.size(); ++s) {
    for (const auto& gt : ground_truth[s]) {
      double best = 0.0;
      for (const auto& pred : predictions[s]) {
        best = std::max(best, iou(gt.mask, pred.mask));
      }
      double weight = std::count(gt.mask.begin(), gt.mask.end(), 1);
      cov_sum += best;
      wcov_sum += weight * best;
      weight_sum += weight;
      ++total_gt;
    }
  }
  metrics.mcov = total_gt > 0 ? cov_sum / total_gt : 0.0;
  metrics.mwcov = weight_sum > 0 ? wcov_sum / weight_sum : 0.0;

  // Greedy matching at IoU >= 0.5 in confidence order, pooled over scenes.
  struct Ranked {
    double confidence;
    int scene;
    int index;
  };
  std::vector<Ranked> ranked;
  for (size_t s = 0; s < predictions.size(); ++s) {
    for (size_t p = 0; p < predictions[s].size(); ++p) {
      ranked.push_back({predictions[s][p].confidence, static_cast<int>(s),
                        static_cast<int>(p)});
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Ranked& a, const Ranked& b) {
                     return a.confidence > b.confidence;
                   });
  std::vector<std::vector<char>> gt_used(ground_truth.size());
  for (size_t s = 0; s < ground_truth.size(); ++s) {
    gt_used[s].assign(ground_truth[s].size(), 0);
  }
  int tp = 0;
  for (const auto& r : ranked) {
    const auto& pred = predictions[r.scene][r.index];
    int best = -1;
    double best_iou = 0.0;
    for (size_t g = 0; g < ground_truth[r.scene].size(); ++g) {
      if (gt_used[r.scene][g]) continue;
      double overlap = iou(pred.mask, ground_truth[r.scene][g].mask);
      if (overlap >= 0.5 && overlap > best_iou) {
        best_iou = overlap;
        best = static_cast<int>(g);
      }
    }
    if (best >= 0) {
      gt_used[r.scene][best] = 1;
      ++tp;
    }
  }
  metrics.mprec = ranked.empty() ? 0.0 : static_cast<double>(tp) / ranked.size();
  metrics.mrec = total_gt == 0 ? 0.0 : static_cast<double>(tp) / total_gt;
  return metrics;
}

namespace {

double round6(double v) { return std::round(v * 1e6) / 1e6; }

}  // namespace

std::string report_to_json(const MetricsReport& report) {
  nlohmann::json j;
  j["mAP"] = round6(report.map);
  j["AP@50"] = round6(report.ap50);
  j["AP@25"] = round6(report.ap25);
  j["mCov"] = round6(report.mcov);
  j["mWCov"] = round6(report.mwcov);
  j["mPrec"] = round6(report.mprec);
  j["mRec"] = round6(report.mrec);
  j["thresholds"] = report.thresholds;
  nlohmann::json per_class = nlohmann::json::object();
  for (const auto& [cls, aps] : report.per_class_ap) {
    std::vector<double> rounded;
    for (double ap : aps) rounded.push_back(round6(ap));
    per_class[std::to_string(cls)] = rounded;
  }
  j["per_class_ap"] = per_class;
  return j.dump(2);
}

std::string report_to_table(const MetricsReport& report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6);
  out << "metric        value\n";
  out << "mAP      " << std::setw(10) << report.map << "\n";
  out << "AP@50    " << std::setw(10) << report.ap50 << "\n";
  out << "AP@25    " << std::setw(10) << report.ap25 << "\n";
  out << "mCov     " << std::setw(10) << report.mcov << "\n";
  out << "mWCov    " << std::setw(10) << report.mwcov << "\n";
  out << "mPrec    " << std::setw(10) << report.mprec << "\n";
  out << "mRec     " << std::setw(10) << report.mrec << "\n";
  return out.str();
}

}  // namespace kernelseg
