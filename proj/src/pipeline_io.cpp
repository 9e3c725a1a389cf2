#include "kernelseg/pipeline_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include <json.hpp>

#include "kernelseg/scene_io.hpp"

namespace kernelseg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double round6(double v) { return std::round(v * 1e6) / 1e6; }

std::string mining_name(MiningMode mode) {
  switch (mode) {
    case MiningMode::LnNms: return "ln_nms";
    case MiningMode::PlainNms: return "plain_nms";
    default: return "random";
  }
}

std::string aggregation_name(AggregationMode mode) {
  switch (mode) {
    case AggregationMode::Off: return "off";
    case AggregationMode::Oracle: return "oracle";
    default: return "analytic";
  }
}

std::string head_name(KernelHead head) {
  return head == KernelHead::Prototype ? "prototype" : "direct";
}

}  // namespace

void write_result_json(const fs::path& file, const std::string& scene_name,
                       const SegmentationResult& result) {
  json j;
  j["scene"] = scene_name;
  j["num_points"] = static_cast<int>(result.hard_labels.size());
  j["empty"] = result.empty;
  j["labels"] = result.hard_labels;
  json instances = json::array();
  for (size_t k = 0; k < result.confidences.size(); ++k) {
    instances.push_back({{"id", static_cast<int>(k)},
                         {"class", result.instance_classes[k]},
                         {"confidence", round6(result.confidences[k])}});
  }
  j["instances"] = instances;
  j["losses"] = {{"center", round6(result.losses.center)},
                 {"aggre", round6(result.losses.aggre)},
                 {"mask", round6(result.losses.mask)},
                 {"semantic", round6(result.losses.semantic)},
                 {"offset", round6(result.losses.offset)},
                 {"total", round6(result.losses.total)},
                 {"mask_pairs", result.losses.mask_pairs},
                 {"has_merge_scores", result.losses.has_merge_scores}};
  j["metrics"] = {{"mAP", round6(result.metrics.map)},
                  {"AP@50", round6(result.metrics.ap50)},
                  {"AP@25", round6(result.metrics.ap25)},
                  {"mCov", round6(result.metrics.mcov)},
                  {"mWCov", round6(result.metrics.mwcov)},
                  {"mPrec", round6(result.metrics.mprec)},
                  {"mRec", round6(result.metrics.mrec)}};
  std::ofstream out(file);
  if (!out) throw io_error("cannot write " + file.string());
  out << j.dump(2) << "\n";
}

StoredResult load_result_json(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw io_error("cannot read " + file.string());
  json j;
  try {
    in >> j;
    StoredResult stored;
    stored.scene_name = j.at("scene").get<std::string>();
    stored.num_points = j.at("num_points").get<int>();
    stored.hard_labels = j.at("labels").get<std::vector<int>>();
    for (const auto& inst : j.at("instances")) {
      stored.instance_classes.push_back(inst.at("class").get<int>());
      stored.confidences.push_back(inst.at("confidence").get<double>());
    }
    return stored;
  } catch (const json::exception& e) {
    throw io_error(file.string() + ": " + e.what());
  }
}

PredictionSet stored_result_predictions(const StoredResult& stored) {
  PredictionSet preds;
  for (size_t k = 0; k < stored.confidences.size(); ++k) {
    InstancePrediction pred;
    pred.mask.assign(stored.num_points, 0);
    int count = 0;
    for (int i = 0; i < stored.num_points; ++i) {
      if (stored.hard_labels[i] == static_cast<int>(k)) {
        pred.mask[i] = 1;
        ++count;
      }
    }
    if (count == 0) continue;
    pred.semantic_class = stored.instance_classes[k];
    pred.confidence = stored.confidences[k];
    preds.push_back(std::move(pred));
  }
  return preds;
}

void write_timings_csv(const fs::path& file,
                       const std::vector<std::pair<std::string, StageTimings>>& rows) {
  std::ofstream out(file);
  if (!out) throw io_error("cannot write " + file.string());
  out << "scene,encoding_ms,decoding_ms,postprocess_ms,total_ms\n";
  out << std::fixed << std::setprecision(3);
  for (const auto& [name, t] : rows) {
    out << name << "," << t.encoding_ms << "," << t.decoding_ms << ","
        << t.postprocess_ms << "," << t.total_ms << "\n";
  }
}

void write_masks_ply(const fs::path& file, const MatX& positions,
                     const std::vector<int>& labels) {
  MatX colors(positions.rows(), 3);
  for (int i = 0; i < positions.rows(); ++i) {
    colors.row(i) = instance_color(labels[i]).transpose();
  }
  write_ply(file, positions, colors);
}

void write_ablation_csv(const fs::path& file, const std::vector<AblationRow>& rows) {
  std::ofstream out(file);
  if (!out) throw io_error("cannot write " + file.string());
  out << "variant,mining,aggregation,head,mAP,AP@50,AP@25,mCov,mWCov,mPrec,mRec\n";
  out << std::fixed << std::setprecision(6);
  for (const auto& row : rows) {
    out << row.name << "," << mining_name(row.config.mining) << ","
        << aggregation_name(row.config.aggregation) << "," << head_name(row.config.head)
        << "," << row.metrics.map << "," << row.metrics.ap50 << "," << row.metrics.ap25
        << "," << row.metrics.mcov << "," << row.metrics.mwcov << "," << row.metrics.mprec
        << "," << row.metrics.mrec << "\n";
  }
}

}  // namespace kernelseg
