#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "kernelseg/pipeline.hpp"

namespace kernelseg {

/// Writes result.json: per-point labels, per-instance class/confidence,
/// loss diagnostics, per-scene metrics. Floats are rounded to 6 decimals so
/// reruns are byte-identical.
void write_result_json(const std::filesystem::path& file, const std::string& scene_name,
                       const SegmentationResult& result);

/// Minimal result payload for re-evaluation.
struct StoredResult {
  std::string scene_name;
  int num_points = 0;
  std::vector<int> hard_labels;
  std::vector<int> instance_classes;
  std::vector<double> confidences;
};
StoredResult load_result_json(const std::filesystem::path& file);
PredictionSet stored_result_predictions(const StoredResult& stored);

/// timings.csv with one row per scene: encoding/decoding/postprocess/total ms.
void write_timings_csv(const std::filesystem::path& file,
                       const std::vector<std::pair<std::string, StageTimings>>& rows);

/// masks.ply: scene points colored by predicted instance id.
void write_masks_ply(const std::filesystem::path& file, const MatX& positions,
                     const std::vector<int>& labels);

/// ablation.csv with a fixed header and one row per config variant.
void write_ablation_csv(const std::filesystem::path& file,
                        const std::vector<AblationRow>& rows);

}  // namespace kernelseg
