#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "kernelseg/scene.hpp"
#include "kernelseg/simulate.hpp"

namespace kernelseg {

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Scene directory layout:
///   cloud.ply   ASCII PLY with x,y,z floats and red,green,blue uchars
///   labels.json instance_ids, semantic_labels, num_classes and the
///               per-instance records {id, class, centroid, aabb}
///   pred.bin    optional simulated predictions (see below)
void save_scene(const std::filesystem::path& dir, const SyntheticScene& scene);
SyntheticScene load_scene(const std::filesystem::path& dir);

/// pred.bin: 32-byte header (magic "DKSIM001", u32 N, D, C, 12 reserved
/// bytes), then little-endian float32 blocks in order F_p, O, S, H.
void save_predictions(const std::filesystem::path& file, const SimulatedPredictions& preds);
SimulatedPredictions load_predictions(const std::filesystem::path& file);

/// Writes an ASCII PLY colored per point; used for scene clouds and for
/// instance-mask exports.
void write_ply(const std::filesystem::path& file, const MatX& positions, const MatX& colors);

struct PlyData {
  MatX positions;
  MatX colors;
};
PlyData read_ply(const std::filesystem::path& file);

/// Deterministic instance color for masks.ply exports (-1 is gray).
Vec3 instance_color(int instance_id);

}  // namespace kernelseg
