#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "kernelseg/point_cloud.hpp"
#include "kernelseg/types.hpp"

namespace kernelseg {

/// Ground-truth record for one instance. `centroid` is the mean of the
/// member points and `max_side` the longest side of their axis-aligned
/// bounding box.
struct InstanceRecord {
  int id = 0;
  int semantic_class = 0;
  Vec3 centroid = Vec3::Zero();
  Vec3 aabb_min = Vec3::Zero();
  Vec3 aabb_max = Vec3::Zero();
  double max_side = 0.0;
};

/// Synthetic indoor-like scene. instance_ids use -1 for background points;
/// instance ids are contiguous 0..G-1 and every instance point carries the
/// semantic class of its instance. Class 0 is reserved for background.
struct SyntheticScene {
  PointCloud cloud;
  std::vector<int> instance_ids;
  std::vector<int> semantic_labels;
  std::vector<InstanceRecord> instances;
  int num_classes = 0;

  int size() const { return cloud.size(); }
};

enum class ShapeKind { Box, Ellipsoid };

struct SceneConfig {
  int n_instances = 8;
  int min_points = 150;
  int max_points = 600;
  int num_classes = 8;  // includes the background class 0
  Vec3 room_extent{8.0, 8.0, 3.0};
  double min_separation = 0.6;
  double min_size = 0.3;   // shortest allowed aabb side
  double max_size = 1.2;   // longest allowed aabb side
  bool boxes = true;
  bool ellipsoids = true;
  int background_points = 1000;
  // When positive, the point count of an instance is density * volume,
  // clamped to [min_points, max_points]. Small instances then get sparse,
  // weak heatmap peaks, which is what separates the mining strategies.
  double density_points_per_m3 = 0.0;
  int placement_attempts = 1000;
};

struct generation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Generates a scene deterministically from (config, seed). Throws
/// generation_error when the requested separation cannot be packed into the
/// room extent within the configured attempt budget.
SyntheticScene generate_scene(const SceneConfig& config, uint64_t seed);

/// Per-point vectors to the instance centroid; zero rows for background.
MatX gt_offsets(const SyntheticScene& scene);

}  // namespace kernelseg
