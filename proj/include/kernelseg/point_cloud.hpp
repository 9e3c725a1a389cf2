#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "kernelseg/types.hpp"

namespace kernelseg {

/// Point cloud with positions in meters and optional RGB colors in [0,1].
struct PointCloud {
  MatX positions;  // N x 3
  MatX colors;     // N x 3, or 0 x 0 when absent

  int size() const { return static_cast<int>(positions.rows()); }
  bool has_colors() const { return colors.rows() > 0; }
};

/// Uniform hash grid over point positions. Cell of a point is
/// floor(position / cell_size) componentwise. Immutable once built;
/// concurrent read-only queries are safe.
class SpatialGrid {
 public:
  struct CellKey {
    int64_t x, y, z;
    bool operator==(const CellKey&) const = default;
  };
  struct CellHash {
    size_t operator()(const CellKey& c) const {
      uint64_t h = 1469598103934665603ull;
      for (int64_t v : {c.x, c.y, c.z}) {
        h ^= static_cast<uint64_t>(v);
        h *= 1099511628211ull;
      }
      return static_cast<size_t>(h);
    }
  };
  using CellTable = std::unordered_map<CellKey, std::vector<int>, CellHash>;

  double cell_size = 0.0;
  int point_count = 0;
  CellTable cells;

  CellKey cell_of(const Vec3& p) const {
    return {static_cast<int64_t>(std::floor(p.x() / cell_size)),
            static_cast<int64_t>(std::floor(p.y() / cell_size)),
            static_cast<int64_t>(std::floor(p.z() / cell_size))};
  }
};

/// Builds a uniform grid over the rows of `positions`.
/// Throws std::invalid_argument for non-positive cell_size.
SpatialGrid build_grid(const MatX& positions, double cell_size);

/// Returns indices of points with strict Euclidean distance < radius from
/// `center`, sorted ascending. Throws std::invalid_argument for
/// non-positive radius.
std::vector<int> radius_query(const SpatialGrid& grid, const MatX& positions,
                              const Vec3& center, double radius);

struct VoxelDownsampleResult {
  PointCloud cloud;
  std::vector<int> point_to_voxel;  // total over input points
};

/// One output point per occupied voxel, at the centroid of its members.
/// Voxels are ordered by first occurrence of a member point, which makes the
/// operation idempotent on its own output. Throws std::invalid_argument for
/// non-positive voxel_size.
VoxelDownsampleResult voxel_downsample(const PointCloud& cloud, double voxel_size);

}  // namespace kernelseg
