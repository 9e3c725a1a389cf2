#include "kernelseg/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kernelseg {

SpatialGrid build_grid(const MatX& positions, double cell_size) {
  if (!(cell_size > 0.0)) {
    throw std::invalid_argument("build_grid: cell_size must be positive");
  }
  SpatialGrid grid;
  grid.cell_size = cell_size;
  grid.point_count = static_cast<int>(positions.rows());
  for (int i = 0; i < grid.point_count; ++i) {
    grid.cells[grid.cell_of(positions.row(i))].push_back(i);
  }
  return grid;
}

std::vector<int> radius_query(const SpatialGrid& grid, const MatX& positions,
                              const Vec3& center, double radius) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("radius_query: radius must be positive");
  }
  std::vector<int> result;
  const double r2 = radius * radius;
  SpatialGrid::CellKey lo = grid.cell_of(center - Vec3::Constant(radius));
  SpatialGrid::CellKey hi = grid.cell_of(center + Vec3::Constant(radius));
  for (int64_t cx = lo.x; cx <= hi.x; ++cx) {
    for (int64_t cy = lo.y; cy <= hi.y; ++cy) {
      for (int64_t cz = lo.z; cz <= hi.z; ++cz) {
        auto it = grid.cells.find({cx, cy, cz});
        if (it == grid.cells.end()) continue;
        for (int idx : it->second) {
          if ((positions.row(idx).transpose() - center).squaredNorm() < r2) {
            result.push_back(idx);
          }
        }
      }
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

VoxelDownsampleResult voxel_downsample(const PointCloud& cloud, double voxel_size) {
  if (!(voxel_size > 0.0)) {
    throw std::invalid_argument("voxel_downsample: voxel_size must be positive");
  }
  const int n = cloud.size();
  SpatialGrid keyer;
  keyer.cell_size = voxel_size;

  std::unordered_map<SpatialGrid::CellKey, int, SpatialGrid::CellHash> voxel_index;
  std::vector<int> mapping(n, -1);
  std::vector<int> counts;
  std::vector<Vec3> position_sums;
  std::vector<Vec3> color_sums;
  const bool with_colors = cloud.has_colors();

  for (int i = 0; i < n; ++i) {
    auto key = keyer.cell_of(cloud.positions.row(i));
    auto [it, inserted] = voxel_index.try_emplace(key, static_cast<int>(counts.size()));
    if (inserted) {
      counts.push_back(0);
      position_sums.emplace_back(Vec3::Zero());
      if (with_colors) color_sums.emplace_back(Vec3::Zero());
    }
    const int v = it->second;
    mapping[i] = v;
    counts[v] += 1;
    position_sums[v] += cloud.positions.row(i).transpose();
    if (with_colors) color_sums[v] += cloud.colors.row(i).transpose();
  }

  const int m = static_cast<int>(counts.size());
  VoxelDownsampleResult out;
  out.cloud.positions.resize(m, 3);
  if (with_colors) out.cloud.colors.resize(m, 3);
  for (int v = 0; v < m; ++v) {
    out.cloud.positions.row(v) = (position_sums[v] / counts[v]).transpose();
    if (with_colors) out.cloud.colors.row(v) = (color_sums[v] / counts[v]).transpose();
  }
  out.point_to_voxel = std::move(mapping);
  return out;
}

}  // namespace kernelseg
