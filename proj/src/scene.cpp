#include "kernelseg/scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace kernelseg {

namespace {

Vec3 palette_color(int instance_id) {
  // Deterministic palette: golden-ratio hue stepping, full saturation.
  double hue = std::fmod(0.12 + 0.61803398875 * instance_id, 1.0) * 6.0;
  int band = static_cast<int>(hue);
  double f = hue - band;
  switch (band % 6) {
    case 0: return {1.0, f, 0.15};
    case 1: return {1.0 - f, 1.0, 0.15};
    case 2: return {0.15, 1.0, f};
    case 3: return {0.15, 1.0 - f, 1.0};
    case 4: return {f, 0.15, 1.0};
    default: return {1.0, 0.15, 1.0 - f};
  }
}

}  // namespace

SyntheticScene generate_scene(const SceneConfig& config, uint64_t seed) {
  if (config.n_instances < 1) {
    throw std::invalid_argument("generate_scene: n_instances must be >= 1");
  }
  if (config.num_classes < 2) {
    throw std::invalid_argument("generate_scene: need at least 2 classes (0 is background)");
  }
  if (config.min_separation < 0.0) {
    throw std::invalid_argument("generate_scene: min_separation must be >= 0");
  }
  if (!config.boxes && !config.ellipsoids) {
    throw std::invalid_argument("generate_scene: no shape kinds enabled");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Place instance centers by rejection sampling with a bounded budget.
  std::vector<Vec3> centers;
  const double margin = 0.5 * config.max_size;
  for (int g = 0; g < config.n_instances; ++g) {
    bool placed = false;
    for (int attempt = 0; attempt < config.placement_attempts; ++attempt) {
      Vec3 c;
      for (int a = 0; a < 3; ++a) {
        double lo = std::min(margin, 0.5 * config.room_extent[a]);
        double hi = std::max(config.room_extent[a] - margin, lo);
        c[a] = lo + unit(rng) * (hi - lo);
      }
      bool ok = true;
      for (const Vec3& other : centers) {
        if ((c - other).norm() < config.min_separation) {
          ok = false;
          break;
        }
      }
      if (ok) {
        centers.push_back(c);
        placed = true;
        break;
      }
    }
    if (!placed) {
      throw generation_error("generate_scene: could not place instance " +
                             std::to_string(g) + " with separation " +
                             std::to_string(config.min_separation));
    }
  }

  SyntheticScene scene;
  scene.num_classes = config.num_classes;

  std::vector<Vec3> points;
  std::vector<Vec3> colors;
  std::uniform_int_distribution<int> class_dist(1, config.num_classes - 1);
  std::uniform_int_distribution<int> count_dist(config.min_points, config.max_points);

  for (int g = 0; g < config.n_instances; ++g) {
    ShapeKind kind;
    if (config.boxes && config.ellipsoids) {
      kind = unit(rng) < 0.5 ? ShapeKind::Box : ShapeKind::Ellipsoid;
    } else {
      kind = config.boxes ? ShapeKind::Box : ShapeKind::Ellipsoid;
    }
    Vec3 sides;
    for (int a = 0; a < 3; ++a) {
      sides[a] = config.min_size + unit(rng) * (config.max_size - config.min_size);
    }
    int n_points;
    if (config.density_points_per_m3 > 0.0) {
      double volume = sides.prod();
      if (kind == ShapeKind::Ellipsoid) volume *= M_PI / 6.0;
      n_points = static_cast<int>(std::lround(config.density_points_per_m3 * volume));
      n_points = std::clamp(n_points, config.min_points, config.max_points);
    } else {
      n_points = count_dist(rng);
    }

    std::vector<Vec3> members;
    members.reserve(n_points);
    while (static_cast<int>(members.size()) < n_points) {
      Vec3 p;
      for (int a = 0; a < 3; ++a) p[a] = (unit(rng) - 0.5) * sides[a];
      if (kind == ShapeKind::Ellipsoid) {
        double q = 0.0;
        for (int a = 0; a < 3; ++a) q += (2.0 * p[a] / sides[a]) * (2.0 * p[a] / sides[a]);
        if (q > 1.0) continue;
      }
      members.push_back(p);
    }
    // Recenter so the empirical centroid lands exactly on the placed center;
    // this keeps the pairwise-separation guarantee on true centroids.
    Vec3 mean = Vec3::Zero();
    for (const Vec3& p : members) mean += p;
    mean /= n_points;
    for (Vec3& p : members) p = p - mean + centers[g];

    InstanceRecord rec;
    rec.id = g;
    rec.semantic_class = class_dist(rng);
    rec.aabb_min = members[0];
    rec.aabb_max = members[0];
    Vec3 sum = Vec3::Zero();
    for (const Vec3& p : members) {
      sum += p;
      rec.aabb_min = rec.aabb_min.cwiseMin(p);
      rec.aabb_max = rec.aabb_max.cwiseMax(p);
    }
    rec.centroid = sum / n_points;
    rec.max_side = (rec.aabb_max - rec.aabb_min).maxCoeff();
    scene.instances.push_back(rec);

    Vec3 base_color = palette_color(g);
    for (const Vec3& p : members) {
      points.push_back(p);
      Vec3 c = base_color + Vec3::Constant(0.05 * (unit(rng) - 0.5));
      colors.push_back(c.cwiseMax(0.0).cwiseMin(1.0));
      scene.instance_ids.push_back(g);
      scene.semantic_labels.push_back(rec.semantic_class);
    }
  }

  for (int b = 0; b < config.background_points; ++b) {
    Vec3 p;
    for (int a = 0; a < 3; ++a) p[a] = unit(rng) * config.room_extent[a];
    points.push_back(p);
    double gray = 0.4 + 0.2 * unit(rng);
    colors.push_back(Vec3::Constant(gray));
    scene.instance_ids.push_back(-1);
    scene.semantic_labels.push_back(0);
  }

  const int n = static_cast<int>(points.size());
  scene.cloud.positions.resize(n, 3);
  scene.cloud.colors.resize(n, 3);
  for (int i = 0; i < n; ++i) {
    scene.cloud.positions.row(i) = points[i].transpose();
    scene.cloud.colors.row(i) = colors[i].transpose();
  }
  return scene;
}

MatX gt_offsets(const SyntheticScene& scene) {
  const int n = scene.size();
  MatX offsets = MatX::Zero(n, 3);
  for (int i = 0; i < n; ++i) {
    int g = scene.instance_ids[i];
    if (g < 0) continue;
    offsets.row(i) =
        (scene.instances[g].centroid - scene.cloud.positions.row(i).transpose()).transpose();
  }
  return offsets;
}

}  // namespace kernelseg
