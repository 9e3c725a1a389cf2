#pragma once

#include "kernelseg/scene.hpp"
#include "kernelseg/types.hpp"

namespace kernelseg {

/// Geometry-adaptive Gaussian centroid heatmap: instance point i gets
/// exp(-alpha * d_i^2 / r_i^2) where d_i is the distance to its instance
/// centroid and r_i the instance's longest aabb side; background points get 0.
/// Instances with max_side == 0 are clamped to 1e-3 m with a warning on stderr.
VecX pseudo_gt_heatmap(const SyntheticScene& scene, double alpha = 25.0);

/// Mean absolute deviation |H - H_hat| over instance points; 0 when the scene
/// has no instance points. Throws std::invalid_argument on length mismatch.
double center_loss(const VecX& predicted, const VecX& target,
                   const std::vector<int>& instance_ids);

}  // namespace kernelseg
