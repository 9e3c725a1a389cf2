#include "kernelseg/heatmap.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace kernelseg {

VecX pseudo_gt_heatmap(const SyntheticScene& scene, double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("pseudo_gt_heatmap: alpha must be positive");
  }
  constexpr double kMinSide = 1e-3;  // meters
  const int n = scene.size();
  VecX heat = VecX::Zero(n);
  std::vector<double> inv_r2(scene.instances.size());
  for (size_t g = 0; g < scene.instances.size(); ++g) {
    double r = scene.instances[g].max_side;
    if (r < kMinSide) {
      std::cerr << "pseudo_gt_heatmap: instance " << g << " has degenerate extent "
                << r << " m, clamping to " << kMinSide << " m\n";
      r = kMinSide;
    }
    inv_r2[g] = 1.0 / (r * r);
  }
  for (int i = 0; i < n; ++i) {
    int g = scene.instance_ids[i];
    if (g < 0) continue;
    double d2 = (scene.cloud.positions.row(i).transpose() - scene.instances[g].centroid)
                    .squaredNorm();
    heat[i] = std::exp(-alpha * d2 * inv_r2[g]);
  }
  return heat;
}

double center_loss(const VecX& predicted, const VecX& target,
                   const std::vector<int>& instance_ids) {
  if (predicted.size() != target.size() ||
      static_cast<size_t>(predicted.size()) != instance_ids.size()) {
    throw std::invalid_argument("center_loss: length mismatch");
  }
  double sum = 0.0;
  int count = 0;
  for (int i = 0; i < predicted.size(); ++i) {
    if (instance_ids[i] < 0) continue;
    sum += std::abs(predicted[i] - target[i]);
    ++count;
  }
  return count == 0 ? 0.0 : sum / count;
}

}  // namespace kernelseg
