#include "kernelseg/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace kernelseg {

MatX build_aggregation_features(const std::vector<Candidate>& candidates) {
  if (candidates.empty()) {
    throw std::invalid_argument("build_aggregation_features: no candidates");
  }
  const int d = static_cast<int>(candidates.front().fg_feature.size());
  MatX features(candidates.size(), 2 * d + 3);
  for (size_t i = 0; i < candidates.size(); ++i) {
    features.row(i).segment(0, d) = candidates[i].fg_feature.transpose();
    features.row(i).segment(d, d) = candidates[i].bg_feature.transpose();
    features.row(i).segment(2 * d, 3) = candidates[i].shifted_position.transpose();
  }
  return features;
}

MatX score_map_oracle(const std::vector<Candidate>& candidates,
                      const std::vector<int>& instance_ids) {
  const int n = static_cast<int>(candidates.size());
  MatX map = MatX::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    int gi = instance_ids[candidates[i].point_index];
    for (int j = 0; j < n; ++j) {
      int gj = instance_ids[candidates[j].point_index];
      map(i, j) = (gi >= 0 && gi == gj) ? 1.0 : 0.0;
    }
  }
  return map;
}

MatX score_map_analytic(const MatX& aggregation_features, double beta0, double beta1) {
  if (!(beta1 > 0.0)) {
    throw std::invalid_argument("score_map_analytic: beta1 must be positive");
  }
  const int n = static_cast<int>(aggregation_features.rows());
  MatX map(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double l1 = (aggregation_features.row(i) - aggregation_features.row(j))
                      .cwiseAbs()
                      .sum();
      double score = 1.0 / (1.0 + std::exp(-(beta0 - beta1 * l1)));
      map(i, j) = score;
      map(j, i) = score;
    }
  }
  return map;
}

InstanceGroups greedy_merge(const MatX& scores, const VecX& centroid_scores,
                            double threshold) {
  const int n = static_cast<int>(scores.rows());
  if (scores.cols() != n || centroid_scores.size() != n) {
    throw std::invalid_argument("greedy_merge: shape mismatch");
  }
  if (!(threshold > 0.0) || !(threshold < 1.0)) {
    throw std::invalid_argument("greedy_merge: threshold must be in (0,1)");
  }
  MatX map = 0.5 * (scores + scores.transpose());

  InstanceGroups result;
  result.center_of.resize(n);
  for (int i = 0; i < n; ++i) result.center_of[i] = i;

  while (true) {
    int bi = -1, bj = -1;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        if (map(i, j) > best) {
          best = map(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    if (bi < 0 || best <= threshold) break;

    std::vector<int> merged;
    for (int k = 0; k < n; ++k) {
      if (result.center_of[k] == result.center_of[bi] ||
          result.center_of[k] == result.center_of[bj]) {
        merged.push_back(k);
      }
    }
    int center = merged.front();
    for (int k : merged) {
      if (centroid_scores[k] > centroid_scores[center]) center = k;
    }
    for (int k : merged) result.center_of[k] = center;
    for (int a : merged) {
      for (int b : merged) map(a, b) = 0.0;
    }
  }

  std::map<int, std::vector<int>> by_center;
  for (int i = 0; i < n; ++i) by_center[result.center_of[i]].push_back(i);
  for (auto& [center, members] : by_center) {
    result.centers.push_back(center);
    result.groups.push_back(members);
  }
  return result;
}

FusedInstances fuse_instances(const InstanceGroups& groups,
                              const std::vector<Candidate>& candidates) {
  const int n_groups = groups.group_count();
  const int d = candidates.empty() ? 0 : static_cast<int>(candidates.front().fg_feature.size());
  FusedInstances fused;
  fused.centroids.resize(n_groups, 3);
  fused.features = MatX::Zero(n_groups, d);
  for (int g = 0; g < n_groups; ++g) {
    fused.centroids.row(g) = candidates[groups.centers[g]].shifted_position.transpose();
    double weight_sum = 0.0;
    for (int c : groups.groups[g]) {
      fused.features.row(g) += candidates[c].fg_count * candidates[c].fg_feature.transpose();
      weight_sum += candidates[c].fg_count;
    }
    fused.features.row(g) /= weight_sum;
  }
  return fused;
}

double aggre_loss(const MatX& scores, const MatX& target) {
  if (scores.rows() != target.rows() || scores.cols() != target.cols()) {
    throw std::invalid_argument("aggre_loss: shape mismatch");
  }
  const int n = static_cast<int>(scores.rows());
  if (n < 2) return 0.0;
  double sum = 0.0;
  int count = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      double a = std::clamp(scores(i, j), 1e-7, 1.0 - 1e-7);
      double t = target(i, j);
      sum += -(t * std::log(a) + (1.0 - t) * std::log(1.0 - a));
      ++count;
    }
  }
  return sum / count;
}

}  // namespace kernelseg
