#pragma once

#include <vector>

#include "kernelseg/mining.hpp"
#include "kernelseg/types.hpp"

namespace kernelseg {

/// Rows are [fg_feature || bg_feature || shifted_position], one per candidate.
MatX build_aggregation_features(const std::vector<Candidate>& candidates);

/// Ground-truth merging map: 1 when two candidates sit on the same instance
/// (background candidates never match anything), 0 otherwise.
MatX score_map_oracle(const std::vector<Candidate>& candidates,
                      const std::vector<int>& instance_ids);

/// Analytic stand-in for the learned merging scorer:
/// A_ij = sigmoid(beta0 - beta1 * ||F_a,i - F_a,j||_1). Symmetric by
/// construction. Requires beta1 > 0.
MatX score_map_analytic(const MatX& aggregation_features, double beta0, double beta1);

/// Result of the greedy candidate merge. center_of[i] is the candidate index
/// every member of i's group was unified to (the member with the highest
/// centroid score). Groups are ordered by center index; members ascending.
struct InstanceGroups {
  std::vector<int> center_of;
  std::vector<int> centers;
  std::vector<std::vector<int>> groups;

  int group_count() const { return static_cast<int>(groups.size()); }
};

/// Iteratively merges the two groups joined by the largest off-diagonal
/// score until no score exceeds the threshold. Ties break to the
/// lexicographically smallest (i,j); center ties to the lowest candidate
/// index. Scores between members of a merged group are zeroed. The map is
/// symmetrized as (A + A^T)/2 first.
InstanceGroups greedy_merge(const MatX& scores, const VecX& centroid_scores,
                            double threshold = 0.5);

struct FusedInstances {
  MatX centroids;  // I x 3, shifted position of each group's center candidate
  MatX features;   // I x D', fg features averaged with fg_count weights
};

FusedInstances fuse_instances(const InstanceGroups& groups,
                              const std::vector<Candidate>& candidates);

/// Mean binary cross-entropy over off-diagonal entries, with scores clamped
/// to [1e-7, 1-1e-7]. Throws std::invalid_argument on shape mismatch.
double aggre_loss(const MatX& scores, const MatX& target);

}  // namespace kernelseg
