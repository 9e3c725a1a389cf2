#pragma once

#include <utility>
#include <vector>

#include "kernelseg/types.hpp"

namespace kernelseg {

/// Majority semantic label over the points where an instance's soft mask
/// exceeds 0.5; ties go to the lowest class index. Instances with empty
/// support get class 0 and has_support = 0.
struct SemanticVote {
  std::vector<int> labels;
  std::vector<char> has_support;
};
SemanticVote instance_semantic_vote(const MatX& soft_masks,
                                    const std::vector<int>& hard_semantics);

/// C_ij = ||pred_centroid_i - gt_centroid_j||_2 + penalty * [classes differ].
MatX cost_matrix(const MatX& pred_centroids, const std::vector<int>& pred_classes,
                 const MatX& gt_centroids, const std::vector<int>& gt_classes,
                 double mismatch_penalty = 1.0);

struct Assignment {
  std::vector<std::pair<int, int>> pairs;  // (pred index, gt index)
  double total_cost = 0.0;
};

/// Minimum-cost injective assignment of size min(rows, cols), by the
/// O(n^3) potentials / shortest-augmenting-path method.
Assignment hungarian(const MatX& cost);

/// |a AND b| / |a OR b|; 0 when both masks are empty.
double iou(const std::vector<char>& a, const std::vector<char>& b);

/// Eq-style mask loss over assigned pairs gated by IoU > 0.25 (the soft mask
/// is thresholded at 0.5 for the gate): mean over gated pairs of
/// BCE + dice complement. matched counts the gated pairs; value is 0 when
/// none qualify.
struct MaskLossResult {
  double value = 0.0;
  int matched = 0;
};
MaskLossResult mask_loss(const MatX& soft_masks,
                         const std::vector<std::vector<char>>& gt_masks,
                         const Assignment& assignment);

/// Mean cross-entropy plus the multi-class dice complement.
double semantic_loss(const MatX& scores, const std::vector<int>& gt_labels);

/// Mean over instance points of L2 error plus (1 - cosine similarity);
/// the cosine term is 0 when either vector is near zero. 0 when the scene
/// has no instance points.
double offset_loss(const MatX& offsets, const MatX& target,
                   const std::vector<char>& is_instance);

}  // namespace kernelseg
