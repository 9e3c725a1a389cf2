#pragma once

#include <cstdint>
#include <vector>

#include "kernelseg/point_cloud.hpp"
#include "kernelseg/types.hpp"

namespace kernelseg {

struct MiningParams {
  double radius = 0.3;          // suppression and pooling radius, meters
  double score_threshold = 0.5; // normalized-score threshold, in (0,1]
  int max_candidates = 200;
};

/// A mined centroid candidate with its pooled context. fg_feature averages
/// the reduced features of same-label points within radius (the candidate
/// itself included, so fg_count >= 1); bg_feature averages different-label
/// points in the radius..2*radius shell and is zero when that shell is empty.
struct Candidate {
  int point_index = -1;
  Vec3 position = Vec3::Zero();
  Vec3 shifted_position = Vec3::Zero();  // position + predicted offset
  int semantic_label = 0;
  double centroid_score = 0.0;
  VecX fg_feature;
  VecX bg_feature;
  int fg_count = 0;
  int bg_count = 0;
};

/// Locally-normalized NMS. Repeatedly takes the highest-score available
/// foreground point q (ties to the lowest index), suppresses every point
/// within the radius, and accepts q iff its score is at least
/// score_threshold times the maximum score inside that ball, suppressed
/// points included. Stops when no available foreground point remains or
/// max_candidates have been accepted.
std::vector<Candidate> ln_nms(const VecX& heat, const MatX& positions,
                              const std::vector<int>& hard_labels,
                              const std::vector<char>& is_foreground,
                              const MatX& features, const MatX& offsets,
                              const MiningParams& params, const SpatialGrid& grid);

/// Same suppression loop without local normalization: a peak is accepted iff
/// its score is at least score_threshold times the global heatmap maximum.
std::vector<Candidate> plain_nms(const VecX& heat, const MatX& positions,
                                 const std::vector<int>& hard_labels,
                                 const std::vector<char>& is_foreground,
                                 const MatX& features, const MatX& offsets,
                                 const MiningParams& params, const SpatialGrid& grid);

/// Baseline: a uniform random subset (at most max_candidates) of foreground
/// points with score strictly above score_threshold, with the same candidate
/// description pooling. Output is sorted by point index.
std::vector<Candidate> random_candidates(const VecX& heat, const MatX& positions,
                                         const std::vector<int>& hard_labels,
                                         const std::vector<char>& is_foreground,
                                         const MatX& features, const MatX& offsets,
                                         const MiningParams& params,
                                         const SpatialGrid& grid, uint64_t seed);

/// Candidate description pooling for point q (exposed for the baselines and
/// for reference implementations in tests).
Candidate describe_candidate(int q, const VecX& heat, const MatX& positions,
                             const std::vector<int>& hard_labels, const MatX& features,
                             const MatX& offsets, double radius, const SpatialGrid& grid);

}  // namespace kernelseg
