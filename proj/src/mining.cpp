#include "kernelseg/mining.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace kernelseg {

namespace {

void check_inputs(const VecX& heat, const MatX& positions,
                  const std::vector<int>& hard_labels,
                  const std::vector<char>& is_foreground, const MatX& features,
                  const MatX& offsets, const MiningParams& params) {
  const auto n = static_cast<size_t>(heat.size());
  if (static_cast<size_t>(positions.rows()) != n || hard_labels.size() != n ||
      is_foreground.size() != n || static_cast<size_t>(features.rows()) != n ||
      static_cast<size_t>(offsets.rows()) != n) {
    throw std::invalid_argument("mining: inconsistent input lengths");
  }
  if (!(params.radius > 0.0) || params.max_candidates < 1 ||
      !(params.score_threshold > 0.0) || params.score_threshold > 1.0) {
    throw std::invalid_argument("mining: invalid params");
  }
}

// argmax of heat over available foreground points, ties to the lowest index
int best_available(const VecX& heat, const std::vector<char>& available,
                   const std::vector<char>& is_foreground) {
  int best = -1;
  for (int i = 0; i < heat.size(); ++i) {
    if (!available[i] || !is_foreground[i]) continue;
    if (best < 0 || heat[i] > heat[best]) best = i;
  }
  return best;
}

}  // namespace

Candidate describe_candidate(int q, const VecX& heat, const MatX& positions,
                             const std::vector<int>& hard_labels, const MatX& features,
                             const MatX& offsets, double radius, const SpatialGrid& grid) {
  Candidate cand;
  cand.point_index = q;
  cand.position = positions.row(q).transpose();
  cand.shifted_position = cand.position + offsets.row(q).transpose();
  cand.semantic_label = hard_labels[q];
  cand.centroid_score = heat[q];
  cand.fg_feature = VecX::Zero(features.cols());
  cand.bg_feature = VecX::Zero(features.cols());

  const double r2 = radius * radius;
  // One 2R query covers both pools; indices come back sorted, so the
  // accumulation order is reproducible across implementations.
  for (int j : radius_query(grid, positions, cand.position, 2.0 * radius)) {
    double d2 = (positions.row(j) - positions.row(q)).squaredNorm();
    if (d2 < r2 && hard_labels[j] == cand.semantic_label) {
      cand.fg_feature += features.row(j).transpose();
      ++cand.fg_count;
    } else if (d2 >= r2 && hard_labels[j] != cand.semantic_label) {
      cand.bg_feature += features.row(j).transpose();
      ++cand.bg_count;
    }
  }
  cand.fg_feature /= cand.fg_count;  // q itself is always pooled
  if (cand.bg_count > 0) cand.bg_feature /= cand.bg_count;
  return cand;
}

std::vector<Candidate> ln_nms(const VecX& heat, const MatX& positions,
                              const std::vector<int>& hard_labels,
                              const std::vector<char>& is_foreground,
                              const MatX& features, const MatX& offsets,
                              const MiningParams& params, const SpatialGrid& grid) {
  check_inputs(heat, positions, hard_labels, is_foreground, features, offsets, params);
  std::vector<Candidate> candidates;
  std::vector<char> available(heat.size(), 1);
  while (static_cast<int>(candidates.size()) < params.max_candidates) {
    int q = best_available(heat, available, is_foreground);
    if (q < 0) break;
    auto ball = radius_query(grid, positions, positions.row(q).transpose(), params.radius);
    double ball_max = heat[q];
    for (int j : ball) {
      available[j] = 0;  // suppressed whether or not q is accepted
      ball_max = std::max(ball_max, heat[j]);
    }
    // Multiplicative form of H_q / ball_max >= threshold; also well defined
    // when the whole ball scores zero.
    if (heat[q] >= params.score_threshold * ball_max) {
      candidates.push_back(describe_candidate(q, heat, positions, hard_labels, features,
                                              offsets, params.radius, grid));
    }
  }
  return candidates;
}

std::vector<Candidate> plain_nms(const VecX& heat, const MatX& positions,
                                 const std::vector<int>& hard_labels,
                                 const std::vector<char>& is_foreground,
                                 const MatX& features, const MatX& offsets,
                                 const MiningParams& params, const SpatialGrid& grid) {
  check_inputs(heat, positions, hard_labels, is_foreground, features, offsets, params);
  const double bar = heat.size() > 0 ? params.score_threshold * heat.maxCoeff() : 0.0;
  std::vector<Candidate> candidates;
  std::vector<char> available(heat.size(), 1);
  while (static_cast<int>(candidates.size()) < params.max_candidates) {
    int q = best_available(heat, available, is_foreground);
    if (q < 0) break;
    for (int j : radius_query(grid, positions, positions.row(q).transpose(), params.radius)) {
      available[j] = 0;
    }
    if (heat[q] >= bar) {
      candidates.push_back(describe_candidate(q, heat, positions, hard_labels, features,
                                              offsets, params.radius, grid));
    }
  }
  return candidates;
}

std::vector<Candidate> random_candidates(const VecX& heat, const MatX& positions,
                                         const std::vector<int>& hard_labels,
                                         const std::vector<char>& is_foreground,
                                         const MatX& features, const MatX& offsets,
                                         const MiningParams& params,
                                         const SpatialGrid& grid, uint64_t seed) {
  check_inputs(heat, positions, hard_labels, is_foreground, features, offsets, params);
  std::vector<int> eligible;
  for (int i = 0; i < heat.size(); ++i) {
    if (is_foreground[i] && heat[i] > params.score_threshold) eligible.push_back(i);
  }
  std::mt19937_64 rng(seed);
  std::shuffle(eligible.begin(), eligible.end(), rng);
  if (static_cast<int>(eligible.size()) > params.max_candidates) {
    eligible.resize(params.max_candidates);
  }
  std::sort(eligible.begin(), eligible.end());
  std::vector<Candidate> candidates;
  candidates.reserve(eligible.size());
  for (int q : eligible) {
    candidates.push_back(describe_candidate(q, heat, positions, hard_labels, features,
                                            offsets, params.radius, grid));
  }
  return candidates;
}

}  // namespace kernelseg
