// Independent reference implementations used as test oracles. They follow
// the algorithm statements literally with linear scans and no shared code
// with the library paths they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "kernelseg/mining.hpp"
#include "kernelseg/types.hpp"

namespace reference {

using kernelseg::MatX;
using kernelseg::Vec3;
using kernelseg::VecX;

inline kernelseg::Candidate naive_describe(int q, const VecX& heat, const MatX& positions,
                                           const std::vector<int>& labels,
                                           const MatX& features, const MatX& offsets,
                                           double radius) {
  kernelseg::Candidate cand;
  cand.point_index = q;
  cand.position = positions.row(q).transpose();
  cand.shifted_position = cand.position + offsets.row(q).transpose();
  cand.semantic_label = labels[q];
  cand.centroid_score = heat[q];
  cand.fg_feature = VecX::Zero(features.cols());
  cand.bg_feature = VecX::Zero(features.cols());
  const double r2 = radius * radius;
  for (int j = 0; j < positions.rows(); ++j) {
    double d2 = (positions.row(j).transpose() - cand.position).squaredNorm();
    if (d2 >= 4.0 * r2) continue;
    if (d2 < r2 && labels[j] == cand.semantic_label) {
      cand.fg_feature += features.row(j).transpose();
      ++cand.fg_count;
    } else if (d2 >= r2 && labels[j] != cand.semantic_label) {
      cand.bg_feature += features.row(j).transpose();
      ++cand.bg_count;
    }
  }
  cand.fg_feature /= cand.fg_count;
  if (cand.bg_count > 0) cand.bg_feature /= cand.bg_count;
  return cand;
}

/// Literal O(N^2) locally-normalized NMS loop.
inline std::vector<kernelseg::Candidate> naive_ln_nms(
    const VecX& heat, const MatX& positions, const std::vector<int>& labels,
    const std::vector<char>& is_foreground, const MatX& features, const MatX& offsets,
    const kernelseg::MiningParams& params) {
  const int n = static_cast<int>(heat.size());
  std::vector<char> available(n, 1);
  std::vector<kernelseg::Candidate> out;
  const double r2 = params.radius * params.radius;
  while (static_cast<int>(out.size()) < params.max_candidates) {
    int q = -1;
    for (int i = 0; i < n; ++i) {
      if (available[i] && is_foreground[i] && (q < 0 || heat[i] > heat[q])) q = i;
    }
    if (q < 0) break;
    double ball_max = heat[q];
    for (int j = 0; j < n; ++j) {
      double d2 = (positions.row(j) - positions.row(q)).squaredNorm();
      if (d2 < r2) {
        available[j] = 0;
        ball_max = std::max(ball_max, heat[j]);
      }
    }
    if (heat[q] >= params.score_threshold * ball_max) {
      out.push_back(naive_describe(q, heat, positions, labels, features, offsets,
                                   params.radius));
    }
  }
  return out;
}

/// Literal plain NMS: absolute bar at score_threshold * max(heat).
inline std::vector<kernelseg::Candidate> naive_plain_nms(
    const VecX& heat, const MatX& positions, const std::vector<int>& labels,
    const std::vector<char>& is_foreground, const MatX& features, const MatX& offsets,
    const kernelseg::MiningParams& params) {
  const int n = static_cast<int>(heat.size());
  double bar = params.score_threshold * heat.maxCoeff();
  std::vector<char> available(n, 1);
  std::vector<kernelseg::Candidate> out;
  const double r2 = params.radius * params.radius;
  while (static_cast<int>(out.size()) < params.max_candidates) {
    int q = -1;
    for (int i = 0; i < n; ++i) {
      if (available[i] && is_foreground[i] && (q < 0 || heat[i] > heat[q])) q = i;
    }
    if (q < 0) break;
    for (int j = 0; j < n; ++j) {
      if ((positions.row(j) - positions.row(q)).squaredNorm() < r2) available[j] = 0;
    }
    if (heat[q] >= bar) {
      out.push_back(naive_describe(q, heat, positions, labels, features, offsets,
                                   params.radius));
    }
  }
  return out;
}

/// Literal greedy merge simulation with explicit group lists.
struct MergeGroup {
  std::vector<int> members;
  int center;
};

inline std::vector<MergeGroup> simulate_merge(MatX scores, const VecX& heat,
                                              double threshold) {
  const int n = static_cast<int>(scores.rows());
  scores = 0.5 * (scores + scores.transpose()).eval();
  std::vector<std::vector<int>> groups(n);
  std::vector<int> group_of(n);
  for (int i = 0; i < n; ++i) {
    groups[i] = {i};
    group_of[i] = i;
  }
  while (true) {
    double best = -std::numeric_limits<double>::infinity();
    int bi = -1, bj = -1;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j && scores(i, j) > best) {
          best = scores(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    if (bi < 0 || best <= threshold) break;
    int ga = group_of[bi], gb = group_of[bj];
    std::vector<int> merged = groups[ga];
    if (gb != ga) {
      merged.insert(merged.end(), groups[gb].begin(), groups[gb].end());
    }
    std::sort(merged.begin(), merged.end());
    for (int m : merged) group_of[m] = ga;
    groups[ga] = merged;
    if (gb != ga) groups[gb].clear();
    for (int a : merged) {
      for (int b : merged) scores(a, b) = 0.0;
    }
  }
  std::vector<MergeGroup> out;
  for (int g = 0; g < n; ++g) {
    if (groups[g].empty() || group_of[g] != g) continue;
    MergeGroup mg;
    mg.members = groups[g];
    mg.center = mg.members.front();
    for (int m : mg.members) {
      if (heat[m] > heat[mg.center]) mg.center = m;
    }
    out.push_back(mg);
  }
  // Order groups by center for a canonical comparison.
  std::sort(out.begin(), out.end(),
            [](const MergeGroup& a, const MergeGroup& b) { return a.center < b.center; });
  return out;
}

/// Factorial brute force for the assignment problem (injective, size
/// min(rows, cols)), returning the minimal total cost.
inline double brute_force_assignment(const MatX& cost) {
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  bool transpose = rows > cols;
  const MatX a = transpose ? MatX(cost.transpose()) : cost;
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  std::vector<char> used(m, 0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(n, -1);
  auto recurse = [&](auto&& self, int row, double acc) -> void {
    if (row == n) {
      best = std::min(best, acc);
      return;
    }
    for (int c = 0; c < m; ++c) {
      if (used[c]) continue;
      used[c] = 1;
      self(self, row + 1, acc + a(row, c));
      used[c] = 0;
    }
  };
  recurse(recurse, 0, 0.0);
  return best;
}

/// Exhaustive Otsu maximizer over all quantized levels.
inline int exhaustive_otsu_level(const std::vector<double>& values, int levels) {
  std::vector<int> quantized;
  quantized.reserve(values.size());
  for (double v : values) {
    quantized.push_back(std::clamp(static_cast<int>(std::floor(v * levels)), 0, levels - 1));
  }
  int lo = *std::min_element(quantized.begin(), quantized.end());
  int hi = *std::max_element(quantized.begin(), quantized.end());
  if (lo == hi) return lo;
  int best_level = 0;
  double best_variance = -1.0;
  for (int t = 0; t < levels; ++t) {
    double w0 = 0, w1 = 0, sum0 = 0, sum1 = 0;
    for (int q : quantized) {
      if (q <= t) {
        w0 += 1;
        sum0 += q;
      } else {
        w1 += 1;
        sum1 += q;
      }
    }
    if (w0 == 0 || w1 == 0) continue;
    double mu0 = sum0 / w0;
    double mu1 = sum1 / w1;
    double variance = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (variance > best_variance) {
      best_variance = variance;
      best_level = t;
    }
  }
  return best_level;
}

}  // namespace reference
