#include "kernelseg/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

#include "kernelseg/point_cloud.hpp"

namespace kernelseg {

namespace {

std::vector<int> argmax_labels(const MatX& scores) {
  std::vector<int> labels(scores.cols(), -1);
  for (int i = 0; i < scores.cols(); ++i) {
    int best = 0;
    for (int k = 1; k < scores.rows(); ++k) {
      if (scores(k, i) > scores(best, i)) best = k;
    }
    labels[i] = scores(best, i) < 0.5 ? -1 : best;
  }
  return labels;
}

}  // namespace

std::vector<int> raw_labels(const MatX& soft_masks) {
  if (soft_masks.rows() < 1) {
    throw std::invalid_argument("raw_labels: need at least one instance");
  }
  return argmax_labels(soft_masks);
}

int otsu_level(const std::vector<double>& values, int levels) {
  if (values.empty()) throw std::invalid_argument("otsu_level: empty values");
  if (levels < 2) throw std::invalid_argument("otsu_level: need >= 2 levels");

  std::vector<int64_t> histogram(levels, 0);
  for (double v : values) {
    int level = std::clamp(static_cast<int>(std::floor(v * levels)), 0, levels - 1);
    histogram[level]++;
  }

  int lowest = 0, highest = levels - 1;
  while (histogram[lowest] == 0) ++lowest;
  while (histogram[highest] == 0) --highest;
  if (lowest == highest) return lowest;

  const auto total = static_cast<int64_t>(values.size());
  int64_t weighted_total = 0;
  for (int t = 0; t < levels; ++t) weighted_total += histogram[t] * t;

  int best_level = 0;
  double best_variance = -1.0;
  int64_t w0 = 0, sum0 = 0;
  for (int t = 0; t < levels; ++t) {
    w0 += histogram[t];
    sum0 += histogram[t] * t;
    int64_t w1 = total - w0;
    if (w0 == 0 || w1 == 0) continue;
    double mu0 = static_cast<double>(sum0) / w0;
    double mu1 = static_cast<double>(weighted_total - sum0) / w1;
    double variance = static_cast<double>(w0) * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (variance > best_variance) {
      best_variance = variance;
      best_level = t;
    }
  }
  return best_level;
}

double otsu_threshold(const std::vector<double>& values, int levels) {
  return static_cast<double>(otsu_level(values, levels) + 1) / levels;
}

std::vector<double> coverage_scores(const MatX& soft_masks,
                                    const std::vector<int>& labels,
                                    const std::vector<double>& thresholds) {
  const int n_instances = static_cast<int>(soft_masks.rows());
  if (static_cast<size_t>(soft_masks.cols()) != labels.size() ||
      thresholds.size() != static_cast<size_t>(n_instances)) {
    throw std::invalid_argument("coverage_scores: shape mismatch");
  }
  std::vector<double> coverage(n_instances, 0.0);
  for (int k = 0; k < n_instances; ++k) {
    int inter = 0, intra = 0;
    for (int i = 0; i < soft_masks.cols(); ++i) {
      if (labels[i] == k) ++inter;
      if (soft_masks(k, i) > thresholds[k]) ++intra;
    }
    coverage[k] = intra == 0 ? 0.0 : static_cast<double>(inter) / intra;
  }
  return coverage;
}

std::vector<int> refine_labels(const MatX& soft_masks,
                               const std::vector<double>& coverage) {
  if (coverage.size() != static_cast<size_t>(soft_masks.rows())) {
    throw std::invalid_argument("refine_labels: coverage length mismatch");
  }
  MatX weighted = soft_masks;
  for (int k = 0; k < weighted.rows(); ++k) weighted.row(k) *= coverage[k];
  return argmax_labels(weighted);
}

SuperpointPartition oracle_superpoints(const SyntheticScene& scene, double impurity,
                                       uint64_t seed) {
  if (impurity < 0.0 || impurity > 1.0) {
    throw std::invalid_argument("oracle_superpoints: impurity must be in [0,1]");
  }
  const int n = scene.size();
  std::mt19937_64 rng(seed);

  // Members per region; background (-1) is a pseudo-region.
  std::map<int, std::vector<int>> regions;
  for (int i = 0; i < n; ++i) regions[scene.instance_ids[i]].push_back(i);

  SuperpointPartition partition;
  partition.assignment.assign(n, -1);
  std::vector<Vec3> seeds;
  std::vector<int> seed_superpoint;

  std::uniform_int_distribution<int> chunk_dist(2, 5);
  for (auto& [region_id, members] : regions) {
    int chunks = std::min<int>(chunk_dist(rng), static_cast<int>(members.size()));
    chunks = std::max(chunks, 1);
    std::vector<int> seed_points(members);
    std::shuffle(seed_points.begin(), seed_points.end(), rng);
    seed_points.resize(chunks);
    std::vector<int> local_ids(chunks);
    for (int c = 0; c < chunks; ++c) {
      local_ids[c] = partition.count++;
      seeds.push_back(scene.cloud.positions.row(seed_points[c]).transpose());
      seed_superpoint.push_back(local_ids[c]);
    }
    for (int i : members) {
      Vec3 p = scene.cloud.positions.row(i).transpose();
      int best = 0;
      double best_d = (p - seeds[seeds.size() - chunks]).squaredNorm();
      for (int c = 1; c < chunks; ++c) {
        double d = (p - seeds[seeds.size() - chunks + c]).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      partition.assignment[i] = local_ids[best];
    }
  }

  if (impurity > 0.0 && partition.count > 1) {
    // Rank points by how boundary-like they are (margin between their own
    // seed and the nearest foreign seed) and flip the requested fraction.
    std::vector<std::pair<double, int>> margins(n);
    std::vector<int> foreign(n, -1);
    for (int i = 0; i < n; ++i) {
      Vec3 p = scene.cloud.positions.row(i).transpose();
      double own = std::numeric_limits<double>::infinity();
      double other = std::numeric_limits<double>::infinity();
      for (size_t s = 0; s < seeds.size(); ++s) {
        double d = (p - seeds[s]).squaredNorm();
        if (seed_superpoint[s] == partition.assignment[i]) {
          own = std::min(own, d);
        } else if (d < other) {
          other = d;
          foreign[i] = seed_superpoint[s];
        }
      }
      margins[i] = {other - own, i};
    }
    std::sort(margins.begin(), margins.end());
    int flips = static_cast<int>(std::floor(impurity * n));
    for (int f = 0; f < flips; ++f) {
      int i = margins[f].second;
      if (foreign[i] >= 0) partition.assignment[i] = foreign[i];
    }
  }
  return partition;
}

SuperpointPartition grid_superpoints(const MatX& positions, double cell) {
  if (!(cell > 0.0)) throw std::invalid_argument("grid_superpoints: cell must be positive");
  SpatialGrid keyer;
  keyer.cell_size = cell;
  std::unordered_map<SpatialGrid::CellKey, int, SpatialGrid::CellHash> ids;
  SuperpointPartition partition;
  partition.assignment.resize(positions.rows());
  for (int i = 0; i < positions.rows(); ++i) {
    auto [it, inserted] = ids.try_emplace(keyer.cell_of(positions.row(i).transpose()),
                                          partition.count);
    if (inserted) ++partition.count;
    partition.assignment[i] = it->second;
  }
  return partition;
}

std::vector<int> superpoint_refine(const std::vector<int>& labels,
                                   const SuperpointPartition& partition) {
  if (labels.size() != partition.assignment.size()) {
    throw std::invalid_argument("superpoint_refine: length mismatch");
  }
  std::vector<std::map<int, int>> votes(partition.count);
  for (size_t i = 0; i < labels.size(); ++i) {
    votes[partition.assignment[i]][labels[i]]++;
  }
  std::vector<int> winner(partition.count, -1);
  for (int s = 0; s < partition.count; ++s) {
    int best_label = 0, best_count = -1;
    for (const auto& [label, count] : votes[s]) {
      if (count > best_count) {  // map order gives smallest label on ties
        best_label = label;
        best_count = count;
      }
    }
    winner[s] = best_label;
  }
  std::vector<int> refined(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) refined[i] = winner[partition.assignment[i]];
  return refined;
}

std::vector<double> confidence_scores(const MatX& soft_masks,
                                      const MatX& semantic_scores,
                                      const std::vector<int>& instance_classes,
                                      const std::vector<double>& thresholds) {
  const int n_instances = static_cast<int>(soft_masks.rows());
  if (instance_classes.size() != static_cast<size_t>(n_instances) ||
      thresholds.size() != static_cast<size_t>(n_instances) ||
      semantic_scores.rows() != soft_masks.cols()) {
    throw std::invalid_argument("confidence_scores: shape mismatch");
  }
  std::vector<double> confidences(n_instances, 0.0);
  for (int k = 0; k < n_instances; ++k) {
    double mask_sum = 0.0, sem_sum = 0.0;
    int count = 0;
    for (int i = 0; i < soft_masks.cols(); ++i) {
      if (soft_masks(k, i) > thresholds[k]) {
        mask_sum += soft_masks(k, i);
        sem_sum += semantic_scores(i, instance_classes[k]);
        ++count;
      }
    }
    if (count > 0) confidences[k] = (mask_sum / count) * (sem_sum / count);
  }
  return confidences;
}

}  // namespace kernelseg
