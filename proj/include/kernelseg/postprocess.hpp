#pragma once

#include <cstdint>
#include <vector>

#include "kernelseg/scene.hpp"
#include "kernelseg/types.hpp"

namespace kernelseg {

/// Per-point argmax over instance masks; points whose best score is below
/// 0.5 stay unassigned (-1). Argmax ties go to the lowest instance index.
std::vector<int> raw_labels(const MatX& soft_masks);

/// Level t in [0, levels) that maximizes the between-class variance of the
/// quantized {<= t, > t} split; ties go to the lowest level. When every value
/// quantizes to one level, that level is returned.
int otsu_level(const std::vector<double>& values, int levels = 256);

/// Otsu threshold over values in [0,1]: the raw-value boundary (t+1)/levels
/// of the maximizing split, so that `value > threshold` reproduces the
/// level-space split for values off the exact bucket edges.
double otsu_threshold(const std::vector<double>& values, int levels = 256);

/// Coverage score per instance: points won in the argmax labeling divided by
/// points above the instance's threshold; 0 when the latter is empty.
std::vector<double> coverage_scores(const MatX& soft_masks,
                                    const std::vector<int>& labels,
                                    const std::vector<double>& thresholds);

/// Argmax labeling of coverage-weighted masks, with the same background rule
/// and tie-break as raw_labels.
std::vector<int> refine_labels(const MatX& soft_masks,
                               const std::vector<double>& coverage);

struct SuperpointPartition {
  std::vector<int> assignment;  // superpoint id per point, contiguous 0..P-1
  int count = 0;
};

/// Oracle superpoints: every ground-truth instance (and the background) is
/// split into 2..5 seed-Voronoi chunks; an `impurity` fraction of the most
/// boundary-like points is then flipped to their nearest foreign chunk.
SuperpointPartition oracle_superpoints(const SyntheticScene& scene, double impurity,
                                       uint64_t seed);

/// Grid superpoints: one superpoint per occupied voxel of the given cell size.
SuperpointPartition grid_superpoints(const MatX& positions, double cell);

/// Majority vote per superpoint, -1 votable; ties go to the smaller label.
std::vector<int> superpoint_refine(const std::vector<int>& labels,
                                   const SuperpointPartition& partition);

/// Per-instance confidence: (mean mask score over intra-points) times
/// (mean semantic score of the voted class over the same points), where
/// intra-points are those above the instance's threshold; 0 when empty.
std::vector<double> confidence_scores(const MatX& soft_masks,
                                      const MatX& semantic_scores,
                                      const std::vector<int>& instance_classes,
                                      const std::vector<double>& thresholds);

}  // namespace kernelseg
