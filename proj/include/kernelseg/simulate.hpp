#pragma once

#include <cstdint>

#include "kernelseg/scene.hpp"
#include "kernelseg/types.hpp"

namespace kernelseg {

struct NoiseSpec {
  double sigma_offset = 0.0;        // meters, per coordinate
  double sigma_heatmap = 0.0;
  double semantic_flip_prob = 0.0;  // in [0,1]
  double sigma_feature = 0.0;
  uint64_t seed = 0;
};

/// Stand-in backbone outputs. Semantic score rows are valid distributions
/// and the heatmap is clamped to [0,1].
struct SimulatedPredictions {
  MatX point_features;   // N x D
  MatX offsets;          // N x 3
  MatX semantic_scores;  // N x C
  VecX heatmap;          // N
};

/// Simulates network predictions from ground truth with controllable noise.
/// Point features are [class embedding || instance embedding] rows, where
/// both embeddings are fixed random unit vectors drawn per scene from the
/// noise seed; the instance part of background rows is zero. Offsets are the
/// ground-truth centroid offsets plus Gaussian noise, the heatmap is the
/// pseudo ground truth plus noise (clamped), and semantics are 0.9-mass
/// distributions on the (possibly flipped) class. Deterministic for a fixed
/// (scene, spec). Requires feature_dim >= num_classes and a positive split.
SimulatedPredictions simulate_predictions(const SyntheticScene& scene,
                                          const NoiseSpec& spec,
                                          int feature_dim = 32,
                                          int class_embedding_dim = 16,
                                          double heatmap_alpha = 25.0);

}  // namespace kernelseg
