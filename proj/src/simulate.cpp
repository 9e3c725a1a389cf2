#include "kernelseg/simulate.hpp"

#include <random>
#include <stdexcept>

#include "kernelseg/heatmap.hpp"

namespace kernelseg {

namespace {

VecX random_unit_vector(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  VecX v(dim);
  do {
    for (int i = 0; i < dim; ++i) v[i] = normal(rng);
  } while (v.norm() < 1e-9);
  return v / v.norm();
}

}  // namespace

SimulatedPredictions simulate_predictions(const SyntheticScene& scene,
                                          const NoiseSpec& spec, int feature_dim,
                                          int class_embedding_dim, double heatmap_alpha) {
  if (feature_dim < scene.num_classes) {
    throw std::invalid_argument("simulate_predictions: feature_dim must be >= num_classes");
  }
  if (class_embedding_dim <= 0 || class_embedding_dim >= feature_dim) {
    throw std::invalid_argument("simulate_predictions: bad embedding split");
  }
  if (spec.sigma_offset < 0 || spec.sigma_heatmap < 0 || spec.sigma_feature < 0 ||
      spec.semantic_flip_prob < 0 || spec.semantic_flip_prob > 1) {
    throw std::invalid_argument("simulate_predictions: invalid noise spec");
  }

  const int n = scene.size();
  const int n_classes = scene.num_classes;
  const int n_instances = static_cast<int>(scene.instances.size());
  const int instance_dim = feature_dim - class_embedding_dim;

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Fixed draw order: embeddings first, then per-point noise streams.
  MatX class_embeddings(n_classes, class_embedding_dim);
  for (int c = 0; c < n_classes; ++c) {
    class_embeddings.row(c) = random_unit_vector(rng, class_embedding_dim).transpose();
  }
  MatX instance_embeddings(n_instances, instance_dim);
  for (int g = 0; g < n_instances; ++g) {
    instance_embeddings.row(g) = random_unit_vector(rng, instance_dim).transpose();
  }

  SimulatedPredictions out;

  out.offsets = gt_offsets(scene);
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < 3; ++a) out.offsets(i, a) += spec.sigma_offset * normal(rng);
  }

  out.heatmap = pseudo_gt_heatmap(scene, heatmap_alpha);
  for (int i = 0; i < n; ++i) {
    double h = out.heatmap[i] + spec.sigma_heatmap * normal(rng);
    out.heatmap[i] = std::clamp(h, 0.0, 1.0);
  }

  out.semantic_scores.resize(n, n_classes);
  const double off_mass = n_classes > 1 ? 0.1 / (n_classes - 1) : 0.0;
  for (int i = 0; i < n; ++i) {
    int chosen = scene.semantic_labels[i];
    double u = unit(rng);
    if (u < spec.semantic_flip_prob && n_classes > 1) {
      int other = static_cast<int>(unit(rng) * (n_classes - 1));
      if (other >= chosen) ++other;
      chosen = other;
    }
    for (int c = 0; c < n_classes; ++c) {
      out.semantic_scores(i, c) = c == chosen ? 0.9 : off_mass;
    }
  }

  out.point_features.resize(n, feature_dim);
  for (int i = 0; i < n; ++i) {
    int g = scene.instance_ids[i];
    out.point_features.row(i).head(class_embedding_dim) =
        class_embeddings.row(scene.semantic_labels[i]);
    if (g >= 0) {
      out.point_features.row(i).tail(instance_dim) = instance_embeddings.row(g);
    } else {
      out.point_features.row(i).tail(instance_dim).setZero();
    }
    for (int d = 0; d < feature_dim; ++d) {
      out.point_features(i, d) += spec.sigma_feature * normal(rng);
    }
  }

  return out;
}

}  // namespace kernelseg
