#pragma once

#include <vector>

#include "kernelseg/types.hpp"

namespace kernelseg {

/// Shape of the per-instance decoder: a stack of 1x1 convolutions (per-point
/// affine maps) over inputs of width point_feature_dim + 3, with the listed
/// output widths; the last width must be 1.
struct DecoderShape {
  int point_feature_dim = 16;      // D'
  std::vector<int> channels{16, 1};

  int input_dim() const { return point_feature_dim + 3; }
};

/// Total parameter count: sum over layers of in*out + out.
int kernel_length(const DecoderShape& shape);

/// Flat parameter vector for one instance's decoder.
struct InstanceKernel {
  VecX weights;
};

/// Kernel sliced into per-layer weight matrices and biases. Slicing order is
/// layer-1 weights, layer-1 biases, layer-2 weights, ... with weight matrices
/// filled input-index-fastest (column-major for an in x out matrix).
struct SlicedDecoder {
  struct Layer {
    MatX weight;  // in x out
    VecX bias;    // out
  };
  std::vector<Layer> layers;
};

/// Throws std::invalid_argument when the kernel length does not match.
SlicedDecoder slice_kernel(const InstanceKernel& kernel, const DecoderShape& shape);

/// Inverse of slice_kernel.
InstanceKernel flatten_decoder(const SlicedDecoder& decoder);

/// Per-point decoding features [F_m,i || c - X_i].
MatX build_decoding_features(const MatX& mask_features, const MatX& positions,
                             const Vec3& center);

/// Applies every instance's sliced decoder to the whole scene: affine layers
/// with ReLU between them and a sigmoid on the final scalar. Output is I x N,
/// strictly inside (0,1), with no semantic restriction of the domain.
MatX decode_masks(const MatX& mask_features, const MatX& positions,
                  const MatX& instance_centroids,
                  const std::vector<InstanceKernel>& kernels, const DecoderShape& shape);

enum class KernelHead { Prototype, Direct };

/// Configuration of the analytic prototype head. The decoded logit is
///   relu(feature_gain * (<F_m,i, f> - self_gate * ||f||^2))
///   - distance_gain * ||c - X_i||_1 + bias
/// for instance feature f. The L1 distance term is realized exactly with six
/// ReLU hyperplane pairs, so the first hidden layer must have width >= 7.
struct PrototypeHeadParams {
  double feature_gain = 10.0;
  double self_gate = 0.5;
  double distance_gain = 0.5;
  double bias = -5.0;
};

/// Builds one kernel per row of instance_features. The prototype head
/// constructs the decoder weights analytically; the direct head treats each
/// row as a ready kernel and requires row length == kernel_length(shape).
std::vector<InstanceKernel> encode_kernels(const MatX& instance_features, KernelHead head,
                                           const DecoderShape& shape,
                                           const PrototypeHeadParams& params = {});

}  // namespace kernelseg
