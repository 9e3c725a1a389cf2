#include "kernelseg/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace kernelseg {

namespace {

void check_shape(const DecoderShape& shape) {
  if (shape.point_feature_dim < 0 || shape.channels.empty() || shape.channels.back() != 1) {
    throw std::invalid_argument("DecoderShape: channels must end in 1");
  }
  for (int c : shape.channels) {
    if (c < 1) throw std::invalid_argument("DecoderShape: channels must be >= 1");
  }
}

}  // namespace

int kernel_length(const DecoderShape& shape) {
  check_shape(shape);
  int length = 0;
  int in = shape.input_dim();
  for (int out : shape.channels) {
    length += in * out + out;
    in = out;
  }
  return length;
}

SlicedDecoder slice_kernel(const InstanceKernel& kernel, const DecoderShape& shape) {
  if (kernel.weights.size() != kernel_length(shape)) {
    throw std::invalid_argument("slice_kernel: kernel length does not match shape");
  }
  SlicedDecoder decoder;
  int offset = 0;
  int in = shape.input_dim();
  for (int out : shape.channels) {
    SlicedDecoder::Layer layer;
    // Column-major map = input index fastest.
    layer.weight = Eigen::Map<const MatX>(kernel.weights.data() + offset, in, out);
    offset += in * out;
    layer.bias = kernel.weights.segment(offset, out);
    offset += out;
    decoder.layers.push_back(std::move(layer));
    in = out;
  }
  return decoder;
}

InstanceKernel flatten_decoder(const SlicedDecoder& decoder) {
  int length = 0;
  for (const auto& layer : decoder.layers) {
    length += static_cast<int>(layer.weight.size() + layer.bias.size());
  }
  InstanceKernel kernel;
  kernel.weights.resize(length);
  int offset = 0;
  for (const auto& layer : decoder.layers) {
    const int w = static_cast<int>(layer.weight.size());
    kernel.weights.segment(offset, w) = Eigen::Map<const VecX>(layer.weight.data(), w);
    offset += w;
    kernel.weights.segment(offset, layer.bias.size()) = layer.bias;
    offset += static_cast<int>(layer.bias.size());
  }
  return kernel;
}

MatX build_decoding_features(const MatX& mask_features, const MatX& positions,
                             const Vec3& center) {
  if (mask_features.rows() != positions.rows()) {
    throw std::invalid_argument("build_decoding_features: row mismatch");
  }
  const int n = static_cast<int>(positions.rows());
  const int d = static_cast<int>(mask_features.cols());
  MatX decoding(n, d + 3);
  decoding.leftCols(d) = mask_features;
  decoding.rightCols(3) = (-positions).rowwise() + center.transpose();
  return decoding;
}

MatX decode_masks(const MatX& mask_features, const MatX& positions,
                  const MatX& instance_centroids,
                  const std::vector<InstanceKernel>& kernels, const DecoderShape& shape) {
  check_shape(shape);
  if (mask_features.cols() != shape.point_feature_dim) {
    throw std::invalid_argument("decode_masks: mask feature width does not match shape");
  }
  if (static_cast<size_t>(instance_centroids.rows()) != kernels.size()) {
    throw std::invalid_argument("decode_masks: one kernel per centroid required");
  }
  const int n = static_cast<int>(positions.rows());
  const int n_instances = static_cast<int>(kernels.size());
  MatX masks(n_instances, n);
  for (int k = 0; k < n_instances; ++k) {
    SlicedDecoder decoder = slice_kernel(kernels[k], shape);
    MatX hidden =
        build_decoding_features(mask_features, positions, instance_centroids.row(k));
    for (size_t layer = 0; layer < decoder.layers.size(); ++layer) {
      hidden = (hidden * decoder.layers[layer].weight).rowwise() +
               decoder.layers[layer].bias.transpose();
      if (layer + 1 < decoder.layers.size()) {
        hidden = hidden.cwiseMax(0.0);
      }
    }
    for (int i = 0; i < n; ++i) {
      masks(k, i) = 1.0 / (1.0 + std::exp(-hidden(i, 0)));
    }
  }
  return masks;
}

namespace {

InstanceKernel prototype_kernel(const VecX& instance_feature, const DecoderShape& shape,
                                const PrototypeHeadParams& params) {
  const int d = shape.point_feature_dim;
  const int first_width = shape.channels.front();
  const int depth = static_cast<int>(shape.channels.size());
  if (instance_feature.size() != d) {
    throw std::invalid_argument("prototype head: feature width does not match shape");
  }
  if (depth >= 2 && first_width < 7) {
    throw std::invalid_argument("prototype head: first hidden width must be >= 7");
  }
  if (depth >= 3) {
    for (size_t l = 1; l + 1 < shape.channels.size(); ++l) {
      if (shape.channels[l] < 2) {
        throw std::invalid_argument("prototype head: intermediate width must be >= 2");
      }
    }
  }

  SlicedDecoder decoder;
  int in = shape.input_dim();
  for (int out : shape.channels) {
    decoder.layers.push_back({MatX::Zero(in, out), VecX::Zero(out)});
    in = out;
  }

  if (depth == 1) {
    // Single affine layer: feature match plus bias; no room for the gate.
    auto& only = decoder.layers[0];
    only.weight.col(0).head(d) = params.feature_gain * instance_feature;
    only.bias[0] = -params.feature_gain * params.self_gate * instance_feature.squaredNorm() +
                   params.bias;
    return flatten_decoder(decoder);
  }

  // Hidden unit 0: feature match against the instance feature.
  // Hidden units 1..6: +/- hyperplanes whose ReLUs sum to ||Z||_1.
  auto& first = decoder.layers[0];
  first.weight.col(0).head(d) = params.feature_gain * instance_feature;
  first.bias[0] = -params.feature_gain * params.self_gate * instance_feature.squaredNorm();
  for (int axis = 0; axis < 3; ++axis) {
    first.weight(d + axis, 1 + 2 * axis) = 1.0;
    first.weight(d + axis, 2 + 2 * axis) = -1.0;
  }

  // Intermediate layers route the match into unit 0 and the distance sum
  // into unit 1; both stay nonnegative, so the ReLUs are pass-through.
  for (int l = 1; l + 1 < depth; ++l) {
    auto& layer = decoder.layers[l];
    layer.weight(0, 0) = 1.0;
    if (l == 1) {
      for (int u = 1; u <= 6; ++u) layer.weight(u, 1) = 1.0;
    } else {
      layer.weight(1, 1) = 1.0;
    }
  }

  auto& last = decoder.layers[depth - 1];
  last.weight(0, 0) = 1.0;
  if (depth == 2) {
    for (int u = 1; u <= 6; ++u) last.weight(u, 0) = -params.distance_gain;
  } else {
    last.weight(1, 0) = -params.distance_gain;
  }
  last.bias[0] = params.bias;
  return flatten_decoder(decoder);
}

}  // namespace

std::vector<InstanceKernel> encode_kernels(const MatX& instance_features, KernelHead head,
                                           const DecoderShape& shape,
                                           const PrototypeHeadParams& params) {
  check_shape(shape);
  std::vector<InstanceKernel> kernels;
  kernels.reserve(instance_features.rows());
  if (head == KernelHead::Direct) {
    if (instance_features.cols() != kernel_length(shape)) {
      throw std::invalid_argument(
          "encode_kernels: direct head requires feature width == kernel length");
    }
    for (int k = 0; k < instance_features.rows(); ++k) {
      kernels.push_back({instance_features.row(k).transpose()});
    }
    return kernels;
  }
  for (int k = 0; k < instance_features.rows(); ++k) {
    kernels.push_back(
        prototype_kernel(instance_features.row(k).transpose(), shape, params));
  }
  return kernels;
}

}  // namespace kernelseg
