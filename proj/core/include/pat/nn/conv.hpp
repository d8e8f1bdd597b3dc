#pragma once

#include <vector>

#include "pat/nn/tensor.hpp"

namespace pat::nn {

/// One 3x3 convolution layer with zero padding and per-output-channel bias.
/// Weight layout: w[((oc*in + ic)*3 + ky)*3 + kx].
struct ConvLayer {
  int in_ch = 0;
  int out_ch = 0;
  std::vector<double> w;
  std::vector<double> b;

  ConvLayer() = default;
  ConvLayer(int in, int out);
  std::size_t weight_count() const { return static_cast<std::size_t>(in_ch) * out_ch * 9; }
};

Field conv3x3_forward(const Field& input, const ConvLayer& layer);

/// Exact gradients of a scalar loss through the layer. grad_out has the
/// output shape; returns the input gradient and accumulates into the
/// layer-shaped parameter gradients.
Field conv3x3_backward(const Field& input, const ConvLayer& layer, const Field& grad_out,
                       ConvLayer& grads);

void relu_inplace(Field& x);
/// grad_z = grad_a where z > 0, else 0.
Field relu_backward(const Field& z, const Field& grad_a);

/// in -> hidden -> hidden -> out with ReLU after the first two layers and a
/// linear third layer.
struct ConvBlockWeights {
  ConvLayer l1, l2, l3;

  ConvBlockWeights() = default;
  ConvBlockWeights(int in, int out, int hidden);
};

/// Pre-activation record for one block application.
struct BlockTape {
  Field input;
  Field z1;
  Field z2;
};

Field block_forward(const Field& input, const ConvBlockWeights& blk, BlockTape* tape = nullptr);

/// Returns the gradient w.r.t. the block input and accumulates parameter
/// gradients into grads (same shape as blk).
Field block_backward(const BlockTape& tape, const ConvBlockWeights& blk, const Field& grad_out,
                     ConvBlockWeights& grads);

}  // namespace pat::nn
