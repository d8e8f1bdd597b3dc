#include "pat/nn/conv.hpp"

#include <stdexcept>

namespace pat::nn {

ConvLayer::ConvLayer(int in, int out) : in_ch(in), out_ch(out) {
  if (in <= 0 || out <= 0) throw std::invalid_argument("ConvLayer: bad channel counts");
  w.assign(weight_count(), 0.0);
  b.assign(static_cast<std::size_t>(out), 0.0);
}

Field conv3x3_forward(const Field& input, const ConvLayer& layer) {
  if (input.channels != layer.in_ch) throw std::invalid_argument("conv3x3: channel mismatch");
  const int nx = input.nx, ny = input.ny;
  Field out(layer.out_ch, nx, ny);
  for (int oc = 0; oc < layer.out_ch; ++oc) {
    const double bias = layer.b[static_cast<std::size_t>(oc)];
    double* dst = out.channel(oc);
    for (std::size_t i = 0; i < out.plane(); ++i) dst[i] = bias;
    for (int ic = 0; ic < layer.in_ch; ++ic) {
      const double* kw = layer.w.data() + (static_cast<std::size_t>(oc) * layer.in_ch + ic) * 9;
      const double* src = input.channel(ic);
      for (int iy = 0; iy < ny; ++iy) {
        const int ky_lo = iy > 0 ? 0 : 1;
        const int ky_hi = iy < ny - 1 ? 2 : 1;
        double* row = dst + static_cast<std::size_t>(iy) * nx;
        for (int ky = ky_lo; ky <= ky_hi; ++ky) {
          const double* srow = src + static_cast<std::size_t>(iy + ky - 1) * nx;
          const double* kr = kw + ky * 3;
          for (int ix = 0; ix < nx; ++ix) {
            double acc = 0.0;
            if (ix > 0) acc += kr[0] * srow[ix - 1];
            acc += kr[1] * srow[ix];
            if (ix < nx - 1) acc += kr[2] * srow[ix + 1];
            row[ix] += acc;
          }
        }
      }
    }
  }
  return out;
}

Field conv3x3_backward(const Field& input, const ConvLayer& layer, const Field& grad_out,
                       ConvLayer& grads) {
  if (input.channels != layer.in_ch || grad_out.channels != layer.out_ch ||
      input.nx != grad_out.nx || input.ny != grad_out.ny)
    throw std::invalid_argument("conv3x3_backward: shape mismatch");
  if (grads.in_ch != layer.in_ch || grads.out_ch != layer.out_ch)
    throw std::invalid_argument("conv3x3_backward: grad shape mismatch");

  const int nx = input.nx, ny = input.ny;
  Field grad_in(layer.in_ch, nx, ny);

  for (int oc = 0; oc < layer.out_ch; ++oc) {
    const double* go = grad_out.channel(oc);
    double& gb = grads.b[static_cast<std::size_t>(oc)];
    for (std::size_t i = 0; i < grad_out.plane(); ++i) gb += go[i];

    for (int ic = 0; ic < layer.in_ch; ++ic) {
      const std::size_t koff = (static_cast<std::size_t>(oc) * layer.in_ch + ic) * 9;
      const double* kw = layer.w.data() + koff;
      double* gw = grads.w.data() + koff;
      const double* src = input.channel(ic);
      double* gi = grad_in.channel(ic);
      for (int ky = 0; ky < 3; ++ky)
        for (int kx = 0; kx < 3; ++kx) {
          const int dy = ky - 1, dx = kx - 1;
          double acc = 0.0;
          const int y0 = dy < 0 ? 1 : 0;
          const int y1 = dy > 0 ? ny - 1 : ny;
          const int x0 = dx < 0 ? 1 : 0;
          const int x1 = dx > 0 ? nx - 1 : nx;
          for (int iy = y0; iy < y1; ++iy) {
            const double* gr = go + static_cast<std::size_t>(iy) * nx;
            const double* sr = src + static_cast<std::size_t>(iy + dy) * nx;
            double* gir = gi + static_cast<std::size_t>(iy + dy) * nx;
            const double kv = kw[ky * 3 + kx];
            for (int ix = x0; ix < x1; ++ix) {
              acc += gr[ix] * sr[ix + dx];
              gir[ix + dx] += kv * gr[ix];
            }
          }
          gw[ky * 3 + kx] += acc;
        }
    }
  }
  return grad_in;
}

void relu_inplace(Field& x) {
  for (auto& v : x.v)
    if (v < 0.0) v = 0.0;
}

Field relu_backward(const Field& z, const Field& grad_a) {
  if (!z.same_shape(grad_a)) throw std::invalid_argument("relu_backward: shape mismatch");
  Field out = grad_a;
  for (std::size_t i = 0; i < z.v.size(); ++i)
    if (z.v[i] <= 0.0) out.v[i] = 0.0;
  return out;
}

ConvBlockWeights::ConvBlockWeights(int in, int out, int hidden)
    : l1(in, hidden), l2(hidden, hidden), l3(hidden, out) {}

Field block_forward(const Field& input, const ConvBlockWeights& blk, BlockTape* tape) {
  Field z1 = conv3x3_forward(input, blk.l1);
  Field a1 = z1;
  relu_inplace(a1);
  Field z2 = conv3x3_forward(a1, blk.l2);
  Field a2 = z2;
  relu_inplace(a2);
  Field out = conv3x3_forward(a2, blk.l3);
  if (tape != nullptr) {
    tape->input = input;
    tape->z1 = std::move(z1);
    tape->z2 = std::move(z2);
  }
  return out;
}

Field block_backward(const BlockTape& tape, const ConvBlockWeights& blk, const Field& grad_out,
                     ConvBlockWeights& grads) {
  Field a2 = tape.z2;
  relu_inplace(a2);
  const Field da2 = conv3x3_backward(a2, blk.l3, grad_out, grads.l3);
  const Field dz2 = relu_backward(tape.z2, da2);

  Field a1 = tape.z1;
  relu_inplace(a1);
  const Field da1 = conv3x3_backward(a1, blk.l2, dz2, grads.l2);
  const Field dz1 = relu_backward(tape.z1, da1);

  return conv3x3_backward(tape.input, blk.l1, dz1, grads.l1);
}

}  // namespace pat::nn
