#include "pat/nn/lpd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pat/io.hpp"
#include "pat/rng.hpp"

namespace pat::nn {

namespace {

constexpr std::uint64_t kInitStream = 0x1b0c5ea7ULL;
constexpr std::uint32_t kWeightsVersion = 1;

void fill_layer(ConvLayer& layer, Rng& rng, double scale) {
  const double limit = std::sqrt(6.0 / (static_cast<double>(layer.in_ch) * 9.0)) * scale;
  for (auto& w : layer.w) w = rng.uniform(-limit, limit);
  for (auto& b : layer.b) b = 0.0;
}

void check_widths(const UnrolledNet& net) {
  if (net.iterations <= 0 || net.channels <= 0 || net.hidden <= 0)
    throw std::invalid_argument("UnrolledNet: bad dimensions");
  if (net.segmentation_head && net.channels < 2)
    throw std::invalid_argument("UnrolledNet: segmentation head needs at least two channels");
  if (net.dual_blocks.size() != static_cast<std::size_t>(net.iterations) ||
      net.primal_blocks.size() != static_cast<std::size_t>(net.iterations))
    throw std::invalid_argument("UnrolledNet: block count mismatch");
  for (int n = 0; n < net.iterations; ++n) {
    const auto& d = net.dual_blocks[static_cast<std::size_t>(n)];
    const auto& p = net.primal_blocks[static_cast<std::size_t>(n)];
    if (d.l1.in_ch != net.channels + 2 || d.l3.out_ch != net.channels ||
        p.l1.in_ch != net.channels + 1 || p.l3.out_ch != net.channels)
      throw std::invalid_argument("UnrolledNet: block widths do not match the channel count");
  }
}

}  // namespace

UnrolledNet UnrolledNet::zeros(int iterations, int channels, bool segmentation_head, int hidden) {
  UnrolledNet net;
  net.iterations = iterations;
  net.channels = channels;
  net.hidden = hidden;
  net.segmentation_head = segmentation_head;
  for (int n = 0; n < iterations; ++n) {
    net.dual_blocks.emplace_back(channels + 2, channels, hidden);
    net.primal_blocks.emplace_back(channels + 1, channels, hidden);
  }
  check_widths(net);
  return net;
}

UnrolledNet init_net(int iterations, int channels, bool segmentation_head, std::uint64_t seed,
                     int hidden) {
  UnrolledNet net = UnrolledNet::zeros(iterations, channels, segmentation_head, hidden);
  Rng rng(mix_seed(seed, kInitStream));
  for (int n = 0; n < net.iterations; ++n) {
    for (auto* blk : {&net.dual_blocks[static_cast<std::size_t>(n)],
                      &net.primal_blocks[static_cast<std::size_t>(n)]}) {
      fill_layer(blk->l1, rng, 1.0);
      fill_layer(blk->l2, rng, 1.0);
      fill_layer(blk->l3, rng, 0.1);
    }
  }
  return net;
}

std::size_t parameter_count(const UnrolledNet& net) {
  std::size_t n = 0;
  for_each_param(net, [&n](const std::vector<double>& p) { n += p.size(); });
  return n;
}

void save_net(const UnrolledNet& net, const std::filesystem::path& path) {
  check_widths(net);
  auto stream = io::open_out(path);
  io::Writer w(stream);
  w.magic("LPDW");
  w.u32(kWeightsVersion);
  w.u32(static_cast<std::uint32_t>(net.iterations));
  w.u32(static_cast<std::uint32_t>(net.channels));
  w.u32(static_cast<std::uint32_t>(net.hidden));
  w.u32(net.segmentation_head ? 1 : 0);
  for_each_param(net, [&w](const std::vector<double>& p) {
    w.u32(static_cast<std::uint32_t>(p.size()));
    w.f64_array(p.data(), p.size());
  });
  if (!stream) throw std::runtime_error("save_net: write failed: " + path.string());
}

UnrolledNet load_net(const std::filesystem::path& path) {
  auto stream = io::open_in(path);
  io::Reader r(stream);
  r.expect_magic("LPDW");
  const std::uint32_t version = r.u32();
  if (version != kWeightsVersion)
    throw std::runtime_error("load_net: unsupported version " + std::to_string(version));
  const int iterations = static_cast<int>(r.u32());
  const int channels = static_cast<int>(r.u32());
  const int hidden = static_cast<int>(r.u32());
  const bool head = r.u32() != 0;
  UnrolledNet net = UnrolledNet::zeros(iterations, channels, head, hidden);
  for_each_param(net, [&r, &path](std::vector<double>& p) {
    const std::uint32_t count = r.u32();
    if (count != p.size())
      throw std::runtime_error("load_net: tensor size mismatch in " + path.string());
    r.f64_array(p.data(), p.size());
  });
  return net;
}

double logistic(double z) {
  const double zc = std::clamp(z, -30.0, 30.0);
  return 1.0 / (1.0 + std::exp(-zc));
}

LpdOutput lpd_forward(const UnrolledNet& net, const AcousticOperator& op, const Sinogram& f,
                      LpdTape* tape) {
  check_widths(net);
  if (f.n_det != op.detectors.count() || f.n_t != op.time.n_t)
    throw std::invalid_argument("lpd_forward: sinogram does not match the operator");

  const int k = net.channels;
  Field u(k, op.grid.nx, op.grid.ny);
  Field q(k, f.n_t, f.n_det);

  if (tape != nullptr) {
    tape->dual.assign(static_cast<std::size_t>(net.iterations), BlockTape{});
    tape->primal.assign(static_cast<std::size_t>(net.iterations), BlockTape{});
  }

  for (int n = 0; n < net.iterations; ++n) {
    const Sinogram ku1 = op.apply(channel_as_image(u, 0));
    const Field dual_in = concat_planes(q, {&ku1.v, &f.v});
    const Field dq = block_forward(dual_in, net.dual_blocks[static_cast<std::size_t>(n)],
                                   tape ? &tape->dual[static_cast<std::size_t>(n)] : nullptr);
    for (std::size_t i = 0; i < q.v.size(); ++i) q.v[i] += dq.v[i];
    if (!all_finite(q.v))
      throw std::runtime_error("lpd_forward: non-finite dual state at iteration " +
                               std::to_string(n));

    const Image ktq1 = op.apply_adjoint(channel_as_sinogram(q, 0, f.dt, f.t0));
    const Field primal_in = concat_planes(u, {&ktq1.v});
    const Field du = block_forward(primal_in, net.primal_blocks[static_cast<std::size_t>(n)],
                                   tape ? &tape->primal[static_cast<std::size_t>(n)] : nullptr);
    for (std::size_t i = 0; i < u.v.size(); ++i) u.v[i] += du.v[i];
    if (!all_finite(u.v))
      throw std::runtime_error("lpd_forward: non-finite primal state at iteration " +
                               std::to_string(n));
  }

  LpdOutput out;
  out.reconstruction = channel_as_image(u, 0);
  if (net.segmentation_head) {
    out.segmentation = Image(u.nx, u.ny);
    const double* z = u.channel(1);
    for (std::size_t i = 0; i < out.segmentation.v.size(); ++i)
      out.segmentation.v[i] = logistic(z[i]);
  }
  if (tape != nullptr) tape->u_final = std::move(u);
  return out;
}

UnrolledNet lpd_backward(const UnrolledNet& net, const AcousticOperator& op, const LpdTape& tape,
                         const Image& grad_recon, const Image* grad_seg) {
  check_widths(net);
  if (tape.dual.size() != static_cast<std::size_t>(net.iterations) ||
      tape.primal.size() != static_cast<std::size_t>(net.iterations))
    throw std::invalid_argument("lpd_backward: tape does not match the net");

  const int k = net.channels;
  const Field& uf = tape.u_final;
  Field du(k, uf.nx, uf.ny);
  add_to_channel(du, 0, grad_recon.v);
  if (grad_seg != nullptr) {
    if (!net.segmentation_head)
      throw std::invalid_argument("lpd_backward: segmentation gradient without a head");
    double* dst = du.channel(1);
    const double* z = uf.channel(1);
    for (std::size_t i = 0; i < grad_seg->v.size(); ++i) {
      if (std::abs(z[i]) < 30.0) {
        const double s = logistic(z[i]);
        dst[i] += grad_seg->v[i] * s * (1.0 - s);
      }
    }
  }

  const BlockTape& first_dual = tape.dual.front();
  Field dq(k, first_dual.input.nx, first_dual.input.ny);
  const double dt = op.time.dt, t0 = op.time.t0;

  UnrolledNet grads = UnrolledNet::zeros(net.iterations, k, net.segmentation_head, net.hidden);

  for (int n = net.iterations - 1; n >= 0; --n) {
    const Field din_primal =
        block_backward(tape.primal[static_cast<std::size_t>(n)],
                       net.primal_blocks[static_cast<std::size_t>(n)], du,
                       grads.primal_blocks[static_cast<std::size_t>(n)]);
    for (int c = 0; c < k; ++c) {
      double* dst = du.channel(c);
      const double* src = din_primal.channel(c);
      for (std::size_t i = 0; i < du.plane(); ++i) dst[i] += src[i];
    }
    // ktq1 = K^T q_1, so its gradient flows back through K
    const Sinogram dktq1 = op.apply(channel_as_image(din_primal, k));
    add_to_channel(dq, 0, dktq1.v);

    const Field din_dual =
        block_backward(tape.dual[static_cast<std::size_t>(n)],
                       net.dual_blocks[static_cast<std::size_t>(n)], dq,
                       grads.dual_blocks[static_cast<std::size_t>(n)]);
    for (int c = 0; c < k; ++c) {
      double* dst = dq.channel(c);
      const double* src = din_dual.channel(c);
      for (std::size_t i = 0; i < dq.plane(); ++i) dst[i] += src[i];
    }
    // ku1 = K u_1, so its gradient flows back through K^T; the data plane
    // gradient is dropped
    const Image dku1 = op.apply_adjoint(channel_as_sinogram(din_dual, k, dt, t0));
    add_to_channel(du, 0, dku1.v);
  }
  return grads;
}

double loss_recon(const Image& recon, const Image& gt, Image* grad) {
  if (!recon.same_shape(gt)) throw std::invalid_argument("loss_recon: shape mismatch");
  double loss = 0.0;
  if (grad != nullptr) *grad = Image(recon.nx, recon.ny);
  for (std::size_t i = 0; i < recon.v.size(); ++i) {
    const double d = recon.v[i] - gt.v[i];
    loss += d * d;
    if (grad != nullptr) grad->v[i] = 2.0 * d;
  }
  return loss;
}

double loss_joint(const Image& recon, const Image& seg, const Image& gt, const Image& gt_seg,
                  double beta, Image* grad_recon, Image* grad_seg) {
  if (beta < 0.0) throw std::invalid_argument("loss_joint: beta must be nonnegative");
  double loss = loss_recon(recon, gt, grad_recon);
  if (beta == 0.0) {
    if (grad_seg != nullptr) *grad_seg = Image(recon.nx, recon.ny);
    return loss;
  }
  if (!seg.same_shape(gt_seg) || !seg.same_shape(recon))
    throw std::invalid_argument("loss_joint: shape mismatch");
  if (grad_seg != nullptr) *grad_seg = Image(seg.nx, seg.ny);

  const double eps = 1e-7;
  const double inv_n = 1.0 / static_cast<double>(seg.v.size());
  double bce = 0.0;
  for (std::size_t i = 0; i < seg.v.size(); ++i) {
    const double y = gt_seg.v[i];
    if (y != 0.0 && y != 1.0) throw std::invalid_argument("loss_joint: gt_seg is not binary");
    const double p = std::clamp(seg.v[i], eps, 1.0 - eps);
    bce += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    if (grad_seg != nullptr && seg.v[i] > eps && seg.v[i] < 1.0 - eps)
      grad_seg->v[i] = beta * inv_n * (p - y) / (p * (1.0 - p));
  }
  return loss + beta * bce * inv_n;
}

}  // namespace pat::nn
