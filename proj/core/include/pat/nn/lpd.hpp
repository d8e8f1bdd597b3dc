#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "pat/acoustic.hpp"
#include "pat/nn/conv.hpp"

namespace pat::nn {

/// Unrolled primal-dual network. Each of the N iterations owns an
/// independent dual block (k+2 -> k channels over the sinogram domain) and
/// primal block (k+1 -> k channels over the image domain).
struct UnrolledNet {
  int iterations = 0;
  int channels = 0;
  int hidden = 32;
  bool segmentation_head = false;
  std::vector<ConvBlockWeights> dual_blocks;
  std::vector<ConvBlockWeights> primal_blocks;

  static UnrolledNet zeros(int iterations, int channels, bool segmentation_head,
                           int hidden = 32);
};

/// He-uniform fan-in initialization; the last layer of every block is scaled
/// by 0.1 so the first residual updates stay small.
UnrolledNet init_net(int iterations, int channels, bool segmentation_head, std::uint64_t seed,
                     int hidden = 32);

/// Applies fn to every parameter array of the net, in a fixed order shared
/// with the serialized layout.
template <typename Net, typename Fn>
void for_each_param(Net& net, Fn&& fn) {
  for (int n = 0; n < net.iterations; ++n) {
    for (auto* blk : {&net.dual_blocks[static_cast<std::size_t>(n)],
                      &net.primal_blocks[static_cast<std::size_t>(n)]}) {
      for (auto* layer : {&blk->l1, &blk->l2, &blk->l3}) {
        fn(layer->w);
        fn(layer->b);
      }
    }
  }
}

std::size_t parameter_count(const UnrolledNet& net);

void save_net(const UnrolledNet& net, const std::filesystem::path& path);
UnrolledNet load_net(const std::filesystem::path& path);

/// Logistic squashing with the argument clamped to [-30, 30].
double logistic(double z);

struct LpdTape {
  std::vector<BlockTape> dual;
  std::vector<BlockTape> primal;
  Field u_final;  // all primal channels before the segmentation nonlinearity
};

struct LpdOutput {
  Image reconstruction;
  Image segmentation;  // empty unless the head is enabled
};

/// Runs Algorithm-2-style unrolled iterations with the fixed operator.
/// u and q start at zero; reconstruction is primal channel 1 and the
/// segmentation is the logistic of primal channel 2 at the last iteration.
LpdOutput lpd_forward(const UnrolledNet& net, const AcousticOperator& op, const Sinogram& f,
                      LpdTape* tape = nullptr);

/// Exact gradients of a scalar loss for every net parameter, given the
/// gradients w.r.t. the reconstruction and (optionally) the segmentation
/// probabilities. Requires the tape from the matching forward call.
UnrolledNet lpd_backward(const UnrolledNet& net, const AcousticOperator& op, const LpdTape& tape,
                         const Image& grad_recon, const Image* grad_seg);

/// Squared L2 distance with gradient 2(recon - gt).
double loss_recon(const Image& recon, const Image& gt, Image* grad);

/// Adds beta times the mean binary cross-entropy of the segmentation,
/// with probabilities clamped 1e-7 away from {0,1}. beta == 0 skips the
/// segmentation term entirely.
double loss_joint(const Image& recon, const Image& seg, const Image& gt, const Image& gt_seg,
                  double beta, Image* grad_recon, Image* grad_seg);

}  // namespace pat::nn
