#pragma once

#include "pat/nn/lpd.hpp"

namespace pat::nn {

/// First and second moment estimates, shaped like the net they optimize.
struct AdamState {
  UnrolledNet m;
  UnrolledNet v;
  int step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState for_net(const UnrolledNet& net);
};

/// One standard Adam update with bias correction. grads must share the
/// net's shape.
void adam_step(UnrolledNet& net, const UnrolledNet& grads, AdamState& state, double lr);

}  // namespace pat::nn
