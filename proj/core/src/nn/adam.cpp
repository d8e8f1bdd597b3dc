#include "pat/nn/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace pat::nn {

AdamState AdamState::for_net(const UnrolledNet& net) {
  AdamState s;
  s.m = UnrolledNet::zeros(net.iterations, net.channels, net.segmentation_head, net.hidden);
  s.v = UnrolledNet::zeros(net.iterations, net.channels, net.segmentation_head, net.hidden);
  return s;
}

void adam_step(UnrolledNet& net, const UnrolledNet& grads, AdamState& state, double lr) {
  if (parameter_count(net) != parameter_count(grads) ||
      parameter_count(net) != parameter_count(state.m))
    throw std::invalid_argument("adam_step: shape mismatch");

  state.step += 1;
  const double c1 = 1.0 - std::pow(state.beta1, state.step);
  const double c2 = 1.0 - std::pow(state.beta2, state.step);

  std::vector<std::vector<double>*> ws, ms, vs;
  std::vector<const std::vector<double>*> gs;
  for_each_param(net, [&ws](std::vector<double>& p) { ws.push_back(&p); });
  for_each_param(grads, [&gs](const std::vector<double>& p) { gs.push_back(&p); });
  for_each_param(state.m, [&ms](std::vector<double>& p) { ms.push_back(&p); });
  for_each_param(state.v, [&vs](std::vector<double>& p) { vs.push_back(&p); });

  for (std::size_t a = 0; a < ws.size(); ++a) {
    auto& w = *ws[a];
    const auto& g = *gs[a];
    auto& m = *ms[a];
    auto& v = *vs[a];
    if (w.size() != g.size()) throw std::invalid_argument("adam_step: tensor size mismatch");
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      w[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + state.epsilon);
    }
  }
}

}  // namespace pat::nn
