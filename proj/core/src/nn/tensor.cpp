#include "pat/nn/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace pat::nn {

Field::Field(int channels_, int nx_, int ny_, double fill)
    : channels(channels_), nx(nx_), ny(ny_) {
  if (channels < 0 || nx <= 0 || ny <= 0) throw std::invalid_argument("Field: bad shape");
  v.assign(size(), fill);
}

Image channel_as_image(const Field& x, int c) {
  Image out(x.nx, x.ny);
  const double* src = x.channel(c);
  std::copy(src, src + x.plane(), out.v.begin());
  return out;
}

Sinogram channel_as_sinogram(const Field& x, int c, double dt, double t0) {
  Sinogram out(x.ny, x.nx, dt, t0);
  const double* src = x.channel(c);
  std::copy(src, src + x.plane(), out.v.begin());
  return out;
}

void set_channel(Field& x, int c, const std::vector<double>& plane) {
  if (plane.size() != x.plane()) throw std::invalid_argument("set_channel: size mismatch");
  std::copy(plane.begin(), plane.end(), x.channel(c));
}

void add_to_channel(Field& x, int c, const std::vector<double>& plane) {
  if (plane.size() != x.plane()) throw std::invalid_argument("add_to_channel: size mismatch");
  double* dst = x.channel(c);
  for (std::size_t i = 0; i < plane.size(); ++i) dst[i] += plane[i];
}

Field concat_planes(const Field& base, const std::vector<const std::vector<double>*>& extras) {
  Field out(base.channels + static_cast<int>(extras.size()), base.nx, base.ny);
  std::copy(base.v.begin(), base.v.end(), out.v.begin());
  for (std::size_t e = 0; e < extras.size(); ++e) {
    if (extras[e]->size() != base.plane())
      throw std::invalid_argument("concat_planes: size mismatch");
    std::copy(extras[e]->begin(), extras[e]->end(),
              out.channel(base.channels + static_cast<int>(e)));
  }
  return out;
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace pat::nn
