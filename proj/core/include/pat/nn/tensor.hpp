#pragma once

#include <cstddef>
#include <vector>

#include "pat/image.hpp"

namespace pat::nn {

/// Dense multi-channel field, channel-major then row-major.
/// Works for both image-domain (nx by ny pixels) and sinogram-domain
/// (nx = time samples, ny = detectors) tensors.
struct Field {
  int channels = 0;
  int nx = 0;
  int ny = 0;
  std::vector<double> v;

  Field() = default;
  Field(int channels_, int nx_, int ny_, double fill = 0.0);

  std::size_t plane() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t size() const { return static_cast<std::size_t>(channels) * plane(); }

  double& at(int c, int ix, int iy) {
    return v[(static_cast<std::size_t>(c) * static_cast<std::size_t>(ny) +
              static_cast<std::size_t>(iy)) *
                 static_cast<std::size_t>(nx) +
             static_cast<std::size_t>(ix)];
  }
  double at(int c, int ix, int iy) const {
    return v[(static_cast<std::size_t>(c) * static_cast<std::size_t>(ny) +
              static_cast<std::size_t>(iy)) *
                 static_cast<std::size_t>(nx) +
             static_cast<std::size_t>(ix)];
  }

  double* channel(int c) { return v.data() + static_cast<std::size_t>(c) * plane(); }
  const double* channel(int c) const { return v.data() + static_cast<std::size_t>(c) * plane(); }

  bool same_shape(const Field& o) const {
    return channels == o.channels && nx == o.nx && ny == o.ny;
  }
};

/// Copies a single-channel slice out of a field.
Image channel_as_image(const Field& x, int c);
Sinogram channel_as_sinogram(const Field& x, int c, double dt, double t0);

/// Writes plane data into channel c; sizes must agree.
void set_channel(Field& x, int c, const std::vector<double>& plane);
void add_to_channel(Field& x, int c, const std::vector<double>& plane);

/// Stacks extra planes after the channels of base.
Field concat_planes(const Field& base, const std::vector<const std::vector<double>*>& extras);

bool all_finite(const std::vector<double>& v);

}  // namespace pat::nn
