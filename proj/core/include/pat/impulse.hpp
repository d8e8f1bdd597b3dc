#pragma once

#include <cstdint>
#include <vector>

#include "pat/image.hpp"

namespace pat {

/// Synthetic stand-in for a transducer calibration response: a short tap
/// sequence applied along the time axis of every detector row.
struct ImpulseKernel {
  std::vector<double> taps;
  int center_index = 0;
};

/// Single unit tap; convolution with it is the identity.
ImpulseKernel delta_kernel();

/// Gaussian response sampled on the time lattice. sigma in samples, delay
/// shifts the peak by a possibly fractional number of samples, gain scales
/// the tap sum. Taps are L1-normalized before the gain so DC response equals
/// gain.
ImpulseKernel gaussian_kernel(double sigma_samples, double delay_samples, double gain);

/// Per-detector same-length convolution with the kernel center aligned, zero
/// padding at the ends.
Sinogram convolve_impulse(const Sinogram& f, const ImpulseKernel& kernel);

/// Per-detector Wiener deconvolution. The filter is
///   conj(H) * (1 + reg) / (|H|^2 + reg * max|H|^2)
/// which is exactly the identity for a flat-spectrum (delta) kernel at any
/// reg > 0.
Sinogram deconvolve_impulse(const Sinogram& f, const ImpulseKernel& kernel, double reg);

/// Adds i.i.d. Gaussian noise with standard deviation level * max|f|.
Sinogram add_noise(const Sinogram& f, double level, std::uint64_t seed);

}  // namespace pat
