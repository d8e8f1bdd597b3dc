#pragma once

#include "pat/acoustic.hpp"

namespace pat {

/// Hann-windowed ramp filter applied to each detector trace along time.
/// Zero-padded to the next power of two past twice the trace length, so the
/// circular convolution never wraps. The DC bin is removed exactly.
Sinogram ramp_filter(const Sinogram& f);

/// Filtered backprojection with a calibrated output scale.
struct FbpReconstructor {
  const AcousticOperator* op = nullptr;
  double scale = 1.0;

  Image reconstruct(const Sinogram& f) const;
};

/// Calibrates the backprojection scale once per geometry: a centered disk of
/// unit amplitude is pushed through the operator and the scale is set so its
/// reconstruction peaks at one.
FbpReconstructor make_fbp_reconstructor(const AcousticOperator& op);

/// One-shot convenience wrapper around calibration plus reconstruction.
Image fbp_reconstruct(const AcousticOperator& op, const Sinogram& f);

}  // namespace pat
