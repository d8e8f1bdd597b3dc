#include "pat/fbp.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "pat/fft.hpp"

namespace pat {

Sinogram ramp_filter(const Sinogram& f) {
  const std::size_t nfft = next_pow2(2 * static_cast<std::size_t>(f.n_t));
  const std::size_t half = nfft / 2;

  std::vector<double> h(nfft);
  for (std::size_t k = 0; k < nfft; ++k) {
    const std::size_t m = k <= half ? k : nfft - k;
    const double x = static_cast<double>(m) / static_cast<double>(half);
    h[k] = x * (0.5 + 0.5 * std::cos(kPi * x));
  }

  Sinogram out(f.n_det, f.n_t, f.dt, f.t0);
  std::vector<std::complex<double>> buf(nfft);
  for (int d = 0; d < f.n_det; ++d) {
    std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
    const double* src = f.row(d);
    for (int j = 0; j < f.n_t; ++j) buf[static_cast<std::size_t>(j)] = src[j];
    auto spec = fft_forward(buf);
    for (std::size_t k = 0; k < nfft; ++k) spec[k] *= h[k];
    const auto back = fft_inverse(spec);
    double* dst = out.row(d);
    for (int j = 0; j < f.n_t; ++j) dst[j] = back[static_cast<std::size_t>(j)].real();
  }
  return out;
}

Image FbpReconstructor::reconstruct(const Sinogram& f) const {
  if (op == nullptr) throw std::invalid_argument("fbp: reconstructor has no operator");
  Image u = op->apply_adjoint(ramp_filter(f));
  for (auto& v : u.v) v *= scale;
  return u;
}

FbpReconstructor make_fbp_reconstructor(const AcousticOperator& op) {
  const Grid2D& g = op.grid;
  const auto c = g.center();
  const double r = 0.25 * 0.5 * std::min(g.extent_x(), g.extent_y());

  Image disk(g.nx, g.ny);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const double dx = g.x(ix) - c[0];
      const double dy = g.y(iy) - c[1];
      if (dx * dx + dy * dy <= r * r) disk.at(ix, iy) = 1.0;
    }

  const Image u = op.apply_adjoint(ramp_filter(op.apply(disk)));
  const double peak = max_value(u.v);
  if (!(peak > 0.0) || !std::isfinite(peak))
    throw std::runtime_error("fbp: calibration produced a non-positive peak");

  FbpReconstructor rec;
  rec.op = &op;
  rec.scale = 1.0 / peak;
  return rec;
}

Image fbp_reconstruct(const AcousticOperator& op, const Sinogram& f) {
  return make_fbp_reconstructor(op).reconstruct(f);
}

}  // namespace pat
