#include <cmath>

#include "doctest.h"
#include "pat/fbp.hpp"
#include "pat/metrics.hpp"
#include "pat/rng.hpp"

using namespace pat;

namespace {

AcousticOperator make_ring_operator(int n, int n_det) {
  const Grid2D g = make_centered_grid(n, 24.0);
  const auto det = make_uniform_detectors(g, n_det, default_detector_radius(g), kTwoPi, 0.0);
  const auto time = make_default_time_axis(g, det, 1.5);
  return assemble(g, det, time, analytic_tof(g, det, 1.5));
}

Image stamp_disk(const Grid2D& g, double cx, double cy, double r, double amp) {
  Image u(g.nx, g.ny);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const double dx = g.x(ix) - cx;
      const double dy = g.y(iy) - cy;
      if (dx * dx + dy * dy <= r * r) u.at(ix, iy) += amp;
    }
  return u;
}

}  // namespace

TEST_SUITE("fbp") {
  TEST_CASE("ramp filter removes DC and keeps linearity") {
    // zero padding turns a constant trace into a boxcar, so the trace ends
    // carry edge responses; away from them the constant is suppressed
    Sinogram flat(3, 100, 0.1, 0.0);
    for (auto& v : flat.v) v = 2.5;
    const Sinogram out = ramp_filter(flat);
    for (int d = 0; d < 3; ++d)
      for (int j = 35; j < 65; ++j) CHECK(std::abs(out.at(d, j)) <= 0.02 * 2.5);

    Rng rng(11);
    Sinogram a(2, 64, 0.1, 0.0), b(2, 64, 0.1, 0.0);
    for (auto& v : a.v) v = rng.uniform(-1, 1);
    for (auto& v : b.v) v = rng.uniform(-1, 1);
    Sinogram combo = a;
    for (std::size_t i = 0; i < combo.v.size(); ++i) combo.v[i] = 2.0 * a.v[i] - 3.0 * b.v[i];
    const Sinogram fa = ramp_filter(a);
    const Sinogram fb = ramp_filter(b);
    const Sinogram fc = ramp_filter(combo);
    for (std::size_t i = 0; i < fc.v.size(); ++i)
      CHECK(fc.v[i] == doctest::Approx(2.0 * fa.v[i] - 3.0 * fb.v[i]).epsilon(1e-10));
  }

  TEST_CASE("impulse response is symmetric about the impulse") {
    Sinogram f(1, 129, 0.1, 0.0);
    const int mid = 64;
    f.v[static_cast<std::size_t>(mid)] = 1.0;
    const Sinogram out = ramp_filter(f);
    CHECK(out.v[static_cast<std::size_t>(mid)] > 0.0);
    for (int off = 1; off <= 40; ++off)
      CHECK(out.v[static_cast<std::size_t>(mid + off)] ==
            doctest::Approx(out.v[static_cast<std::size_t>(mid - off)]).epsilon(1e-9));
  }

  TEST_CASE("zero sinogram reconstructs to the zero image") {
    const auto op = make_ring_operator(32, 16);
    const Sinogram f(op.detectors.count(), op.time.n_t, op.time.dt, op.time.t0);
    const Image u = fbp_reconstruct(op, f);
    CHECK(max_abs(u.v) == 0.0);
  }

  TEST_CASE("calibration transfers to a different disk") {
    const auto op = make_ring_operator(64, 64);
    const Image truth = stamp_disk(op.grid, 1.2, -0.8, 4.2, 2.0);
    const Sinogram f = op.apply(truth);
    const auto rec = make_fbp_reconstructor(op);
    const Image u = rec.reconstruct(f);
    const double peak = max_value(u.v);
    CHECK(peak >= 0.8 * 2.0);
    CHECK(peak <= 1.2 * 2.0);
  }

  TEST_CASE("convenience wrapper matches explicit calibration") {
    const auto op = make_ring_operator(32, 16);
    const Image truth = stamp_disk(op.grid, 0.0, 0.0, 5.0, 1.0);
    const Sinogram f = op.apply(truth);
    const Image a = fbp_reconstruct(op, f);
    const Image b = make_fbp_reconstructor(op).reconstruct(f);
    for (std::size_t i = 0; i < a.v.size(); ++i) CHECK(a.v[i] == b.v[i]);
  }

  TEST_CASE("more detectors never hurt on a fixed phantom") {
    const auto op64 = make_ring_operator(64, 64);
    const auto op16 = make_ring_operator(64, 16);
    Image truth = stamp_disk(op64.grid, -3.0, 2.0, 3.5, 1.0);
    const Image second = stamp_disk(op64.grid, 4.0, -1.5, 2.0, 0.6);
    for (std::size_t i = 0; i < truth.v.size(); ++i) truth.v[i] += second.v[i];

    const Image u64 = fbp_reconstruct(op64, op64.apply(truth));
    const Image u16 = fbp_reconstruct(op16, op16.apply(truth));
    CHECK(psnr(u64, truth) >= psnr(u16, truth));
  }

  TEST_CASE("mismatched sinogram shape is rejected") {
    const auto op = make_ring_operator(32, 16);
    const auto rec = make_fbp_reconstructor(op);
    Sinogram wrong(op.detectors.count() + 1, op.time.n_t, op.time.dt, op.time.t0);
    CHECK_THROWS(rec.reconstruct(wrong));
  }
}
