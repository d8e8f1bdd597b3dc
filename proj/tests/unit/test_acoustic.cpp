#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "pat/acoustic.hpp"
#include "pat/rng.hpp"

using namespace pat;

namespace {

struct Setup {
  Grid2D grid;
  DetectorArray det;
  TimeAxis time;
  TofTable tof;
  AcousticOperator op;
};

Setup make_setup(int n, int n_det, double c = 1.5) {
  Setup s;
  s.grid = make_centered_grid(n, 24.0);
  s.det = make_uniform_detectors(s.grid, n_det, default_detector_radius(s.grid), kTwoPi, 0.0);
  s.time = make_default_time_axis(s.grid, s.det, c);
  s.tof = analytic_tof(s.grid, s.det, c);
  s.op = assemble(s.grid, s.det, s.time, s.tof);
  return s;
}

Image random_image(const Grid2D& g, std::uint64_t seed) {
  Image u(g.nx, g.ny);
  Rng rng(seed);
  for (auto& v : u.v) v = rng.uniform(-1, 1);
  return u;
}

/// Arc length of the circle |x - center| = r inside the rectangle, by dense
/// angular sampling; plenty accurate as an oracle at 2e5 samples.
double arc_length_in_rect(const std::array<double, 2>& center, double r,
                          const std::array<double, 4>& rect) {
  const int n = 200000;
  int inside = 0;
  for (int i = 0; i < n; ++i) {
    const double a = kTwoPi * i / n;
    const double x = center[0] + r * std::cos(a);
    const double y = center[1] + r * std::sin(a);
    inside += x >= rect[0] && x <= rect[1] && y >= rect[2] && y <= rect[3];
  }
  return kTwoPi * r * inside / n;
}

}  // namespace

TEST_SUITE("acoustic") {
  TEST_CASE("operator entries are non-negative and mass is conserved exactly") {
    const Setup s = make_setup(32, 8);
    for (double v : s.op.k.val) CHECK(v >= 0.0);
    // per-pixel interpolation weights sum to 1, so a row-block sum over all
    // times equals total image mass times the area scaling
    const Image u = random_image(s.grid, 3);
    const Sinogram f = s.op.apply(u);
    double mass = 0.0;
    for (double v : u.v) mass += v;
    const double expected =
        mass * s.grid.pixel_size * s.grid.pixel_size / (s.op.c_ref * s.time.dt);
    for (int d = 0; d < s.det.count(); ++d) {
      double row_sum = 0.0;
      for (int j = 0; j < s.time.n_t; ++j) row_sum += f.at(d, j);
      CHECK(row_sum == doctest::Approx(expected).epsilon(1e-9));
    }
  }

  TEST_CASE("unit pixel at the center arrives at the ring radius, same for every detector") {
    const Setup s = make_setup(33, 12);  // odd grid puts a pixel exactly at the center
    Image u(s.grid.nx, s.grid.ny);
    u.at(16, 16) = 1.0;
    CHECK(s.grid.x(16) == doctest::Approx(0.0));
    const Sinogram f = s.op.apply(u);
    const double expect_idx = (s.det.radius / 1.5 - s.time.t0) / s.time.dt;
    for (int d = 0; d < s.det.count(); ++d) {
      double mass = 0.0, centroid = 0.0;
      for (int j = 0; j < s.time.n_t; ++j) {
        mass += f.at(d, j);
        centroid += j * f.at(d, j);
      }
      REQUIRE(mass > 0.0);
      centroid /= mass;
      CHECK(std::abs(centroid - expect_idx) <= 0.5);
    }
  }

  TEST_CASE("all-ones image reproduces the arc length inside the grid") {
    const Setup s = make_setup(64, 4);
    Image ones(s.grid.nx, s.grid.ny, 1.0);
    const Sinogram f = s.op.apply(ones);
    const auto rect = s.grid.bounding_box();
    for (int d = 0; d < s.det.count(); ++d) {
      // radii clear of entry/exit tangencies: the ring is at 25.46 mm from
      // the center, grid half-extent 12 mm, so the circle meets the grid for
      // r in about [13.5, 38]; sample the well-interior band
      for (double r_mm : {18.0, 22.0, 26.0, 30.0}) {
        const int j = static_cast<int>(std::lround((r_mm / 1.5 - s.time.t0) / s.time.dt));
        REQUIRE(j < s.time.n_t);
        const double oracle = arc_length_in_rect(s.det.positions[d], r_mm, rect);
        REQUIRE(oracle > 1.0);
        CHECK(f.at(d, j) == doctest::Approx(oracle).epsilon(0.05));
      }
    }
  }

  TEST_CASE("apply is linear and the adjoint is exact") {
    const Setup s = make_setup(24, 6);
    const Image u = random_image(s.grid, 1);
    const Image v = random_image(s.grid, 2);
    Image upv(s.grid.nx, s.grid.ny);
    for (std::size_t i = 0; i < upv.v.size(); ++i) upv.v[i] = u.v[i] + v.v[i];
    const Sinogram fu = s.op.apply(u);
    const Sinogram fv = s.op.apply(v);
    const Sinogram fupv = s.op.apply(upv);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < fu.v.size(); ++i) {
      const double d = fupv.v[i] - fu.v[i] - fv.v[i];
      num += d * d;
      den += fupv.v[i] * fupv.v[i];
    }
    CHECK(std::sqrt(num) <= 1e-12 * std::sqrt(den));

    Image zero(s.grid.nx, s.grid.ny);
    const Sinogram fz = s.op.apply(zero);
    CHECK(max_abs(fz.v) == 0.0);

    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
      const Image x = random_image(s.grid, 100 + trial);
      Sinogram q(s.det.count(), s.time.n_t, s.time.dt, s.time.t0);
      for (auto& w : q.v) w = rng.uniform(-1, 1);
      const Sinogram kx = s.op.apply(x);
      const Image kty = s.op.apply_adjoint(q);
      const double lhs = dot(kx.v, q.v);
      const double rhs = dot(x.v, kty.v);
      CHECK(std::abs(lhs - rhs) <= 1e-9 * norm2(kx.v) * norm2(q.v));
    }
  }

  TEST_CASE("single-bin adjoint is supported on the matrix row") {
    const Setup s = make_setup(24, 6);
    Sinogram f(s.det.count(), s.time.n_t, s.time.dt, s.time.t0);
    const int d = 2;
    const int j = s.time.n_t / 2;
    f.at(d, j) = 1.0;
    const Image bp = s.op.apply_adjoint(f);
    const std::size_t row = static_cast<std::size_t>(d) * s.time.n_t + j;
    std::vector<bool> in_row(s.grid.npixels(), false);
    for (std::size_t k = s.op.k.row_ptr[row]; k < s.op.k.row_ptr[row + 1]; ++k)
      in_row[s.op.k.col[k]] = true;
    for (std::size_t p = 0; p < s.grid.npixels(); ++p) {
      if (in_row[p])
        CHECK(bp.v[p] > 0.0);
      else
        CHECK(bp.v[p] == 0.0);
    }
  }

  TEST_CASE("shape mismatches and empty matrices are rejected") {
    const Setup s = make_setup(24, 6);
    CHECK_THROWS(s.op.apply(Image(8, 8)));
    CHECK_THROWS(s.op.apply_adjoint(Sinogram(2, 3)));
    // a time axis entirely before the first arrival yields an empty matrix
    const TimeAxis tiny(2, 1e-6, 0.0);
    CHECK_THROWS(assemble(s.grid, s.det, tiny, s.tof));
  }

  TEST_CASE("norm estimate is a fixed point and matches dense SVD") {
    const Setup s = make_setup(16, 6);
    Eigen::MatrixXd dense =
        Eigen::MatrixXd::Zero(static_cast<long>(s.op.k.rows), static_cast<long>(s.op.k.cols));
    for (std::size_t r = 0; r < s.op.k.rows; ++r)
      for (std::size_t k = s.op.k.row_ptr[r]; k < s.op.k.row_ptr[r + 1]; ++k)
        dense(static_cast<long>(r), s.op.k.col[k]) = s.op.k.val[k];
    const double svd_norm = dense.jacobiSvd().singularValues()(0);
    CHECK(s.op.norm_estimate == doctest::Approx(svd_norm).epsilon(0.01));
    const double refined = power_iteration_norm(s.op.k, s.op.kt, 250);
    CHECK(std::abs(refined - s.op.norm_estimate) <= 1e-3 * refined);
  }

  TEST_CASE("detector selection slices sinogram rows") {
    const Setup s = make_setup(24, 8);
    const std::vector<int> keep = {1, 4, 6};
    const AcousticOperator sub = select_detectors(s.op, keep);
    REQUIRE(sub.detectors.count() == 3);
    CHECK(sub.detectors.positions[0] == s.det.positions[1]);
    const Image u = random_image(s.grid, 9);
    const Sinogram full = s.op.apply(u);
    const Sinogram part = sub.apply(u);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < s.time.n_t; ++j)
        CHECK(part.at(i, j) == full.at(keep[static_cast<std::size_t>(i)], j));
    CHECK(sub.norm_estimate > 0.0);
    CHECK(sub.norm_estimate <= s.op.norm_estimate * (1.0 + 1e-9));
    CHECK_THROWS(select_detectors(s.op, {8}));
  }

  TEST_CASE("assembly from marching times equals assembly from straight rays when uniform") {
    const Grid2D g = make_centered_grid(32, 24.0);
    const auto det = make_uniform_detectors(g, 8, default_detector_radius(g), kTwoPi, 0.0);
    const auto time = make_default_time_axis(g, det, 1.5);
    const auto via_analytic = assemble(g, det, time, analytic_tof(g, det, 1.5));
    const auto via_eikonal =
        assemble(g, det, time, eikonal_tof(SoundSpeedMap::uniform(g, 1.5), det, g));
    REQUIRE(via_analytic.k.nnz() == via_eikonal.k.nnz());
    double diff2 = 0.0;
    for (std::size_t i = 0; i < via_analytic.k.val.size(); ++i) {
      const double d = via_analytic.k.val[i] - via_eikonal.k.val[i];
      diff2 += d * d;
    }
    CHECK(std::sqrt(diff2) <= 1e-6 * via_analytic.k.frobenius_norm());
  }
}
