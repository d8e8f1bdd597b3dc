#include <cmath>
#include <set>

#include "doctest.h"
#include "pat/geometry.hpp"

using namespace pat;

TEST_SUITE("geometry") {
  TEST_CASE("grid validation") {
    CHECK_THROWS(Grid2D(4, 64, 0.5, {0, 0}));
    CHECK_THROWS(Grid2D(64, 64, 0.0, {0, 0}));
    CHECK_THROWS(Grid2D(64, 64, -1.0, {0, 0}));
    CHECK_NOTHROW(Grid2D(8, 8, 0.1, {0, 0}));
  }

  TEST_CASE("centered grid covers the extent symmetrically") {
    const Grid2D g = make_centered_grid(64, 24.0);
    CHECK(g.nx == 64);
    CHECK(g.pixel_size == doctest::Approx(24.0 / 64));
    CHECK(g.center()[0] == doctest::Approx(0.0));
    CHECK(g.center()[1] == doctest::Approx(0.0));
    const auto b = g.bounding_box();
    CHECK(b[0] == doctest::Approx(-12.0));
    CHECK(b[1] == doctest::Approx(12.0));
    CHECK(b[2] == doctest::Approx(-12.0));
    CHECK(b[3] == doctest::Approx(12.0));
    CHECK(g.x(0) == doctest::Approx(-12.0 + 0.5 * g.pixel_size));
    CHECK(g.extent_x() == doctest::Approx(24.0));
    CHECK(g.npixels() == 64u * 64u);
    CHECK(g.index(3, 2) == 2u * 64u + 3u);
    CHECK(g.contains(0.0, 0.0));
    CHECK_FALSE(g.contains(12.1, 0.0));
  }

  TEST_CASE("full-circle detectors have uniform spacing and no duplicate endpoint") {
    const Grid2D g = make_centered_grid(64, 24.0);
    const double r = default_detector_radius(g);
    CHECK(r == doctest::Approx(1.5 * 0.5 * std::hypot(24.0, 24.0)));
    const auto det = make_uniform_detectors(g, 32, r, kTwoPi, 0.0);
    REQUIRE(det.count() == 32);
    for (int i = 0; i < 32; ++i) {
      const auto& p = det.positions[static_cast<std::size_t>(i)];
      CHECK(std::hypot(p[0], p[1]) == doctest::Approx(r).epsilon(1e-12));
    }
    // nearest-neighbour gap equals the chord of 2*pi/32 everywhere
    const double chord = 2.0 * r * std::sin(kPi / 32);
    for (int i = 0; i < 32; ++i) {
      const auto& a = det.positions[static_cast<std::size_t>(i)];
      const auto& b = det.positions[static_cast<std::size_t>((i + 1) % 32)];
      CHECK(std::hypot(a[0] - b[0], a[1] - b[1]) == doctest::Approx(chord).epsilon(1e-9));
    }
  }

  TEST_CASE("partial arc places detectors inclusively") {
    const Grid2D g = make_centered_grid(64, 24.0);
    const double r = default_detector_radius(g);
    const auto det = make_uniform_detectors(g, 5, r, kPi, 0.0);
    REQUIRE(det.count() == 5);
    CHECK(det.positions.front()[0] == doctest::Approx(r));
    CHECK(det.positions.front()[1] == doctest::Approx(0.0));
    CHECK(det.positions.back()[0] == doctest::Approx(-r).epsilon(1e-9));
    CHECK(std::abs(det.positions.back()[1]) < 1e-9);
    // all in the upper half-plane
    for (const auto& p : det.positions) CHECK(p[1] > -1e-9);
  }

  TEST_CASE("detectors inside the grid are rejected") {
    const Grid2D g = make_centered_grid(64, 24.0);
    CHECK_THROWS(make_uniform_detectors(g, 8, 5.0, kTwoPi, 0.0));
    CHECK_THROWS(make_uniform_detectors(g, 8, default_detector_radius(g), 0.0, 0.0));
  }

  TEST_CASE("subsample keeps parent positions in order") {
    const Grid2D g = make_centered_grid(64, 24.0);
    const auto full = make_uniform_detectors(g, 128, default_detector_radius(g), kTwoPi, 0.0);
    const auto sub = subsample_detectors(full, 99, 32);
    REQUIRE(sub.count() == 32);
    // each position appears in the parent, and parent order is preserved
    std::size_t cursor = 0;
    for (const auto& p : sub.positions) {
      while (cursor < full.positions.size() && !(full.positions[cursor] == p)) ++cursor;
      REQUIRE(cursor < full.positions.size());
      ++cursor;
    }
    const auto again = subsample_detectors(full, 99, 32);
    CHECK(again.positions == sub.positions);
    const auto other = subsample_detectors(full, 100, 32);
    CHECK(other.positions != sub.positions);
    const auto identity = subsample_detectors(full, 5, 128);
    CHECK(identity.positions == full.positions);
    CHECK_THROWS(subsample_detectors(full, 1, 129));
  }

  TEST_CASE("default time axis reaches the farthest corner with headroom") {
    const Grid2D g = make_centered_grid(64, 24.0);
    const double c = 1.5;
    const auto det = make_uniform_detectors(g, 16, default_detector_radius(g), kTwoPi, 0.0);
    const auto axis = make_default_time_axis(g, det, c);
    CHECK(axis.dt == doctest::Approx(g.pixel_size / c));
    CHECK(axis.t0 == 0.0);
    double max_dist = 0.0;
    for (const auto& p : det.positions)
      for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix)
          max_dist = std::max(max_dist, std::hypot(p[0] - g.x(ix), p[1] - g.y(iy)));
    CHECK(axis.t(axis.n_t - 1) >= max_dist / c);
    CHECK(axis.t(axis.n_t - 1) <= 1.25 * max_dist / c);
  }

  TEST_CASE("time axis validation") {
    CHECK_THROWS(TimeAxis(1, 0.1, 0.0));
    CHECK_THROWS(TimeAxis(16, 0.0, 0.0));
    CHECK_THROWS(TimeAxis(16, 0.1, -1.0));
  }

  TEST_CASE("sound speed maps") {
    const Grid2D g = make_centered_grid(32, 24.0);
    const auto uni = SoundSpeedMap::uniform(g, 1.5);
    CHECK(uni.homogeneous());
    CHECK(uni.reference() == 1.5);
    const auto degenerate = SoundSpeedMap::two_region(g, 1.5, 1.5, {0, 0}, 6.0);
    CHECK(degenerate.homogeneous());
    CHECK(degenerate.values == uni.values);
    const auto het = SoundSpeedMap::two_region(g, 1.5, 1.58, {0, 0}, 6.0);
    CHECK_FALSE(het.homogeneous());
    CHECK(het.reference() == 1.5);  // corner pixel is background
    CHECK_THROWS(SoundSpeedMap::uniform(g, 0.0));
    CHECK_THROWS(SoundSpeedMap(g, std::vector<double>(3, 1.5)));
  }
}
