#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "pat/fluence.hpp"
#include "pat/geometry.hpp"
#include "pat/phantom.hpp"
#include "pat/rng.hpp"

using namespace pat;

namespace {

Illumination sides(bool l, bool r, bool t, bool b) {
  Illumination il;
  il.homogeneous = false;
  il.left = l;
  il.right = r;
  il.top = t;
  il.bottom = b;
  return il;
}

}  // namespace

TEST_SUITE("fluence") {
  TEST_CASE("homogeneous illumination bypasses the solve") {
    const Grid2D grid = make_centered_grid(32, 24.0);
    Image a(32, 32, 0.1), s(32, 32, 1.0);
    double resid = -1;
    const Image phi = fluence_solve(a, s, Illumination{}, grid, &resid);
    for (double v : phi.v) CHECK(v == 1.0);
    CHECK(resid == 0.0);
  }

  TEST_CASE("uniform slab with left illumination decays at the diffusion length") {
    const int n = 64;
    const Grid2D grid = make_centered_grid(n, 24.0);
    const double mu_a = 0.1, mu_sp = 2.0;
    Image a(n, n, mu_a), s(n, n, mu_sp);
    double resid = -1;
    const Image phi = fluence_solve(a, s, sides(true, false, false, false), grid, &resid);
    CHECK(resid <= 1e-10);

    const int row = n / 2;
    CHECK(phi.at(0, row) == doctest::Approx(1.0).epsilon(1e-9));  // peak at the lit side
    for (int i = 0; i + 1 < n; ++i) CHECK(phi.at(i + 1, row) < phi.at(i, row));

    // Least-squares slope of log(phi) across the interior must match the
    // analytic decay rate 1/sqrt(D/mu_a) of the one-dimensional problem.
    const double D = 1.0 / (3.0 * (mu_a + mu_sp));
    const double L = std::sqrt(D / mu_a);
    const int i0 = 8, i1 = 44;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (int i = i0; i <= i1; ++i) {
      const double x = grid.pixel_size * i;
      const double y = std::log(phi.at(i, row));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++m;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    CHECK(std::abs(slope + 1.0 / L) * L <= 0.10);

    // Straight in log space: local slopes may not wander from the fit.
    for (int i = i0; i < i1; ++i) {
      const double local =
          (std::log(phi.at(i + 1, row)) - std::log(phi.at(i, row))) / grid.pixel_size;
      CHECK(std::abs(local - slope) / std::abs(slope) <= 0.05);
    }
  }

  TEST_CASE("solutions inherit the symmetry of the illumination") {
    const int n = 48;
    const Grid2D grid = make_centered_grid(n, 24.0);
    Image a(n, n, 0.05), s(n, n, 1.2);

    const Image lr = fluence_solve(a, s, sides(true, true, false, false), grid);
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix)
        CHECK(lr.at(ix, iy) == doctest::Approx(lr.at(n - 1 - ix, iy)).epsilon(1e-12));

    const Image left = fluence_solve(a, s, sides(true, false, false, false), grid);
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix)
        CHECK(left.at(ix, iy) == doctest::Approx(left.at(ix, n - 1 - iy)).epsilon(1e-12));

    const Image four = fluence_solve(a, s, sides(true, true, true, true), grid);
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        CHECK(four.at(ix, iy) == doctest::Approx(four.at(iy, ix)).epsilon(1e-12));
        CHECK(four.at(ix, iy) == doctest::Approx(four.at(n - 1 - ix, iy)).epsilon(1e-12));
      }
  }

  TEST_CASE("heterogeneous media keep positivity and unit peak") {
    const int n = 48;
    const Grid2D grid = make_centered_grid(n, 24.0);
    Image a(n, n), s(n, n);
    Rng rng(7);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a.v[i] = 0.004 + 0.4 * rng.uniform();
      s.v[i] = 0.5 + 1.5 * rng.uniform();
    }
    double resid = -1;
    const Image phi = fluence_solve(a, s, sides(false, false, true, false), grid, &resid);
    CHECK(resid <= 1e-10);
    double mn = 1e300, mx = -1e300;
    for (double v : phi.v) {
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    CHECK(mn > 0.0);
    CHECK(mx == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("stronger absorption steepens the decay") {
    const int n = 48;
    const Grid2D grid = make_centered_grid(n, 24.0);
    Image weak(n, n, 0.05), strong(n, n, 0.3), s(n, n, 1.0);
    const Illumination il = sides(true, false, false, false);
    const Image pw = fluence_solve(weak, s, il, grid);
    const Image ps = fluence_solve(strong, s, il, grid);
    const int row = n / 2;
    CHECK(ps.at(n - 4, row) < pw.at(n - 4, row));
    CHECK(ps.at(n / 2, row) < pw.at(n / 2, row));
  }

  TEST_CASE("invalid inputs are rejected") {
    const Grid2D grid = make_centered_grid(16, 24.0);
    Image a(16, 16, 0.1), s(16, 16, 1.0);
    Image wrong(8, 16, 1.0);
    const Illumination il = sides(true, false, false, false);
    CHECK_THROWS_AS(fluence_solve(a, wrong, il, grid), std::invalid_argument);
    Image bad = a;
    bad.at(3, 3) = 0.0;
    CHECK_THROWS_AS(fluence_solve(bad, s, il, grid), std::invalid_argument);
    Image neg = s;
    neg.at(2, 2) = -0.5;
    CHECK_THROWS_AS(fluence_solve(a, neg, il, grid), std::invalid_argument);
  }
}
