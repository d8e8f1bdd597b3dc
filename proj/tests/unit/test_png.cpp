#include <filesystem>

#include "doctest.h"
#include "pat/png_io.hpp"

namespace fs = std::filesystem;
using namespace pat;

TEST_SUITE("png") {
  TEST_CASE("write and read back an 8-bit ramp") {
    const fs::path p = fs::temp_directory_path() / "patlab_png_test" / "ramp.png";
    fs::remove_all(p.parent_path());
    const std::size_t nx = 32, ny = 16;
    std::vector<double> img(nx * ny);
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t x = 0; x < nx; ++x) img[y * nx + x] = static_cast<double>(x) / (nx - 1);
    write_png_gray(p, nx, ny, img, 0.0, 1.0);
    REQUIRE(fs::exists(p));

    std::size_t rx = 0, ry = 0;
    const auto back = read_png_gray(p, rx, ry);
    REQUIRE(rx == nx);
    REQUIRE(ry == ny);
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t x = 0; x < nx; ++x) {
        const int expect = static_cast<int>(img[y * nx + x] * 255.0 + 0.5);
        CHECK(std::abs(static_cast<int>(back[y * nx + x]) - expect) <= 1);
      }
    fs::remove_all(p.parent_path());
  }

  TEST_CASE("values clamp to the display range") {
    const fs::path p = fs::temp_directory_path() / "patlab_png_test2" / "clamp.png";
    fs::remove_all(p.parent_path());
    const std::vector<double> img = {-5.0, 0.0, 0.5, 1.0, 99.0, 0.25, 0.75, 1.5,
                                     -1.0, 0.1, 0.2, 0.3, 0.4,  0.6,  0.7, 0.8};
    write_png_gray(p, 4, 4, img, 0.0, 1.0);
    std::size_t rx = 0, ry = 0;
    const auto back = read_png_gray(p, rx, ry);
    CHECK(back[0] == 0);    // below range
    CHECK(back[4] == 255);  // above range
    fs::remove_all(p.parent_path());
  }

  TEST_CASE("size mismatch is rejected") {
    CHECK_THROWS(write_png_gray("/tmp/never.png", 4, 4, std::vector<double>(3), 0.0, 1.0));
    CHECK_THROWS(write_png_gray("/tmp/never.png", 4, 4, std::vector<double>(16), 1.0, 1.0));
  }
}
