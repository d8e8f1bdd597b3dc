#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace pat {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Regular square-pixel grid. `origin` is the physical coordinate (mm)
/// of the center of pixel (0,0); x grows with ix, y with iy.
struct Grid2D {
  int nx = 0;
  int ny = 0;
  double pixel_size = 0.0;           // mm
  std::array<double, 2> origin{0, 0};  // mm

  Grid2D() = default;
  Grid2D(int nx_, int ny_, double pixel_size_, std::array<double, 2> origin_);

  std::size_t npixels() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(ix);
  }
  double x(int ix) const { return origin[0] + pixel_size * ix; }
  double y(int iy) const { return origin[1] + pixel_size * iy; }
  std::array<double, 2> coord(int ix, int iy) const { return {x(ix), y(iy)}; }

  /// Nearest pixel indices for a physical point; not clamped to the grid.
  std::array<int, 2> nearest_pixel(double px, double py) const {
    return {static_cast<int>(std::lround((px - origin[0]) / pixel_size)),
            static_cast<int>(std::lround((py - origin[1]) / pixel_size))};
  }

  double extent_x() const { return nx * pixel_size; }
  double extent_y() const { return ny * pixel_size; }
  std::array<double, 2> center() const {
    return {origin[0] + 0.5 * pixel_size * (nx - 1), origin[1] + 0.5 * pixel_size * (ny - 1)};
  }
  /// Half-diagonal of the bounding box of pixel centers' outer edges.
  double half_diagonal() const { return 0.5 * std::hypot(extent_x(), extent_y()); }

  /// Bounding box spanned by pixel outer edges: [x0,x1] x [y0,y1].
  std::array<double, 4> bounding_box() const {
    return {origin[0] - 0.5 * pixel_size, origin[0] + pixel_size * (nx - 0.5),
            origin[1] - 0.5 * pixel_size, origin[1] + pixel_size * (ny - 0.5)};
  }
  bool contains(double px, double py) const {
    const auto b = bounding_box();
    return px >= b[0] && px <= b[1] && py >= b[2] && py <= b[3];
  }

  bool operator==(const Grid2D&) const = default;
};

/// Grid of nx = ny = n pixels covering [-extent/2, extent/2]^2.
Grid2D make_centered_grid(int n, double extent_mm);

/// Point detectors on a circular arc.
struct DetectorArray {
  std::vector<std::array<double, 2>> positions;  // mm
  std::array<double, 2> arc_center{0, 0};
  double radius = 0.0;
  double angular_span = 0.0;  // radians, in (0, 2*pi]

  int count() const { return static_cast<int>(positions.size()); }
  bool operator==(const DetectorArray&) const = default;
};

/// Detectors equally spaced on an arc centered on the grid. A full-circle
/// span divides 2*pi/count (no duplicated endpoint); a partial span places
/// detectors inclusively at both arc ends. Angles are counterclockwise
/// from the positive x-axis; span = pi with start 0 covers the upper
/// half-plane (the limited-view setting).
/// Throws if any detector would land inside the grid bounding box.
DetectorArray make_uniform_detectors(const Grid2D& grid, int count, double radius,
                                     double span, double start_angle);

/// Deterministic random subset of `count` detectors, positions preserved,
/// returned in parent order.
DetectorArray subsample_detectors(const DetectorArray& full, std::uint64_t seed, int count);

/// Default ring radius: 1.5x the grid half-diagonal.
double default_detector_radius(const Grid2D& grid);

struct TimeAxis {
  int n_t = 0;
  double dt = 0.0;  // microseconds
  double t0 = 0.0;

  TimeAxis() = default;
  TimeAxis(int n_t_, double dt_, double t0_);
  double t(int j) const { return t0 + dt * j; }
  bool operator==(const TimeAxis&) const = default;
};

/// t0 = 0, c*dt = one pixel of travel, n_t covering the farthest
/// pixel-detector distance plus 10%.
TimeAxis make_default_time_axis(const Grid2D& grid, const DetectorArray& det, double sound_speed);

/// Sound speed c(x) in mm/us on the grid. `reference()` is the coupling
/// speed outside the imaged region (by convention the corner value, which
/// our phantoms always assign to the background medium).
struct SoundSpeedMap {
  Grid2D grid;
  std::vector<double> values;

  SoundSpeedMap() = default;
  SoundSpeedMap(Grid2D g, std::vector<double> v);

  static SoundSpeedMap uniform(const Grid2D& g, double c);
  /// Disk of speed c_inner (centered at `center`, radius mm) in a c_bg medium.
  static SoundSpeedMap two_region(const Grid2D& g, double c_bg, double c_inner,
                                  std::array<double, 2> center, double disk_radius);

  bool homogeneous() const;  // all values equal
  double reference() const { return values[0]; }
};

}  // namespace pat
