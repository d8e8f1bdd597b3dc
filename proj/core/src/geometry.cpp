#include "pat/geometry.hpp"

#include <stdexcept>
#include <string>

#include "pat/rng.hpp"

namespace pat {

Grid2D::Grid2D(int nx_, int ny_, double pixel_size_, std::array<double, 2> origin_)
    : nx(nx_), ny(ny_), pixel_size(pixel_size_), origin(origin_) {
  if (nx < 8 || ny < 8) throw std::invalid_argument("Grid2D: nx and ny must be >= 8");
  if (!(pixel_size > 0.0)) throw std::invalid_argument("Grid2D: pixel_size must be > 0");
}

Grid2D make_centered_grid(int n, double extent_mm) {
  const double h = extent_mm / n;
  const double o = -0.5 * extent_mm + 0.5 * h;
  return Grid2D(n, n, h, {o, o});
}

DetectorArray make_uniform_detectors(const Grid2D& grid, int count, double radius,
                                     double span, double start_angle) {
  if (count < 1) throw std::invalid_argument("make_uniform_detectors: count must be >= 1");
  if (!(span > 0.0) || span > kTwoPi + 1e-12)
    throw std::invalid_argument("make_uniform_detectors: span must be in (0, 2*pi]");

  const bool full_circle = std::abs(span - kTwoPi) < 1e-12;
  const double step = full_circle ? span / count : (count > 1 ? span / (count - 1) : 0.0);

  DetectorArray det;
  det.arc_center = grid.center();
  det.radius = radius;
  det.angular_span = span;
  det.positions.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double a = start_angle + step * i;
    const double px = det.arc_center[0] + radius * std::cos(a);
    const double py = det.arc_center[1] + radius * std::sin(a);
    if (grid.contains(px, py))
      throw std::invalid_argument("make_uniform_detectors: detector " + std::to_string(i) +
                                  " lies inside the grid bounding box (radius too small)");
    det.positions.push_back({px, py});
  }
  return det;
}

DetectorArray subsample_detectors(const DetectorArray& full, std::uint64_t seed, int count) {
  if (count > full.count())
    throw std::invalid_argument("subsample_detectors: count exceeds parent array size");
  Rng rng(mix_seed(seed, 0x5b5e1ec7ULL));
  const auto keep = rng.sample_without_replacement(full.count(), count);
  DetectorArray det;
  det.arc_center = full.arc_center;
  det.radius = full.radius;
  det.angular_span = full.angular_span;
  det.positions.reserve(static_cast<std::size_t>(count));
  for (int i : keep) det.positions.push_back(full.positions[static_cast<std::size_t>(i)]);
  return det;
}

double default_detector_radius(const Grid2D& grid) { return 1.5 * grid.half_diagonal(); }

TimeAxis::TimeAxis(int n_t_, double dt_, double t0_) : n_t(n_t_), dt(dt_), t0(t0_) {
  if (n_t < 2) throw std::invalid_argument("TimeAxis: n_t must be >= 2");
  if (!(dt > 0.0)) throw std::invalid_argument("TimeAxis: dt must be > 0");
  if (t0 < 0.0) throw std::invalid_argument("TimeAxis: t0 must be >= 0");
}

TimeAxis make_default_time_axis(const Grid2D& grid, const DetectorArray& det, double sound_speed) {
  const double dt = grid.pixel_size / sound_speed;
  double max_dist = 0.0;
  // Farthest pixel-center/detector pair; corners dominate but detector
  // arcs may be partial, so scan all pairs of (detector, grid corner).
  const std::array<std::array<double, 2>, 4> corners = {{{grid.x(0), grid.y(0)},
                                                         {grid.x(grid.nx - 1), grid.y(0)},
                                                         {grid.x(0), grid.y(grid.ny - 1)},
                                                         {grid.x(grid.nx - 1), grid.y(grid.ny - 1)}}};
  for (const auto& p : det.positions)
    for (const auto& c : corners)
      max_dist = std::max(max_dist, std::hypot(p[0] - c[0], p[1] - c[1]));
  const int n_t = static_cast<int>(std::ceil(1.1 * max_dist / (sound_speed * dt))) + 1;
  return TimeAxis(std::max(n_t, 2), dt, 0.0);
}

SoundSpeedMap::SoundSpeedMap(Grid2D g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.npixels())
    throw std::invalid_argument("SoundSpeedMap: value count does not match grid");
  for (double c : values)
    if (!(c > 0.0)) throw std::invalid_argument("SoundSpeedMap: sound speed must be > 0");
}

SoundSpeedMap SoundSpeedMap::uniform(const Grid2D& g, double c) {
  return SoundSpeedMap(g, std::vector<double>(g.npixels(), c));
}

SoundSpeedMap SoundSpeedMap::two_region(const Grid2D& g, double c_bg, double c_inner,
                                        std::array<double, 2> center, double disk_radius) {
  std::vector<double> v(g.npixels(), c_bg);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const double dx = g.x(ix) - center[0];
      const double dy = g.y(iy) - center[1];
      if (dx * dx + dy * dy <= disk_radius * disk_radius) v[g.index(ix, iy)] = c_inner;
    }
  return SoundSpeedMap(g, std::move(v));
}

bool SoundSpeedMap::homogeneous() const {
  for (double c : values)
    if (c != values[0]) return false;
  return true;
}

}  // namespace pat
