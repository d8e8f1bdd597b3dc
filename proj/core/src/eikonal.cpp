#include "pat/eikonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace pat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Upwind solution of the discretized |grad T| = s/h at one node, falling
/// back to the one-sided update when the causality gap is too wide.
double upwind_solve(double a, double b, double s) {
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  if (hi == kInf || hi - lo >= s) return lo + s;
  return 0.5 * (lo + hi + std::sqrt(2.0 * s * s - (hi - lo) * (hi - lo)));
}

double point_to_rect_distance(double x, double y, double x0, double x1, double y0, double y1) {
  const double dx = std::max({x0 - x, 0.0, x - x1});
  const double dy = std::max({y0 - y, 0.0, y - y1});
  return std::hypot(dx, dy);
}

}  // namespace

TofTable analytic_tof(const Grid2D& grid, const DetectorArray& detectors, double c) {
  if (c <= 0.0) throw std::invalid_argument("analytic_tof: speed must be positive");
  TofTable table;
  table.n_det = detectors.positions.size();
  table.grid = grid;
  table.c_ref = c;
  table.t.resize(table.n_det * grid.npixels());
  for (std::size_t d = 0; d < table.n_det; ++d) {
    const auto& pos = detectors.positions[d];
    double* row = table.t.data() + d * grid.npixels();
    for (int iy = 0; iy < grid.ny; ++iy)
      for (int ix = 0; ix < grid.nx; ++ix)
        row[grid.index(ix, iy)] = std::hypot(grid.x(ix) - pos[0], grid.y(iy) - pos[1]) / c;
  }
  return table;
}

TofTable eikonal_tof(const SoundSpeedMap& speed, const DetectorArray& detectors,
                     const Grid2D& grid) {
  if (!(speed.grid == grid)) throw std::invalid_argument("eikonal_tof: speed map grid mismatch");
  if (speed.homogeneous()) return analytic_tof(grid, detectors, speed.values[0]);

  const double h = grid.pixel_size;
  const double coupling = speed.reference();

  // Lattice aligned with the grid, padded to cover every detector.
  double min_x = grid.x(0), max_x = grid.x(grid.nx - 1);
  double min_y = grid.y(0), max_y = grid.y(grid.ny - 1);
  for (const auto& p : detectors.positions) {
    min_x = std::min(min_x, p[0]);
    max_x = std::max(max_x, p[0]);
    min_y = std::min(min_y, p[1]);
    max_y = std::max(max_y, p[1]);
  }
  const int pad = 3;
  const int off_x = static_cast<int>(std::ceil((grid.x(0) - min_x) / h)) + pad;
  const int off_y = static_cast<int>(std::ceil((grid.y(0) - min_y) / h)) + pad;
  const int ext_nx =
      off_x + grid.nx + static_cast<int>(std::ceil((max_x - grid.x(grid.nx - 1)) / h)) + pad;
  const int ext_ny =
      off_y + grid.ny + static_cast<int>(std::ceil((max_y - grid.y(grid.ny - 1)) / h)) + pad;
  const double ox = grid.x(0) - off_x * h;
  const double oy = grid.y(0) - off_y * h;
  const std::size_t n_ext = static_cast<std::size_t>(ext_nx) * static_cast<std::size_t>(ext_ny);

  std::vector<double> slowness_step(n_ext, h / coupling);
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix)
      slowness_step[static_cast<std::size_t>(iy + off_y) * ext_nx + (ix + off_x)] =
          h / speed.values[grid.index(ix, iy)];

  const auto bbox = grid.bounding_box();

  TofTable table;
  table.n_det = detectors.positions.size();
  table.grid = grid;
  table.c_ref = coupling;
  table.t.resize(table.n_det * grid.npixels());

  std::vector<double> t(n_ext);
  std::vector<char> frozen(n_ext);
  using Entry = std::pair<double, int>;
  for (std::size_t d = 0; d < table.n_det; ++d) {
    const auto& src = detectors.positions[d];
    std::fill(t.begin(), t.end(), kInf);
    std::fill(frozen.begin(), frozen.end(), 0);
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;

    // Seed a disk around the source with the straight-ray solution. The
    // disk stays inside the uniform coupling region, so the first-order
    // error does not pick up the point-source singularity.
    const double d_bbox =
        point_to_rect_distance(src[0], src[1], bbox[0], bbox[1], bbox[2], bbox[3]);
    const double r0 = std::max(2.0 * h, std::min(6.0 * h, 0.5 * d_bbox));
    const int ci = static_cast<int>(std::lround((src[0] - ox) / h));
    const int cj = static_cast<int>(std::lround((src[1] - oy) / h));
    const int reach = static_cast<int>(std::ceil(r0 / h)) + 1;
    for (int j = std::max(0, cj - reach); j <= std::min(ext_ny - 1, cj + reach); ++j) {
      for (int i = std::max(0, ci - reach); i <= std::min(ext_nx - 1, ci + reach); ++i) {
        const double dist = std::hypot(ox + i * h - src[0], oy + j * h - src[1]);
        if (dist > r0) continue;
        const int idx = j * ext_nx + i;
        t[idx] = dist / coupling;
        heap.emplace(t[idx], idx);
      }
    }
    if (heap.empty()) throw std::logic_error("eikonal_tof: detector outside lattice");

    while (!heap.empty()) {
      const auto [time, idx] = heap.top();
      heap.pop();
      if (frozen[idx]) continue;
      frozen[idx] = 1;
      const int i = idx % ext_nx;
      const int j = idx / ext_nx;
      const int di[4] = {-1, 1, 0, 0};
      const int dj[4] = {0, 0, -1, 1};
      for (int k = 0; k < 4; ++k) {
        const int ni = i + di[k];
        const int nj = j + dj[k];
        if (ni < 0 || ni >= ext_nx || nj < 0 || nj >= ext_ny) continue;
        const int nidx = nj * ext_nx + ni;
        if (frozen[nidx]) continue;
        const double a =
            std::min(ni > 0 && frozen[nidx - 1] ? t[nidx - 1] : kInf,
                     ni + 1 < ext_nx && frozen[nidx + 1] ? t[nidx + 1] : kInf);
        const double b =
            std::min(nj > 0 && frozen[nidx - ext_nx] ? t[nidx - ext_nx] : kInf,
                     nj + 1 < ext_ny && frozen[nidx + ext_nx] ? t[nidx + ext_nx] : kInf);
        const double cand = upwind_solve(a, b, slowness_step[nidx]);
        if (cand < t[nidx]) {
          t[nidx] = cand;
          heap.emplace(cand, nidx);
        }
      }
    }

    double* row = table.t.data() + d * grid.npixels();
    for (int iy = 0; iy < grid.ny; ++iy)
      for (int ix = 0; ix < grid.nx; ++ix)
        row[grid.index(ix, iy)] =
            t[static_cast<std::size_t>(iy + off_y) * ext_nx + (ix + off_x)];
    for (std::size_t p = 0; p < grid.npixels(); ++p)
      if (!std::isfinite(row[p])) throw std::logic_error("eikonal_tof: unreachable pixel");
  }
  return table;
}

}  // namespace pat
