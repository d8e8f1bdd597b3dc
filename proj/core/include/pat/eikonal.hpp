#pragma once

#include <cstddef>
#include <vector>

#include "pat/geometry.hpp"

namespace pat {

/// First-arrival travel times from each detector to every grid pixel.
/// Units follow the geometry convention (mm, mm/us, us).
struct TofTable {
  std::size_t n_det = 0;
  Grid2D grid;
  double c_ref = 0;  // coupling speed, the normalization speed downstream
  std::vector<double> t;  // [d * grid.size() + pixel]

  double at(std::size_t d, std::size_t pixel) const { return t[d * grid.npixels() + pixel]; }
};

/// Straight-ray travel times |x_d - x_p| / c for a uniform speed c.
TofTable analytic_tof(const Grid2D& grid, const DetectorArray& detectors, double c);

/// Solves |grad T| = 1/c(x) with T = 0 at each detector by first-order
/// upwind fast marching on a lattice extended to cover the detector ring.
/// Outside the reconstruction grid the speed is the coupling value
/// speed.reference(). A map whose values are all identical takes the
/// straight-ray path, so a degenerate heterogeneous configuration is
/// bit-identical to the uniform one.
TofTable eikonal_tof(const SoundSpeedMap& speed, const DetectorArray& detectors,
                     const Grid2D& grid);

}  // namespace pat
