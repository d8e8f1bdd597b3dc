#pragma once

#include <vector>

#include "pat/eikonal.hpp"
#include "pat/geometry.hpp"
#include "pat/image.hpp"
#include "pat/sparse.hpp"

namespace pat {

/// Discrete circular-mean forward operator. Row (d, j) integrates the image
/// over the first-arrival isochrone of detector d at time t_j; the transpose
/// is stored explicitly so the adjoint is exact to the matrix, not to the
/// continuous operator.
struct AcousticOperator {
  Grid2D grid;
  DetectorArray detectors;
  TimeAxis time;
  double c_ref = 0;
  SparseMatrix k;
  SparseMatrix kt;
  double norm_estimate = 0;

  Sinogram apply(const Image& u) const;
  Image apply_adjoint(const Sinogram& f) const;
};

/// Builds the operator from a travel-time table. Each pixel contributes its
/// area-weighted mass to the two time bins bracketing its arrival time,
/// split linearly, scaled by pixel_area / (c_ref * dt). An empty matrix
/// means the time axis misses the grid entirely and is rejected.
AcousticOperator assemble(const Grid2D& grid, const DetectorArray& detectors,
                          const TimeAxis& time, const TofTable& tof);

/// Operator restricted to a subset of detectors (row blocks of n_t rows),
/// with the norm re-estimated for the smaller system.
AcousticOperator select_detectors(const AcousticOperator& op, const std::vector<int>& indices);

}  // namespace pat
