#include "pat/acoustic.hpp"

#include <cmath>
#include <stdexcept>

namespace pat {

Sinogram AcousticOperator::apply(const Image& u) const {
  if (u.nx != grid.nx || u.ny != grid.ny)
    throw std::invalid_argument("acoustic apply: image does not match grid");
  Sinogram f(detectors.count(), time.n_t, time.dt, time.t0);
  k.multiply(u.v, f.v);
  return f;
}

Image AcousticOperator::apply_adjoint(const Sinogram& f) const {
  if (f.n_det != detectors.count() || f.n_t != time.n_t)
    throw std::invalid_argument("acoustic adjoint: sinogram does not match operator");
  Image u(grid.nx, grid.ny);
  kt.multiply(f.v, u.v);
  return u;
}

AcousticOperator assemble(const Grid2D& grid, const DetectorArray& detectors,
                          const TimeAxis& time, const TofTable& tof) {
  if (!(tof.grid == grid) || tof.n_det != detectors.positions.size())
    throw std::invalid_argument("assemble: travel-time table does not match geometry");
  if (tof.c_ref <= 0.0) throw std::invalid_argument("assemble: missing reference speed");

  const double scale = grid.pixel_size * grid.pixel_size / (tof.c_ref * time.dt);
  const std::size_t n_pix = grid.npixels();
  std::vector<SparseMatrix::Triplet> triplets;
  triplets.reserve(tof.n_det * n_pix * 2);
  for (std::size_t d = 0; d < tof.n_det; ++d) {
    const double* row = tof.t.data() + d * n_pix;
    for (std::size_t p = 0; p < n_pix; ++p) {
      const double beta = (row[p] - time.t0) / time.dt;
      const double j0f = std::floor(beta);
      const long j0 = static_cast<long>(j0f);
      const double w1 = beta - j0f;
      const auto emit = [&](long j, double w) {
        if (j < 0 || j >= static_cast<long>(time.n_t) || w == 0.0) return;
        triplets.push_back({static_cast<std::uint32_t>(d * time.n_t + j),
                            static_cast<std::uint32_t>(p), w * scale});
      };
      emit(j0, 1.0 - w1);
      emit(j0 + 1, w1);
    }
  }

  AcousticOperator op;
  op.grid = grid;
  op.detectors = detectors;
  op.time = time;
  op.c_ref = tof.c_ref;
  op.k = SparseMatrix::from_triplets(tof.n_det * static_cast<std::size_t>(time.n_t), n_pix,
                                     std::move(triplets));
  if (op.k.nnz() == 0)
    throw std::runtime_error("assemble: time axis covers no pixel arrivals, check n_t/dt/t0");
  op.kt = op.k.transposed();
  op.norm_estimate = power_iteration_norm(op.k, op.kt, 50);
  return op;
}

AcousticOperator select_detectors(const AcousticOperator& op, const std::vector<int>& indices) {
  AcousticOperator out;
  out.grid = op.grid;
  out.detectors.positions.reserve(indices.size());
  for (int i : indices) {
    if (i < 0 || i >= op.detectors.count())
      throw std::out_of_range("select_detectors: index out of range");
    out.detectors.positions.push_back(op.detectors.positions[i]);
  }
  out.detectors.arc_center = op.detectors.arc_center;
  out.detectors.radius = op.detectors.radius;
  out.detectors.angular_span = op.detectors.angular_span;
  out.time = op.time;
  out.c_ref = op.c_ref;
  out.k = op.k.select_row_blocks(static_cast<std::size_t>(op.time.n_t), indices);
  out.kt = out.k.transposed();
  out.norm_estimate = power_iteration_norm(out.k, out.kt, 50);
  return out;
}

}  // namespace pat
