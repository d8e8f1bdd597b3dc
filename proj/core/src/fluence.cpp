#include "pat/fluence.hpp"

#include <Eigen/Sparse>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace pat {

Image fluence_solve(const Image& mu_a, const Image& mu_sp, const Illumination& illumination,
                    const Grid2D& grid, double* residual_out) {
  if (mu_a.nx != grid.nx || mu_a.ny != grid.ny || !mu_a.same_shape(mu_sp))
    throw std::invalid_argument("fluence_solve: coefficient shapes must match the grid");
  for (std::size_t i = 0; i < mu_a.size(); ++i)
    if (!(mu_a.v[i] > 0.0) || !(mu_sp.v[i] > 0.0))
      throw std::invalid_argument("fluence_solve: coefficients must be positive");

  if (illumination.homogeneous) {
    if (residual_out) *residual_out = 0.0;
    return Image(grid.nx, grid.ny, 1.0);
  }
  if (illumination.side_count() == 0)
    throw std::invalid_argument("fluence_solve: no illuminated side");

  const int nx = grid.nx, ny = grid.ny;
  const double h = grid.pixel_size;
  const auto n = static_cast<Eigen::Index>(grid.npixels());

  Image diffusion(nx, ny);
  for (std::size_t i = 0; i < diffusion.size(); ++i)
    diffusion.v[i] = 1.0 / (3.0 * (mu_a.v[i] + mu_sp.v[i]));

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(5 * grid.npixels());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);

  auto idx = [nx](int ix, int iy) {
    return static_cast<Eigen::Index>(iy) * nx + ix;
  };

  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const Eigen::Index row = idx(ix, iy);
      const double d_here = diffusion.at(ix, iy);
      double diag = mu_a.at(ix, iy) * h * h;

      // interior faces, harmonic diffusivity
      const int neighbors[4][2] = {{ix - 1, iy}, {ix + 1, iy}, {ix, iy - 1}, {ix, iy + 1}};
      for (const auto& nb : neighbors) {
        const int qx = nb[0], qy = nb[1];
        if (qx < 0 || qy < 0 || qx >= nx || qy >= ny) continue;
        const double d_there = diffusion.at(qx, qy);
        const double face = 2.0 * d_here * d_there / (d_here + d_there);
        diag += face;
        entries.emplace_back(row, idx(qx, qy), -face);
      }

      // Robin faces: outward flux density (Phi - 4 S) / (2 (1 + h/(4 D)))
      const bool at[4] = {ix == 0, ix == nx - 1, iy == 0, iy == ny - 1};
      const bool lit[4] = {illumination.left, illumination.right, illumination.top,
                           illumination.bottom};
      for (int side = 0; side < 4; ++side) {
        if (!at[side]) continue;
        const double gamma = 1.0 / (2.0 * (1.0 + h / (4.0 * d_here)));
        diag += gamma * h;
        if (lit[side]) rhs[row] += 4.0 * gamma * h;
      }

      entries.emplace_back(row, row, diag);
    }

  Eigen::SparseMatrix<double> system(n, n);
  system.setFromTriplets(entries.begin(), entries.end());

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  solver.compute(system);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("fluence_solve: factorization failed");
  const Eigen::VectorXd phi = solver.solve(rhs);

  const double residual = (system * phi - rhs).norm() / rhs.norm();
  if (residual_out) *residual_out = residual;
  if (!(residual <= 1e-10))
    throw std::runtime_error("fluence_solve: residual " + std::to_string(residual) +
                             " above 1e-10");

  Image out(nx, ny);
  double peak = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) peak = std::max(peak, phi[i]);
  if (!(peak > 0.0)) throw std::runtime_error("fluence_solve: nonpositive field");
  for (Eigen::Index i = 0; i < n; ++i) out.v[static_cast<std::size_t>(i)] = phi[i] / peak;
  return out;
}

}  // namespace pat
