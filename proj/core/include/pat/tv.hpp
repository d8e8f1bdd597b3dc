#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "pat/acoustic.hpp"
#include "pat/image.hpp"

namespace pat {

/// Two difference planes (d/dx, d/dy) with image shape.
struct StackedField {
  std::size_t nx = 0, ny = 0;
  std::vector<double> dx, dy;

  static StackedField zeros(std::size_t nx, std::size_t ny) {
    return {nx, ny, std::vector<double>(nx * ny, 0.0), std::vector<double>(nx * ny, 0.0)};
  }
};

/// Forward differences with replicate boundary (last row/column derivative
/// is zero), scaled by 1/pixel_size.
StackedField gradient(const Image& u, double pixel_size);

/// Exact negative adjoint of gradient: <grad u, p> == -<u, div p>.
Image divergence(const StackedField& p, double pixel_size);

/// Conjugate prox of the data term q -> (q - sigma f) / (1 + sigma).
Sinogram prox_l2_conjugate(const Sinogram& q, const Sinogram& f, double sigma);

/// Dual projection of the TV term. Anisotropic: per-element clamp to
/// [-alpha, alpha]. Isotropic: per-pixel (dx, dy) scaled back to the
/// alpha-ball.
StackedField prox_l1_conjugate(StackedField p, double alpha, bool isotropic = false);

/// Norm of the stacked operator [K; grad] by power iteration.
double stacked_operator_norm(const AcousticOperator& op, int iterations = 50);

double tv_energy(const AcousticOperator& op, const Image& u, const Sinogram& f, double alpha,
                 bool isotropic = false);

struct TvProblem {
  const AcousticOperator* op = nullptr;
  Sinogram data;
  double alpha = 0;
  double theta = 1;
  double sigma = 0;
  double tau = 0;
  int max_iters = 1000;
  bool isotropic = false;
  double operator_norm = 0;
  int trace_every = 1;  // 0 disables the energy column
};

/// Fills steps sigma = tau = 0.99 / L with L from power iteration.
TvProblem make_tv_problem(const AcousticOperator& op, const Sinogram& f, double alpha,
                          int max_iters = 1000, bool isotropic = false);

struct SolverTrace {
  std::vector<double> energy;
  std::vector<double> primal_residual;
  std::vector<double> dual_residual;
  std::vector<double> seconds;

  /// CSV columns: iteration, energy, primal_residual, dual_residual, seconds.
  /// Carries wall time, so it is a diagnostic artifact, not part of the
  /// reproducible pipeline outputs.
  void save_csv(const std::filesystem::path& path) const;
};

/// Primal-dual iteration with the extrapolation applied inside the dual
/// update, identity primal prox. Aborts on non-finite iterates.
std::pair<Image, SolverTrace> pdhg_solve(const TvProblem& problem);

/// Contrast scalar minimizing ||s u - gt||: <u, gt> / <u, u>.
double optimal_scale(const Image& u, const Image& gt);

/// Sweeps alpha candidates, rescales each solution by the optimal contrast
/// scalar, and returns the PSNR-best reconstruction. Without a ground truth
/// the first alpha is solved unscaled.
Image tv_reconstruct(const AcousticOperator& op, const Sinogram& f,
                     const std::vector<double>& alphas, const Image* ground_truth = nullptr,
                     int max_iters = 1000);

}  // namespace pat
