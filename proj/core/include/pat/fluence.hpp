#pragma once

#include "pat/geometry.hpp"
#include "pat/image.hpp"
#include "pat/phantom.hpp"

namespace pat {

/// Diffusion-approximation fluence on the grid. Solves
///   -div(D grad Phi) + mu_a Phi = 0,   D = 1/(3 (mu_a + mu_s')),
/// with a five-point finite-volume discretization (harmonic face
/// diffusivity) and Robin boundaries Phi + 2 D dPhi/dn = 4 S, S = 1 on
/// illuminated sides and 0 elsewhere. The result is scaled to max 1.
/// The homogeneous illumination setting bypasses the solve and returns
/// unit fluence. Throws std::runtime_error when the direct solve leaves
/// a relative residual above 1e-10, with the residual in the message.
/// `residual_out` (optional) receives ||A Phi - b|| / ||b||.
Image fluence_solve(const Image& mu_a, const Image& mu_sp, const Illumination& illumination,
                    const Grid2D& grid, double* residual_out = nullptr);

}  // namespace pat
