#pragma once

#include <filesystem>

#include "pat/image.hpp"

namespace pat {

/// Sinogram container on disk: magic "PATS", u32 n_det, u32 n_t, f64 dt,
/// f64 t0, then n_det * n_t little-endian f32 samples in row (detector)
/// order.
void save_sinogram(const std::filesystem::path& path, const Sinogram& f);
Sinogram load_sinogram(const std::filesystem::path& path);

}  // namespace pat
