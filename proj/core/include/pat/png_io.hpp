#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace pat {

/// 8-bit grayscale PNG with values mapped linearly from [lo, hi] to 0..255
/// and clamped. Row 0 renders at the top.
void write_png_gray(const std::filesystem::path& path, std::size_t nx, std::size_t ny,
                    const std::vector<double>& values, double lo, double hi);

std::vector<std::uint8_t> read_png_gray(const std::filesystem::path& path, std::size_t& nx,
                                        std::size_t& ny);

}  // namespace pat
