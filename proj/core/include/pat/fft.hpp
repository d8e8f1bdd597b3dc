#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace pat {

std::size_t next_pow2(std::size_t n);

/// Unscaled forward DFT.
[[nodiscard]] std::vector<std::complex<double>> fft_forward(
    const std::vector<std::complex<double>>& x);

/// Inverse DFT scaled by 1/n, so inverse(forward(x)) == x.
[[nodiscard]] std::vector<std::complex<double>> fft_inverse(
    const std::vector<std::complex<double>>& x);

}  // namespace pat
