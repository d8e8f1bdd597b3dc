#include "pat/fft.hpp"

#include <unsupported/Eigen/FFT>

namespace pat {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<std::complex<double>> fft_forward(const std::vector<std::complex<double>>& x) {
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> out;
  fft.fwd(out, x);
  return out;
}

std::vector<std::complex<double>> fft_inverse(const std::vector<std::complex<double>>& x) {
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> out;
  fft.inv(out, x);
  return out;
}

}  // namespace pat
