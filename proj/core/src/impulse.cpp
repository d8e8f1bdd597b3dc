#include "pat/impulse.hpp"

#include <cmath>
#include <stdexcept>

#include "pat/fft.hpp"
#include "pat/rng.hpp"

namespace pat {

ImpulseKernel delta_kernel() { return {{1.0}, 0}; }

ImpulseKernel gaussian_kernel(double sigma_samples, double delay_samples, double gain) {
  if (sigma_samples <= 0.0) throw std::invalid_argument("gaussian_kernel: sigma must be positive");
  const int half = std::max(2, static_cast<int>(std::ceil(4.0 * sigma_samples + std::abs(delay_samples))));
  ImpulseKernel k;
  k.center_index = half;
  k.taps.resize(2 * half + 1);
  double sum = 0.0;
  for (int i = -half; i <= half; ++i) {
    const double z = (i - delay_samples) / sigma_samples;
    k.taps[i + half] = std::exp(-0.5 * z * z);
    sum += k.taps[i + half];
  }
  for (double& v : k.taps) v *= gain / sum;
  return k;
}

Sinogram convolve_impulse(const Sinogram& f, const ImpulseKernel& kernel) {
  if (kernel.taps.empty()) throw std::invalid_argument("convolve_impulse: empty kernel");
  Sinogram out = f;
  const long n = static_cast<long>(f.n_t);
  const long m = static_cast<long>(kernel.taps.size());
  for (int d = 0; d < f.n_det; ++d) {
    const double* src = f.row(d);
    double* dst = out.row(d);
    for (long j = 0; j < n; ++j) {
      double acc = 0.0;
      for (long t = 0; t < m; ++t) {
        const long src_j = j - (t - kernel.center_index);
        if (src_j >= 0 && src_j < n) acc += kernel.taps[t] * src[src_j];
      }
      dst[j] = acc;
    }
  }
  return out;
}

Sinogram deconvolve_impulse(const Sinogram& f, const ImpulseKernel& kernel, double reg) {
  if (reg <= 0.0) throw std::invalid_argument("deconvolve_impulse: reg must be positive");
  if (kernel.taps.empty()) throw std::invalid_argument("deconvolve_impulse: empty kernel");
  const std::size_t n = static_cast<std::size_t>(f.n_t);
  const std::size_t nfft = next_pow2(n + kernel.taps.size());

  // Kernel spectrum with the center tap at lag zero.
  std::vector<std::complex<double>> h(nfft, 0.0);
  for (std::size_t t = 0; t < kernel.taps.size(); ++t) {
    const long lag = static_cast<long>(t) - kernel.center_index;
    const std::size_t idx = static_cast<std::size_t>((lag % static_cast<long>(nfft) + nfft) % nfft);
    h[idx] += kernel.taps[t];
  }
  std::vector<std::complex<double>> hf = fft_forward(h);
  double p_max = 0.0;
  for (const auto& v : hf) p_max = std::max(p_max, std::norm(v));
  if (p_max == 0.0) throw std::invalid_argument("deconvolve_impulse: kernel has no energy");
  std::vector<std::complex<double>> wiener(nfft);
  for (std::size_t i = 0; i < nfft; ++i)
    wiener[i] = std::conj(hf[i]) * (1.0 + reg) / (std::norm(hf[i]) + reg * p_max);

  Sinogram out = f;
  std::vector<std::complex<double>> buf(nfft);
  for (int d = 0; d < f.n_det; ++d) {
    std::fill(buf.begin(), buf.end(), std::complex<double>(0.0));
    const double* src = f.row(d);
    for (std::size_t j = 0; j < n; ++j) buf[j] = src[j];
    std::vector<std::complex<double>> spec = fft_forward(buf);
    for (std::size_t i = 0; i < nfft; ++i) spec[i] *= wiener[i];
    std::vector<std::complex<double>> rec = fft_inverse(spec);
    double* dst = out.row(d);
    for (std::size_t j = 0; j < n; ++j) dst[j] = rec[j].real();
  }
  return out;
}

Sinogram add_noise(const Sinogram& f, double level, std::uint64_t seed) {
  if (level < 0.0) throw std::invalid_argument("add_noise: level must be non-negative");
  if (level == 0.0) return f;
  double peak = 0.0;
  for (double v : f.v) peak = std::max(peak, std::abs(v));
  const double sigma = level * peak;
  Sinogram out = f;
  Rng rng(mix_seed(seed, 0xad015e11ULL));
  for (double& v : out.v) v += sigma * rng.normal();
  return out;
}

}  // namespace pat
