#include "pat/sino_io.hpp"

#include <stdexcept>

#include "pat/io.hpp"

namespace pat {

void save_sinogram(const std::filesystem::path& path, const Sinogram& f) {
  auto os = io::open_out(path);
  io::Writer w(os);
  w.magic("PATS");
  w.u32(static_cast<std::uint32_t>(f.n_det));
  w.u32(static_cast<std::uint32_t>(f.n_t));
  w.f64(f.dt);
  w.f64(f.t0);
  w.f32_array(f.v);
}

Sinogram load_sinogram(const std::filesystem::path& path) {
  auto is = io::open_in(path);
  io::Reader r(is);
  r.expect_magic("PATS");
  const std::uint32_t n_det = r.u32();
  const std::uint32_t n_t = r.u32();
  if (n_det == 0 || n_t == 0 || n_det > (1u << 20) || n_t > (1u << 20))
    throw std::runtime_error("load_sinogram: implausible header in " + path.string());
  Sinogram f(static_cast<int>(n_det), static_cast<int>(n_t));
  f.dt = r.f64();
  f.t0 = r.f64();
  f.v = r.f32_array(f.size());
  return f;
}

}  // namespace pat
