#pragma once

#include <cstddef>
#include <vector>

#include "pat/geometry.hpp"

namespace pat {

/// Scalar field sampled on a Grid2D, row-major (iy * nx + ix).
struct Image {
  int nx = 0;
  int ny = 0;
  std::vector<double> v;

  Image() = default;
  Image(int nx_, int ny_, double fill = 0.0)
      : nx(nx_), ny(ny_), v(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_), fill) {}

  std::size_t size() const { return v.size(); }
  double& at(int ix, int iy) { return v[static_cast<std::size_t>(iy) * nx + ix]; }
  double at(int ix, int iy) const { return v[static_cast<std::size_t>(iy) * nx + ix]; }
  bool same_shape(const Image& o) const { return nx == o.nx && ny == o.ny; }
};

/// Detector-time data, row-major (detector * n_t + time bin).
struct Sinogram {
  int n_det = 0;
  int n_t = 0;
  double dt = 0.0;
  double t0 = 0.0;
  std::vector<double> v;

  Sinogram() = default;
  Sinogram(int n_det_, int n_t_, double dt_ = 0.0, double t0_ = 0.0)
      : n_det(n_det_), n_t(n_t_), dt(dt_), t0(t0_),
        v(static_cast<std::size_t>(n_det_) * static_cast<std::size_t>(n_t_), 0.0) {}

  std::size_t size() const { return v.size(); }
  double& at(int d, int j) { return v[static_cast<std::size_t>(d) * n_t + j]; }
  double at(int d, int j) const { return v[static_cast<std::size_t>(d) * n_t + j]; }
  double* row(int d) { return v.data() + static_cast<std::size_t>(d) * n_t; }
  const double* row(int d) const { return v.data() + static_cast<std::size_t>(d) * n_t; }
  bool same_shape(const Sinogram& o) const { return n_det == o.n_det && n_t == o.n_t; }
};

// Small dense-vector helpers shared by solvers.
double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2(const std::vector<double>& a);
double max_abs(const std::vector<double>& a);
void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y);  // y += alpha x
void scale(std::vector<double>& x, double alpha);

double min_value(const std::vector<double>& a);
double max_value(const std::vector<double>& a);

}  // namespace pat
