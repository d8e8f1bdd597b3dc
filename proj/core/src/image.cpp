#include "pat/image.hpp"

#include <algorithm>
#include <cmath>

namespace pat {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(std::vector<double>& x, double alpha) {
  for (double& v : x) v *= alpha;
}

double min_value(const std::vector<double>& a) { return *std::min_element(a.begin(), a.end()); }

double max_value(const std::vector<double>& a) { return *std::max_element(a.begin(), a.end()); }

}  // namespace pat
