#include "pat/tv.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "pat/io.hpp"
#include "pat/metrics.hpp"
#include "pat/rng.hpp"

namespace pat {

StackedField gradient(const Image& u, double pixel_size) {
  const std::size_t nx = u.nx, ny = u.ny;
  StackedField g = StackedField::zeros(nx, ny);
  const double inv_h = 1.0 / pixel_size;
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const std::size_t i = iy * nx + ix;
      if (ix + 1 < nx) g.dx[i] = (u.v[i + 1] - u.v[i]) * inv_h;
      if (iy + 1 < ny) g.dy[i] = (u.v[i + nx] - u.v[i]) * inv_h;
    }
  }
  return g;
}

Image divergence(const StackedField& p, double pixel_size) {
  const std::size_t nx = p.nx, ny = p.ny;
  Image out(static_cast<int>(nx), static_cast<int>(ny));
  const double inv_h = 1.0 / pixel_size;
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const std::size_t i = iy * nx + ix;
      double acc = 0.0;
      if (ix + 1 < nx) acc += p.dx[i];
      if (ix > 0) acc -= p.dx[i - 1];
      if (iy + 1 < ny) acc += p.dy[i];
      if (iy > 0) acc -= p.dy[i - nx];
      out.v[i] = acc * inv_h;
    }
  }
  return out;
}

Sinogram prox_l2_conjugate(const Sinogram& q, const Sinogram& f, double sigma) {
  if (!q.same_shape(f)) throw std::invalid_argument("prox_l2_conjugate: shape mismatch");
  if (sigma <= 0.0) throw std::invalid_argument("prox_l2_conjugate: sigma must be positive");
  Sinogram out = q;
  const double inv = 1.0 / (1.0 + sigma);
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = (q.v[i] - sigma * f.v[i]) * inv;
  return out;
}

StackedField prox_l1_conjugate(StackedField p, double alpha, bool isotropic) {
  if (alpha < 0.0) throw std::invalid_argument("prox_l1_conjugate: alpha must be non-negative");
  if (isotropic) {
    for (std::size_t i = 0; i < p.dx.size(); ++i) {
      const double mag = std::hypot(p.dx[i], p.dy[i]);
      if (mag > alpha) {
        const double s = alpha / mag;
        p.dx[i] *= s;
        p.dy[i] *= s;
      }
    }
  } else {
    for (double& v : p.dx) v = std::clamp(v, -alpha, alpha);
    for (double& v : p.dy) v = std::clamp(v, -alpha, alpha);
  }
  return p;
}

double stacked_operator_norm(const AcousticOperator& op, int iterations) {
  const std::size_t n = op.grid.npixels();
  Rng rng(0x57ac4ed0ULL);
  Image x(op.grid.nx, op.grid.ny);
  for (double& v : x.v) v = rng.uniform(-1.0, 1.0);
  std::vector<double> kx;
  double sigma = 0.0;
  for (int it = 0; it < iterations; ++it) {
    // y = (K^T K + grad^T grad) x
    op.k.multiply(x.v, kx);
    std::vector<double> y(n, 0.0);
    op.kt.multiply_add(kx.data(), y.data());
    const StackedField g = gradient(x, op.grid.pixel_size);
    const Image neg_div = divergence(g, op.grid.pixel_size);
    for (std::size_t i = 0; i < n; ++i) y[i] -= neg_div.v[i];
    double n2 = 0.0;
    for (double v : y) n2 += v * v;
    const double nrm = std::sqrt(n2);
    if (nrm == 0.0) return 0.0;
    for (std::size_t i = 0; i < n; ++i) x.v[i] = y[i] / nrm;
    sigma = std::sqrt(nrm);
  }
  return sigma;
}

double tv_energy(const AcousticOperator& op, const Image& u, const Sinogram& f, double alpha,
                 bool isotropic) {
  std::vector<double> ku;
  op.k.multiply(u.v, ku);
  double data_term = 0.0;
  for (std::size_t i = 0; i < ku.size(); ++i) {
    const double d = ku[i] - f.v[i];
    data_term += d * d;
  }
  const StackedField g = gradient(u, op.grid.pixel_size);
  double tv = 0.0;
  if (isotropic) {
    for (std::size_t i = 0; i < g.dx.size(); ++i) tv += std::hypot(g.dx[i], g.dy[i]);
  } else {
    for (double v : g.dx) tv += std::abs(v);
    for (double v : g.dy) tv += std::abs(v);
  }
  return 0.5 * data_term + alpha * tv;
}

TvProblem make_tv_problem(const AcousticOperator& op, const Sinogram& f, double alpha,
                          int max_iters, bool isotropic) {
  TvProblem p;
  p.op = &op;
  p.data = f;
  p.alpha = alpha;
  p.max_iters = max_iters;
  p.isotropic = isotropic;
  p.operator_norm = stacked_operator_norm(op);
  p.sigma = p.tau = 0.99 / p.operator_norm;
  return p;
}

void SolverTrace::save_csv(const std::filesystem::path& path) const {
  std::string out = "iteration,energy,primal_residual,dual_residual,seconds\n";
  char buf[160];
  for (std::size_t i = 0; i < primal_residual.size(); ++i) {
    const double e = i < energy.size() ? energy[i] : std::nan("");
    std::snprintf(buf, sizeof buf, "%zu,%.9g,%.9g,%.9g,%.6f\n", i, e, primal_residual[i],
                  dual_residual[i], seconds[i]);
    out += buf;
  }
  io::write_text(path, out);
}

std::pair<Image, SolverTrace> pdhg_solve(const TvProblem& problem) {
  const AcousticOperator& op = *problem.op;
  const std::size_t n = op.grid.npixels();
  const std::size_t m = problem.data.v.size();
  if (problem.sigma <= 0.0 || problem.tau <= 0.0)
    throw std::invalid_argument("pdhg_solve: step sizes not set");
  if (problem.operator_norm > 0.0 &&
      problem.sigma * problem.tau * problem.operator_norm * problem.operator_norm > 1.0 + 1e-9)
    throw std::invalid_argument("pdhg_solve: sigma*tau*L^2 exceeds 1");
  if (problem.data.n_det != op.detectors.count() || problem.data.n_t != op.time.n_t)
    throw std::invalid_argument("pdhg_solve: data shape does not match operator");

  const double sigma = problem.sigma;
  const double tau = problem.tau;
  const double theta = problem.theta;
  const double h = op.grid.pixel_size;

  Image u(op.grid.nx, op.grid.ny);
  Image u_prev = u;
  Sinogram qf = problem.data;
  std::fill(qf.v.begin(), qf.v.end(), 0.0);
  StackedField qg = StackedField::zeros(u.nx, u.ny);

  SolverTrace trace;
  trace.primal_residual.reserve(problem.max_iters);
  Image ubar = u;
  std::vector<double> k_ubar(m);
  const auto t_start = std::chrono::steady_clock::now();

  for (int it = 0; it < problem.max_iters; ++it) {
    for (std::size_t i = 0; i < n; ++i)
      ubar.v[i] = (1.0 + theta) * u.v[i] - theta * u_prev.v[i];

    op.k.multiply(ubar.v, k_ubar);
    double dual_res2 = 0.0;
    const double inv_1s = 1.0 / (1.0 + sigma);
    for (std::size_t i = 0; i < m; ++i) {
      const double next = (qf.v[i] + sigma * k_ubar[i] - sigma * problem.data.v[i]) * inv_1s;
      const double d = next - qf.v[i];
      dual_res2 += d * d;
      qf.v[i] = next;
    }
    StackedField gbar = gradient(ubar, h);
    for (std::size_t i = 0; i < n; ++i) {
      gbar.dx[i] = qg.dx[i] + sigma * gbar.dx[i];
      gbar.dy[i] = qg.dy[i] + sigma * gbar.dy[i];
    }
    gbar = prox_l1_conjugate(std::move(gbar), problem.alpha, problem.isotropic);
    for (std::size_t i = 0; i < n; ++i) {
      const double ddx = gbar.dx[i] - qg.dx[i];
      const double ddy = gbar.dy[i] - qg.dy[i];
      dual_res2 += ddx * ddx + ddy * ddy;
    }
    qg = std::move(gbar);

    u_prev = u;
    std::vector<double> ascent(n, 0.0);
    op.kt.multiply_add(qf.v.data(), ascent.data());
    const Image div_qg = divergence(qg, h);
    double primal_res2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double step = tau * (ascent[i] - div_qg.v[i]);
      u.v[i] -= step;
      primal_res2 += step * step;
    }
    if (!std::isfinite(primal_res2))
      throw std::runtime_error("pdhg_solve: non-finite iterate at iteration " +
                               std::to_string(it));

    trace.primal_residual.push_back(std::sqrt(primal_res2));
    trace.dual_residual.push_back(std::sqrt(dual_res2));
    if (problem.trace_every > 0 && it % problem.trace_every == 0)
      trace.energy.push_back(tv_energy(op, u, problem.data, problem.alpha, problem.isotropic));
    trace.seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count());
  }
  return {std::move(u), std::move(trace)};
}

double optimal_scale(const Image& u, const Image& gt) {
  const double denom = dot(u.v, u.v);
  if (denom == 0.0) return 1.0;
  return dot(u.v, gt.v) / denom;
}

Image tv_reconstruct(const AcousticOperator& op, const Sinogram& f,
                     const std::vector<double>& alphas, const Image* ground_truth,
                     int max_iters) {
  if (alphas.empty()) throw std::invalid_argument("tv_reconstruct: no alpha candidates");
  TvProblem base = make_tv_problem(op, f, alphas.front(), max_iters);
  base.trace_every = 0;
  if (!ground_truth) return pdhg_solve(base).first;

  Image best;
  double best_psnr = -kPsnrInfinite;
  for (double alpha : alphas) {
    base.alpha = alpha;
    Image u = pdhg_solve(base).first;
    scale(u.v, optimal_scale(u, *ground_truth));
    const double p = psnr(u, *ground_truth);
    if (p > best_psnr) {
      best_psnr = p;
      best = std::move(u);
    }
  }
  return best;
}

}  // namespace pat
