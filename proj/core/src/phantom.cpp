#include "pat/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "pat/png_io.hpp"
#include "pat/rng.hpp"

namespace pat {

namespace {

constexpr std::uint64_t kVesselStream = 0x7e55e150ULL;
constexpr std::uint64_t kClassStream = 0xc1a55f02ULL;
constexpr double kStandardNoise = 0.01;

}  // namespace

Illumination parse_illumination(const std::string& text) {
  if (text == "homogeneous") return Illumination{};
  Illumination illum;
  illum.homogeneous = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string token = text.substr(pos, comma - pos);
    if (token == "left")
      illum.left = true;
    else if (token == "right")
      illum.right = true;
    else if (token == "top")
      illum.top = true;
    else if (token == "bottom")
      illum.bottom = true;
    else
      throw std::invalid_argument("unknown illumination token: '" + token + "'");
    pos = comma + 1;
  }
  return illum;
}

std::string illumination_to_string(const Illumination& illum) {
  if (illum.homogeneous) return "homogeneous";
  std::string out;
  for (auto [on, name] : {std::pair{illum.left, "left"},
                          {illum.right, "right"},
                          {illum.top, "top"},
                          {illum.bottom, "bottom"}}) {
    if (!on) continue;
    if (!out.empty()) out += ',';
    out += name;
  }
  return out;
}

void validate(const PhantomSpec& spec) {
  if (spec.class_id < 0 || spec.class_id > 7)
    throw std::invalid_argument("class_id must be in 0..7");
  if (spec.vessel_count_lo < 1 || spec.vessel_count_hi < spec.vessel_count_lo)
    throw std::invalid_argument("vessel count range invalid");
  if (spec.width_lo < 1 || spec.width_hi < spec.width_lo)
    throw std::invalid_argument("width range invalid (widths are >= 1 pixel)");
  if (spec.optics.vessel_mu_a <= 0 || spec.optics.vessel_mu_sp <= 0 ||
      spec.optics.bg_mu_a <= 0 || spec.optics.bg_mu_sp <= 0)
    throw std::invalid_argument("optical coefficients must be positive");
  if (!spec.illumination.homogeneous && spec.illumination.side_count() == 0)
    throw std::invalid_argument("illumination needs at least one side");
}

namespace {

// True if turning (ix, iy) on would complete a solid 3x3 block somewhere.
bool completes_block(const Image& mask, int ix, int iy) {
  for (int cy = iy - 1; cy <= iy + 1; ++cy)
    for (int cx = ix - 1; cx <= ix + 1; ++cx) {
      if (cx < 1 || cy < 1 || cx > mask.nx - 2 || cy > mask.ny - 2) continue;
      bool solid = true;
      for (int qy = cy - 1; solid && qy <= cy + 1; ++qy)
        for (int qx = cx - 1; qx <= cx + 1; ++qx)
          if (!(qx == ix && qy == iy) && mask.at(qx, qy) < 0.5) {
            solid = false;
            break;
          }
      if (solid) return true;
    }
  return false;
}

int stamp_disk(Image& mask, double cx, double cy, double radius,
               std::vector<std::size_t>& stamped) {
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
  const int x1 = std::min(mask.nx - 1, static_cast<int>(std::ceil(cx + radius)));
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
  const int y1 = std::min(mask.ny - 1, static_cast<int>(std::ceil(cy + radius)));
  const double r2 = radius * radius;
  // Thin strokes must never fill a 3x3 block, so that single-width trees stay
  // skeleton-like (distance transform bounded by the diagonal half-width).
  const bool thin = radius < 0.75;
  int fresh = 0;
  for (int iy = y0; iy <= y1; ++iy)
    for (int ix = x0; ix <= x1; ++ix) {
      const double dx = ix - cx, dy = iy - cy;
      if (dx * dx + dy * dy > r2) continue;
      double& px = mask.at(ix, iy);
      if (px == 0.0 && !(thin && completes_block(mask, ix, iy))) {
        px = 1.0;
        stamped.push_back(static_cast<std::size_t>(iy) * mask.nx + ix);
        ++fresh;
      }
    }
  return fresh;
}

struct Walker {
  Rng& rng;
  Image& mask;
  std::vector<std::size_t>& stamped;

  void run(double x, double y, double angle, int width, int budget, int depth) {
    constexpr double kStep = 0.5;
    // A walk that keeps covering existing vessel after once leaving it has
    // rejoined the tree tangentially; stopping there keeps thin masks thin.
    const int stale_limit = 2 * width + 2;
    int stale = 0;
    bool escaped = false;
    for (int s = 0; s < budget; ++s) {
      angle += 0.12 * rng.normal();
      x += kStep * std::cos(angle);
      y += kStep * std::sin(angle);
      if (x < 0 || y < 0 || x > mask.nx - 1 || y > mask.ny - 1) return;
      if (stamp_disk(mask, x, y, 0.5 * width, stamped) > 0) {
        escaped = true;
        stale = 0;
      } else if (escaped && ++stale > stale_limit) {
        return;
      }
      if (depth < 3 && rng.uniform() < 0.03) {
        const double turn = rng.uniform(0.35, 1.0) * (rng.uniform() < 0.5 ? 1.0 : -1.0);
        run(x, y, angle + turn, std::max(1, width - 1), (budget - s) * 2 / 3, depth + 1);
      }
    }
  }
};

double vessel_fraction(const Image& mask) {
  double on = 0;
  for (double v : mask.v) on += v;
  return on / static_cast<double>(mask.size());
}

Image generate_attempt(const PhantomSpec& spec, int nx, int ny, std::uint64_t seed) {
  Image mask(nx, ny);
  std::vector<std::size_t> stamped;
  Rng rng(seed);
  const int roots = rng.uniform_int(spec.vessel_count_lo, spec.vessel_count_hi);
  Walker walker{rng, mask, stamped};
  for (int r = 0; r < roots; ++r) {
    double x, y;
    if (r == 0 || stamped.empty()) {
      x = rng.uniform(0.15, 0.85) * (nx - 1);
      y = rng.uniform(0.15, 0.85) * (ny - 1);
    } else {
      // later trees sprout from the existing one, keeping the mask connected
      const auto idx = stamped[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<int>(stamped.size()) - 1))];
      x = static_cast<double>(idx % static_cast<std::size_t>(nx));
      y = static_cast<double>(idx / static_cast<std::size_t>(nx));
    }
    const int width = rng.uniform_int(spec.width_lo, spec.width_hi);
    const int budget = rng.uniform_int(2 * nx, 4 * nx);
    walker.run(x, y, rng.uniform(0.0, kTwoPi), width, budget, 0);
  }
  return mask;
}

}  // namespace

Image generate_vessels(const PhantomSpec& spec, const Grid2D& grid) {
  validate(spec);
  if (grid.nx < 4 * spec.width_hi || grid.ny < 4 * spec.width_hi)
    throw std::invalid_argument("grid too small for the requested vessel width");

  Image best;
  double best_miss = std::numeric_limits<double>::infinity();
  for (std::uint64_t attempt = 0; attempt < 32; ++attempt) {
    Image mask = generate_attempt(spec, grid.nx, grid.ny,
                                  mix_seed(spec.seed, kVesselStream, attempt));
    const double frac = vessel_fraction(mask);
    const double miss = frac < 0.02 ? 0.02 - frac : (frac > 0.25 ? frac - 0.25 : 0.0);
    if (miss == 0.0) return mask;
    if (miss < best_miss) {
      best_miss = miss;
      best = std::move(mask);
    }
  }
  return best;
}

namespace {

// Felzenszwalb-Huttenlocher lower envelope: squared distances to the
// nearest zero of f along one dimension.
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
            std::vector<double>& z, int n) {
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s;
    while (true) {
      const int p = v[k];
      s = ((f[q] + q * q) - (f[p] + p * p)) / (2.0 * (q - p));
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

Image distance_transform(const Image& indicator) {
  const int nx = indicator.nx, ny = indicator.ny;
  constexpr double kFar = 1e18;
  Image sq(nx, ny);
  for (std::size_t i = 0; i < sq.size(); ++i)
    sq.v[i] = indicator.v[i] > 0.5 ? 0.0 : kFar;

  const int nmax = std::max(nx, ny);
  std::vector<double> f(static_cast<std::size_t>(nmax)), d(static_cast<std::size_t>(nmax));
  std::vector<int> v(static_cast<std::size_t>(nmax));
  std::vector<double> z(static_cast<std::size_t>(nmax) + 1);

  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) f[static_cast<std::size_t>(ix)] = sq.at(ix, iy);
    edt_1d(f, d, v, z, nx);
    for (int ix = 0; ix < nx; ++ix) sq.at(ix, iy) = d[static_cast<std::size_t>(ix)];
  }
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) f[static_cast<std::size_t>(iy)] = sq.at(ix, iy);
    edt_1d(f, d, v, z, ny);
    for (int iy = 0; iy < ny; ++iy) sq.at(ix, iy) = d[static_cast<std::size_t>(iy)];
  }
  for (auto& val : sq.v) val = std::sqrt(val);
  return sq;
}

Image label_components(const Image& mask, std::vector<std::size_t>* component_sizes) {
  Image labels(mask.nx, mask.ny);
  std::vector<std::size_t> sizes;
  std::deque<std::pair<int, int>> queue;
  double next = 1.0;
  for (int sy = 0; sy < mask.ny; ++sy)
    for (int sx = 0; sx < mask.nx; ++sx) {
      if (mask.at(sx, sy) <= 0.5 || labels.at(sx, sy) != 0.0) continue;
      std::size_t count = 0;
      labels.at(sx, sy) = next;
      queue.emplace_back(sx, sy);
      while (!queue.empty()) {
        const auto [x, y] = queue.front();
        queue.pop_front();
        ++count;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int qx = x + dx, qy = y + dy;
            if (qx < 0 || qy < 0 || qx >= mask.nx || qy >= mask.ny) continue;
            if (mask.at(qx, qy) <= 0.5 || labels.at(qx, qy) != 0.0) continue;
            labels.at(qx, qy) = next;
            queue.emplace_back(qx, qy);
          }
      }
      sizes.push_back(count);
      next += 1.0;
    }
  if (component_sizes) *component_sizes = std::move(sizes);
  return labels;
}

Image binarize(const Image& v, double threshold) {
  Image out(v.nx, v.ny);
  for (std::size_t i = 0; i < v.size(); ++i) out.v[i] = v.v[i] > threshold ? 1.0 : 0.0;
  return out;
}

Image morph_disk(const Image& mask, double radius) {
  if (radius == 0.0) return mask;
  Image out(mask.nx, mask.ny);
  if (radius > 0.0) {
    const Image dist = distance_transform(mask);
    for (std::size_t i = 0; i < mask.size(); ++i)
      out.v[i] = (mask.v[i] > 0.5 || dist.v[i] <= radius + 1e-9) ? 1.0 : 0.0;
  } else {
    Image inverse(mask.nx, mask.ny);
    for (std::size_t i = 0; i < mask.size(); ++i) inverse.v[i] = 1.0 - mask.v[i];
    const Image dist = distance_transform(inverse);
    for (std::size_t i = 0; i < mask.size(); ++i)
      out.v[i] = (mask.v[i] > 0.5 && dist.v[i] > -radius + 1e-9) ? 1.0 : 0.0;
  }
  return out;
}

namespace {

/// White noise box-blurred three times, affinely rescaled to [lo, hi].
Image smooth_field(int nx, int ny, Rng& rng, double lo, double hi) {
  Image field(nx, ny);
  for (auto& v : field.v) v = rng.normal();
  constexpr int kRadius = 2;
  Image tmp(nx, ny);
  for (int pass = 0; pass < 3; ++pass) {
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        double sum = 0;
        int n = 0;
        for (int k = -kRadius; k <= kRadius; ++k) {
          const int q = ix + k;
          if (q < 0 || q >= nx) continue;
          sum += field.at(q, iy);
          ++n;
        }
        tmp.at(ix, iy) = sum / n;
      }
    for (int ix = 0; ix < nx; ++ix)
      for (int iy = 0; iy < ny; ++iy) {
        double sum = 0;
        int n = 0;
        for (int k = -kRadius; k <= kRadius; ++k) {
          const int q = iy + k;
          if (q < 0 || q >= ny) continue;
          sum += tmp.at(ix, q);
          ++n;
        }
        field.at(ix, iy) = sum / n;
      }
  }
  const double mn = min_value(field.v), mx = max_value(field.v);
  if (mx == mn) {
    for (auto& v : field.v) v = 0.5 * (lo + hi);
    return field;
  }
  for (auto& v : field.v) v = lo + (hi - lo) * (v - mn) / (mx - mn);
  return field;
}

Image transform_diameter(const Image& mask, Rng& rng) {
  const int delta = rng.uniform_int(-1, 1);
  return morph_disk(mask, static_cast<double>(delta));
}

double transform_contrast(Rng& rng) {
  constexpr double kLevels[] = {0.5, 0.7, 1.0, 1.4, 2.0};
  return kLevels[rng.uniform_int(0, 4)];
}

Image transform_background(int nx, int ny, Rng& rng) {
  if (rng.uniform() < 0.5) {
    return Image(nx, ny, rng.uniform(0.05, 0.2));
  }
  return smooth_field(nx, ny, rng, 0.0, 0.2);
}

Image transform_coverage(const Image& mask, Rng& rng) {
  const double u = rng.uniform();
  if (u < 1.0 / 3.0) {
    // drop branches thinner than the corpus median half-width
    Image inverse(mask.nx, mask.ny);
    for (std::size_t i = 0; i < mask.size(); ++i) inverse.v[i] = 1.0 - mask.v[i];
    const Image halfwidth = distance_transform(inverse);
    std::vector<double> widths;
    for (std::size_t i = 0; i < mask.size(); ++i)
      if (mask.v[i] > 0.5) widths.push_back(halfwidth.v[i]);
    if (widths.empty()) return mask;
    std::nth_element(widths.begin(), widths.begin() + widths.size() / 2, widths.end());
    const double r = std::max(1.0, widths[widths.size() / 2]);
    const Image opened = morph_disk(morph_disk(mask, -r), r);
    Image out(mask.nx, mask.ny);
    for (std::size_t i = 0; i < mask.size(); ++i)
      out.v[i] = (mask.v[i] > 0.5 && opened.v[i] > 0.5) ? 1.0 : 0.0;
    return out;
  }
  if (u < 2.0 / 3.0) return mask;
  PhantomSpec extra;
  extra.seed = rng.next_u64();
  const Grid2D grid(mask.nx, mask.ny, 1.0, {0.0, 0.0});
  const Image second = generate_vessels(extra, grid);
  Image out = mask;
  for (std::size_t i = 0; i < out.size(); ++i)
    out.v[i] = std::max(out.v[i], second.v[i]);
  return out;
}

Image transform_structure(const Image& mask, Rng& rng) {
  constexpr double kFloor[] = {0.2, 0.4, 0.6, 0.8, 1.0};
  const double m = kFloor[rng.uniform_int(0, 4)];
  return smooth_field(mask.nx, mask.ny, rng, m, 1.0);
}

double transform_noise(Rng& rng) { return rng.uniform(0.0, 3.0) * kStandardNoise; }

}  // namespace

ClassTransformResult apply_class_transform(const Image& mask, int class_id,
                                           std::uint64_t seed) {
  if (class_id < 0 || class_id > 7) throw std::invalid_argument("class_id must be in 0..7");
  Rng rng(mix_seed(seed, kClassStream));

  Image geometry = mask;
  double vessel_level = 1.0;
  Image vessel_field;  // empty means uniform
  Image background;    // empty means zero
  double noise_level = kStandardNoise;

  // geometry first, then vessel intensity, then background
  if (class_id == 1 || class_id == 7) geometry = transform_diameter(geometry, rng);
  if (class_id == 4 || class_id == 7) geometry = transform_coverage(geometry, rng);
  if (class_id == 2 || class_id == 7) vessel_level = transform_contrast(rng);
  if (class_id == 5 || class_id == 7) vessel_field = transform_structure(geometry, rng);
  if (class_id == 3 || class_id == 7)
    background = transform_background(mask.nx, mask.ny, rng);
  if (class_id == 6 || class_id == 7) noise_level = transform_noise(rng);

  ClassTransformResult out;
  out.segmentation = geometry;
  out.noise_level = noise_level;
  out.intensity = Image(mask.nx, mask.ny);
  for (int iy = 0; iy < mask.ny; ++iy)
    for (int ix = 0; ix < mask.nx; ++ix) {
      if (geometry.at(ix, iy) > 0.5) {
        const double shape = vessel_field.size() ? vessel_field.at(ix, iy) : 1.0;
        out.intensity.at(ix, iy) = vessel_level * shape;
      } else {
        out.intensity.at(ix, iy) = background.size() ? background.at(ix, iy) : 0.0;
      }
    }
  return out;
}

int otsu_threshold(const std::vector<std::uint64_t>& histogram) {
  std::uint64_t total = 0;
  double sum_all = 0;
  for (std::size_t t = 0; t < histogram.size(); ++t) {
    total += histogram[t];
    sum_all += static_cast<double>(t) * static_cast<double>(histogram[t]);
  }
  if (total == 0) return -1;
  double best = 0.0;
  int best_t = -1;
  std::uint64_t w_bg = 0;
  double sum_bg = 0;
  for (std::size_t t = 0; t + 1 < histogram.size(); ++t) {
    w_bg += histogram[t];
    sum_bg += static_cast<double>(t) * static_cast<double>(histogram[t]);
    if (w_bg == 0) continue;
    const std::uint64_t w_fg = total - w_bg;
    if (w_fg == 0) break;
    const double m_bg = sum_bg / static_cast<double>(w_bg);
    const double m_fg = (sum_all - sum_bg) / static_cast<double>(w_fg);
    const double between =
        static_cast<double>(w_bg) * static_cast<double>(w_fg) * (m_bg - m_fg) * (m_bg - m_fg);
    if (between > best) {
      best = between;
      best_t = static_cast<int>(t);
    }
  }
  return best > 0.0 ? best_t : -1;
}

namespace {

Image resample_binary(const Image& patch, int out_size) {
  if (patch.nx == out_size && patch.ny == out_size) return patch;
  Image out(out_size, out_size);
  const double sx = static_cast<double>(patch.nx) / out_size;
  const double sy = static_cast<double>(patch.ny) / out_size;
  for (int oy = 0; oy < out_size; ++oy)
    for (int ox = 0; ox < out_size; ++ox) {
      const int x0 = static_cast<int>(std::floor(ox * sx));
      const int x1 = std::max(x0 + 1, static_cast<int>(std::ceil((ox + 1) * sx)));
      const int y0 = static_cast<int>(std::floor(oy * sy));
      const int y1 = std::max(y0 + 1, static_cast<int>(std::ceil((oy + 1) * sy)));
      double sum = 0;
      int n = 0;
      for (int iy = y0; iy < std::min(y1, patch.ny); ++iy)
        for (int ix = x0; ix < std::min(x1, patch.nx); ++ix) {
          sum += patch.at(ix, iy);
          ++n;
        }
      out.at(ox, oy) = (n > 0 && sum / n >= 0.5) ? 1.0 : 0.0;
    }
  return out;
}

}  // namespace

std::vector<Image> ingest_patches(const std::filesystem::path& directory, int patch_size,
                                  int count, int out_size,
                                  std::vector<std::string>* warnings) {
  if (patch_size < 2 || out_size < 2 || count < 0)
    throw std::invalid_argument("patch_size and out_size must be at least 2");
  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back(msg);
  };

  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(directory)) {
    for (const auto& entry : std::filesystem::directory_iterator(directory))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
  }
  if (files.empty()) {
    warn("no images found in " + directory.string());
    return {};
  }

  std::vector<Image> patches;
  for (const auto& file : files) {
    if (static_cast<int>(patches.size()) >= count) break;
    std::size_t nx = 0, ny = 0;
    std::vector<std::uint8_t> gray;
    try {
      gray = read_png_gray(file, nx, ny);
    } catch (const std::exception& e) {
      warn("skipped " + file.string() + ": " + e.what());
      continue;
    }
    for (std::size_t py = 0; py + patch_size <= ny && static_cast<int>(patches.size()) < count;
         py += static_cast<std::size_t>(patch_size)) {
      for (std::size_t px = 0; px + patch_size <= nx &&
                               static_cast<int>(patches.size()) < count;
           px += static_cast<std::size_t>(patch_size)) {
        std::vector<std::uint64_t> hist(256, 0);
        for (int iy = 0; iy < patch_size; ++iy)
          for (int ix = 0; ix < patch_size; ++ix)
            ++hist[gray[(py + iy) * nx + px + ix]];
        const int t = otsu_threshold(hist);
        if (t < 0) continue;  // constant patch, nothing to segment
        std::uint64_t above = 0;
        for (std::size_t b = static_cast<std::size_t>(t) + 1; b < hist.size(); ++b)
          above += hist[b];
        const std::uint64_t total =
            static_cast<std::uint64_t>(patch_size) * static_cast<std::uint64_t>(patch_size);
        const bool bright_fg = above <= total - above;  // vessels are the minority side
        Image patch(patch_size, patch_size);
        std::uint64_t fg = 0;
        for (int iy = 0; iy < patch_size; ++iy)
          for (int ix = 0; ix < patch_size; ++ix) {
            const bool over = gray[(py + iy) * nx + px + ix] > t;
            const bool on = bright_fg == over;
            patch.at(ix, iy) = on ? 1.0 : 0.0;
            fg += on ? 1 : 0;
          }
        const double frac = static_cast<double>(fg) / static_cast<double>(total);
        if (frac < 0.005 || frac > 0.5) continue;
        patches.push_back(resample_binary(patch, out_size));
      }
    }
  }
  return patches;
}

}  // namespace pat
