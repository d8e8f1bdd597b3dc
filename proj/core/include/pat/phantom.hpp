#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pat/geometry.hpp"
#include "pat/image.hpp"

namespace pat {

/// Optical coefficients in mm^-1. Defaults are the fixed evaluation set:
/// whole blood for vessels, glandular tissue for background.
struct Optics {
  double vessel_mu_a = 0.40;
  double vessel_mu_sp = 0.45;
  double bg_mu_a = 0.004;
  double bg_mu_sp = 0.97;

  bool operator==(const Optics&) const = default;
};

/// Boundary sides carrying the light source. `homogeneous` bypasses light
/// transport entirely (unit fluence everywhere).
struct Illumination {
  bool homogeneous = true;
  bool left = false;
  bool right = false;
  bool top = false;
  bool bottom = false;

  int side_count() const {
    return (left ? 1 : 0) + (right ? 1 : 0) + (top ? 1 : 0) + (bottom ? 1 : 0);
  }
  bool operator==(const Illumination&) const = default;
};

/// Parses "homogeneous" or a comma-separated side list such as
/// "left,top". Throws std::invalid_argument on unknown tokens.
Illumination parse_illumination(const std::string& text);
std::string illumination_to_string(const Illumination& illum);

struct PhantomSpec {
  std::uint64_t seed = 0;
  int vessel_count_lo = 2;
  int vessel_count_hi = 4;
  int width_lo = 1;  // pixels
  int width_hi = 3;
  int class_id = 0;
  Optics optics;
  Illumination illumination;
};

/// Throws std::invalid_argument when ranges are inverted, widths are below
/// one pixel, the class id is outside 0..7, or an optical coefficient is
/// not positive.
void validate(const PhantomSpec& spec);

/// Random branching vessel tree rasterized as a binary mask. Every walk
/// after the first starts on the existing tree, so the mask is a single
/// 8-connected component. Retries internally (derived seeds) until the
/// vessel pixel fraction lands in [2%, 25%]; after the retry budget the
/// closest attempt is returned.
Image generate_vessels(const PhantomSpec& spec, const Grid2D& grid);

/// Exact Euclidean distance (in pixels) from each pixel to the nearest
/// pixel where `indicator` > 0.5. Pixels inside the set get 0; an empty
/// indicator yields a large finite sentinel everywhere.
Image distance_transform(const Image& indicator);

/// 8-connected component labels, 0 for background, 1..n for components.
/// `component_sizes` (optional) receives pixel counts indexed by label-1.
Image label_components(const Image& mask, std::vector<std::size_t>* component_sizes = nullptr);

/// Thresholded image: 1 where v > threshold, else 0.
Image binarize(const Image& v, double threshold);

/// Grows (radius > 0) or shrinks (radius < 0) the mask by a Euclidean
/// distance threshold on the exact distance transform.
Image morph_disk(const Image& mask, double radius);

struct ClassTransformResult {
  Image intensity;     // class-modified image, background 0 scale
  Image segmentation;  // binary ground truth, updated for geometry changes
  double noise_level = 0.01;  // data-stage additive noise, fraction of peak
};

/// Table-driven per-class modification of a vessel mask. Classes 0..7:
/// 0 identity, 1 diameter, 2 contrast, 3 background, 4 coverage,
/// 5 structure, 6 noise level (image untouched, level redrawn
/// from [0, 3x] the standard 1% level), 7 all of them. Deterministic
/// given the seed.
ClassTransformResult apply_class_transform(const Image& mask, int class_id, std::uint64_t seed);

/// Otsu threshold index for an 8-bit histogram; -1 when the image has no
/// spread (constant), in which case callers reject the patch.
int otsu_threshold(const std::vector<std::uint64_t>& histogram);

/// Reads grayscale PNGs from a directory (sorted order), cuts
/// non-overlapping patches, binarizes each by Otsu with the minority side
/// as foreground, and rescales to out_size x out_size. Patches that are
/// constant or nearly empty are skipped. Unreadable files append a message
/// to `warnings` (when given) and the scan continues.
std::vector<Image> ingest_patches(const std::filesystem::path& directory, int patch_size,
                                  int count, int out_size,
                                  std::vector<std::string>* warnings = nullptr);

}  // namespace pat
