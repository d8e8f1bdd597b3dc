#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "pat/geometry.hpp"
#include "pat/image.hpp"
#include "pat/phantom.hpp"

namespace pat {

struct PhantomInstance {
  Image absorption;        // mu_a map, mm^-1
  Image segmentation;      // binary ground truth
  Image fluence;           // normalized to max 1
  Image initial_pressure;  // intensity (.) fluence, background 0
  PhantomSpec spec;
  double noise_level = 0.01;
  double fluence_residual = 0.0;
};

/// Split policy applied by build_dataset: the test split pins the optics
/// to the fixed evaluation constants, the train split redraws vessel
/// absorption in [0.20, 0.60] and background scattering in [0.50, 2.00]
/// per instance (derived from the spec seed).
enum class Split { train, test };

/// Vessels, class transform, optics maps, fluence, and the normalized
/// initial pressure for one spec.
PhantomInstance make_instance(const PhantomSpec& spec, const Grid2D& grid);

/// Specs for the class-robustness protocol: every instance homogeneous
/// illumination, the given class.
std::vector<PhantomSpec> make_class_specs(int count, int class_id, std::uint64_t seed);

/// Specs for the fluence protocol: class 0, one quarter homogeneous and
/// three quarters illuminated from 1, 2 or 4 drawn sides.
std::vector<PhantomSpec> make_fluence_specs(int count, std::uint64_t seed);

/// Raw grid container: magic "PATI", u32 nx, ny, channel tag, then
/// nx*ny little-endian f32 row-major samples.
inline constexpr std::uint32_t kChannelAbsorption = 1;
inline constexpr std::uint32_t kChannelFluence = 2;
inline constexpr std::uint32_t kChannelPressure = 3;
inline constexpr std::uint32_t kChannelSegmentation = 4;

void save_pati(const std::filesystem::path& path, const Image& image, std::uint32_t channel);
Image load_pati(const std::filesystem::path& path, std::uint32_t* channel = nullptr);

/// One directory per instance: four PATI grids, a JSON sidecar with the
/// spec and solve metadata, and PNG previews.
void save_instance(const std::filesystem::path& dir, const PhantomInstance& inst);
PhantomInstance load_instance(const std::filesystem::path& dir);

/// Generates and persists one instance per spec under out_dir/0000,
/// out_dir/0001, ... applying the split optics policy. Returns the
/// in-memory instances in spec order.
std::vector<PhantomInstance> build_dataset(const std::vector<PhantomSpec>& specs,
                                           const Grid2D& grid, Split split,
                                           const std::filesystem::path& out_dir);

/// Loads every instance directory (sorted) under a dataset root.
std::vector<PhantomInstance> load_dataset(const std::filesystem::path& root);

}  // namespace pat
