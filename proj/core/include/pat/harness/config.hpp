#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pat::harness {

/// Declarative experiment description. Every stage of the pipeline is a pure
/// function of this structure plus the seed, and artifacts on disk carry the
/// hash of the producing configuration.
struct GridConfig {
  int n = 64;
  double extent_mm = 24.0;
};

struct GeometryConfig {
  int detectors = 32;
  double radius_mm = 0.0;  // 0 picks the default ring radius for the grid
  double span_deg = 360.0;  // < 360 is the limited-view arc
  double start_deg = 0.0;
  double sound_speed = 1.5;  // mm/us
};

struct DatasetConfig {
  int train_count = 200;
  int test_count = 50;
  int class_id = 0;
  /// Rotating illumination mix: one in four homogeneous, the rest lit from
  /// one, two or four sides. Overrides `illumination`.
  bool fluence_mix = false;
  std::string illumination = "homogeneous";
  int vessel_count_lo = 2, vessel_count_hi = 4;
  int width_lo = 1, width_hi = 3;
};

struct SpeedConfig {
  std::string kind = "uniform";  // "uniform" | "disk"
  double delta = 0.0;            // speed step inside the disk, mm/us
  double radius_mm = 6.0;
  std::array<double, 2> center{0.0, 0.0};
};

struct ImpulseConfig {
  std::string kind = "delta";  // "delta" | "gaussian"
  double sigma = 1.5;          // samples
  double delay = 0.0;          // samples
  double gain = 1.0;
  double deconv_reg = 1e-3;    // Wiener regularization at evaluation time
};

struct SimulateConfig {
  /// "class" takes each instance's own level, "none" disables noise,
  /// "fixed" applies `noise_level` everywhere.
  std::string noise = "class";
  double noise_level = 0.01;
  SpeedConfig speed;
  ImpulseConfig impulse;
};

struct NetworkConfig {
  std::string size = "small";  // "small" (5 iters, 2 ch) | "large" (10, 5) | "custom"
  int iterations = 5;
  int channels = 2;
  int hidden = 16;
};

struct TrainStageConfig {
  int epochs = 20;
  double learning_rate = 1e-3;
  bool joint = true;
  double beta = 0.5;
  /// > 0 trains on random detector subsets of the full ring, this many
  /// active per batch.
  int random_detectors = 0;
};

struct EvaluateConfig {
  std::vector<std::string> methods{"fbp", "tv", "lpd"};
  std::vector<double> tv_alphas{0.0003, 0.001, 0.003, 0.01};
  int tv_iters = 300;
  int panel_count = 4;
  /// Path to a weights file; empty means the run's own trained model.
  std::string weights;
};

struct ExperimentConfig {
  std::string experiment = "desk";
  std::uint64_t seed = 1;
  std::string out = "runs/desk";
  GridConfig grid;
  GeometryConfig geometry;
  DatasetConfig dataset;
  SimulateConfig simulate;
  NetworkConfig network;
  TrainStageConfig train;
  EvaluateConfig evaluate;
  std::vector<int> sweep_detectors{8, 16, 32, 64};
};

/// Resolved network shape after applying the size preset.
struct NetworkShape {
  int iterations = 0;
  int channels = 0;
  int hidden = 0;
};
NetworkShape resolve_network(const NetworkConfig& net);

/// Canonical serialization (stable key order); parse rejects unknown keys
/// and ill-typed values with a message naming the offending key.
std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const ExperimentConfig& cfg);

/// FNV-1a of the canonical serialization, as 16 hex digits. Output paths
/// (`out`, `evaluate.weights`) are blanked first: identity tracks what a run
/// computes, not where it is stored.
std::string config_hash(const ExperimentConfig& cfg);

/// Built-in configurations: "desk" (the full pipeline at 64x64),
/// "desk-classes" (per-class robustness base), "tiny" (minutes-scale
/// smoke pipeline). Throws on unknown names and lists the known ones.
ExperimentConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

void validate(const ExperimentConfig& cfg);

}  // namespace pat::harness
