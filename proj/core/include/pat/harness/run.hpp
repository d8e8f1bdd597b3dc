#pragma once

#include <filesystem>
#include <string>

#include "pat/acoustic.hpp"
#include "pat/harness/config.hpp"
#include "pat/impulse.hpp"

namespace pat::harness {

/// Directory layout of one experiment run. Sweep subruns share the parent's
/// dataset directory instead of regenerating the phantoms per detector count.
struct RunPaths {
  std::filesystem::path root;
  std::filesystem::path dataset_root;

  explicit RunPaths(std::filesystem::path root_dir)
      : root(std::move(root_dir)), dataset_root(root / "dataset") {}
  RunPaths(std::filesystem::path root_dir, std::filesystem::path dataset_dir)
      : root(std::move(root_dir)), dataset_root(std::move(dataset_dir)) {}

  std::filesystem::path dataset_split(const char* split) const { return dataset_root / split; }
  std::filesystem::path sino_dir() const { return root / "sino"; }
  std::filesystem::path sino_split(const char* split) const { return sino_dir() / split; }
  std::filesystem::path model_dir() const { return root / "model"; }
  std::filesystem::path weights_file() const { return model_dir() / "weights.lpdw"; }
  std::filesystem::path trace_file() const { return model_dir() / "trace.csv"; }
  std::filesystem::path eval_dir() const { return root / "eval"; }
  std::filesystem::path sweep_dir() const { return root / "sweep"; }
};

/// Acquisition geometry assembled from a configuration. `op` carries the
/// physical scale for the classical solvers; `lpd_op` is the same matrix
/// divided by `norm_ref` so the unrolled iterations see a unit-norm system.
/// `norm_ref` is the norm of the canonical 64-detector full ring for this
/// grid and sound speed, shared across detector counts so that a network
/// trained at one count sees identically scaled traces at any other.
struct OperatorBundle {
  Grid2D grid;
  DetectorArray detectors;
  TimeAxis time;
  AcousticOperator op;
  AcousticOperator lpd_op;
  double norm_ref = 0.0;
  std::string tof_provenance;  // "analytic" or "eikonal"
};

OperatorBundle build_operator(const ExperimentConfig& cfg);
ImpulseKernel build_kernel(const ImpulseConfig& ic);

/// Pipeline stages. Each is a pure function of (config, seed): rerunning
/// with an unchanged configuration either reproduces byte-identical
/// artifacts or skips the work when the on-disk manifest already matches.
/// The return value reports whether work was performed; `cmd_train` refuses
/// (returns false) when a completed model for the same configuration exists.
/// Failures throw.
bool cmd_phantom(const ExperimentConfig& cfg, const RunPaths& paths);
bool cmd_simulate(const ExperimentConfig& cfg, const RunPaths& paths);
bool cmd_train(const ExperimentConfig& cfg, const RunPaths& paths);
bool cmd_evaluate(const ExperimentConfig& cfg, const RunPaths& paths);

/// Runs simulate/train/evaluate per sweep detector count (phantoms are
/// built once at the parent root) and aggregates the per-count summaries
/// into sweep/sweep.csv.
bool cmd_sweep(const ExperimentConfig& cfg, const RunPaths& paths);

/// Aggregate of one method over a test set.
struct MethodSummary {
  std::string method;
  int n_detectors = 0;
  int count = 0;
  double psnr_mean = 0.0;
  double auc_mean = 0.0;
  double dice_mean = 0.0;
  double threshold = 0.0;
};

/// Reads eval/summary.csv written by cmd_evaluate.
std::vector<MethodSummary> read_summary_csv(const std::filesystem::path& path);

}  // namespace pat::harness
