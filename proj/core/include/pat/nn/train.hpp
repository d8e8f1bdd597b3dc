#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "pat/nn/adam.hpp"

namespace pat::nn {

struct TrainSample {
  Sinogram data;
  Image target;
  Image target_mask;  // binary; required only by the joint loss
};

struct TrainConfig {
  int epochs = 200;
  double learning_rate = 1e-3;
  bool joint = false;   // adds the segmentation term; requires a head and masks
  double beta = 0.5;    // segmentation weight when joint
  std::uint64_t seed = 0;
  /// (first epoch, batch size) pairs, sizes non-decreasing. Empty means
  /// the default ramp over thirds of the run.
  std::vector<std::pair<int, int>> batch_schedule;
};

/// 2 -> 6 -> 16 at thirds of the epoch budget.
std::vector<std::pair<int, int>> default_batch_schedule(int epochs);

/// One loss value per optimizer step plus per-epoch means. Exports without
/// wall-clock columns so reruns are byte-identical.
struct TrainTrace {
  std::vector<int> step_epoch;
  std::vector<double> step_loss;
  std::vector<double> epoch_loss;

  void save_csv(const std::filesystem::path& path) const;
};

/// Minimizes the chosen loss with Adam over shuffled batches. Deterministic
/// given the seed. Aborts if the loss exceeds 1e3 times the first batch.
UnrolledNet train(UnrolledNet net, const AcousticOperator& op,
                  const std::vector<TrainSample>& samples, const TrainConfig& cfg,
                  TrainTrace* trace = nullptr);

/// Same loop, but every batch samples a random detector subset of the full
/// ring operator and slices the stored sinograms to match.
UnrolledNet train_random_detectors(UnrolledNet net, const AcousticOperator& full_op,
                                   int active_detectors,
                                   const std::vector<TrainSample>& samples,
                                   const TrainConfig& cfg, TrainTrace* trace = nullptr);

/// Picks the decision threshold maximizing mean Dice over the dataset on the
/// grid 0.01..0.99; plateaus resolve to their midpoint.
double select_threshold(const std::vector<Image>& outputs, const std::vector<Image>& gts);

/// Keeps the listed detector rows of a multi-detector sinogram.
Sinogram select_rows(const Sinogram& f, const std::vector<int>& indices);

}  // namespace pat::nn
