#include "pat/nn/train.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>

#include "pat/io.hpp"
#include "pat/metrics.hpp"
#include "pat/rng.hpp"

namespace pat::nn {

namespace {

constexpr std::uint64_t kShuffleStream = 0x5baff1e5ULL;
constexpr std::uint64_t kDetectorStream = 0xde7ec7edULL;

int batch_size_at(const std::vector<std::pair<int, int>>& schedule, int epoch) {
  int size = schedule.front().second;
  for (const auto& [start, b] : schedule)
    if (epoch >= start) size = b;
  return size;
}

void validate_config(const TrainConfig& cfg, const UnrolledNet& net,
                     const std::vector<TrainSample>& samples) {
  if (samples.empty()) throw std::invalid_argument("train: empty dataset");
  if (cfg.epochs <= 0) throw std::invalid_argument("train: epochs must be positive");
  if (cfg.learning_rate <= 0.0) throw std::invalid_argument("train: bad learning rate");
  if (cfg.beta < 0.0) throw std::invalid_argument("train: beta must be nonnegative");
  if (cfg.joint && cfg.beta > 0.0 && !net.segmentation_head)
    throw std::invalid_argument("train: joint loss needs a segmentation head");
  for (const auto& s : samples) {
    if (!s.target.same_shape(samples.front().target))
      throw std::invalid_argument("train: inconsistent target shapes");
    if (cfg.joint && cfg.beta > 0.0 && !s.target_mask.same_shape(s.target))
      throw std::invalid_argument("train: joint loss needs masks shaped like the targets");
  }
}

std::vector<std::pair<int, int>> resolve_schedule(const TrainConfig& cfg) {
  auto schedule = cfg.batch_schedule.empty() ? default_batch_schedule(cfg.epochs)
                                             : cfg.batch_schedule;
  if (schedule.front().first != 0)
    throw std::invalid_argument("train: batch schedule must start at epoch 0");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i].second <= 0) throw std::invalid_argument("train: batch sizes must be positive");
    if (i > 0 && (schedule[i].first <= schedule[i - 1].first ||
                  schedule[i].second < schedule[i - 1].second))
      throw std::invalid_argument("train: batch schedule must be increasing");
  }
  return schedule;
}

void accumulate(UnrolledNet& total, const UnrolledNet& grads, double scale) {
  std::vector<std::vector<double>*> dst;
  std::vector<const std::vector<double>*> src;
  for_each_param(total, [&dst](std::vector<double>& p) { dst.push_back(&p); });
  for_each_param(grads, [&src](const std::vector<double>& p) { src.push_back(&p); });
  for (std::size_t a = 0; a < dst.size(); ++a)
    for (std::size_t i = 0; i < dst[a]->size(); ++i) (*dst[a])[i] += scale * (*src[a])[i];
}

/// Shared loop body; make_batch_op returns the operator and per-sample data
/// for one optimizer step.
template <typename BatchOp>
UnrolledNet run_training(UnrolledNet net, const std::vector<TrainSample>& samples,
                         const TrainConfig& cfg, TrainTrace* trace, BatchOp&& batch_op) {
  const auto schedule = resolve_schedule(cfg);
  AdamState state = AdamState::for_net(net);
  const int n = static_cast<int>(samples.size());
  double initial_loss = -1.0;
  int step = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(mix_seed(cfg.seed, kShuffleStream, static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(order);

    const int batch = std::min(batch_size_at(schedule, epoch), n);
    double epoch_sum = 0.0;
    int epoch_batches = 0;

    for (int begin = 0; begin < n; begin += batch, ++step) {
      const int count = std::min(batch, n - begin);
      const auto [op, rows] = batch_op(step);

      UnrolledNet grads =
          UnrolledNet::zeros(net.iterations, net.channels, net.segmentation_head, net.hidden);
      double batch_loss = 0.0;
      const double inv = 1.0 / static_cast<double>(count);

      for (int i = 0; i < count; ++i) {
        const TrainSample& s = samples[static_cast<std::size_t>(order[static_cast<std::size_t>(begin + i)])];
        const Sinogram f = rows.empty() ? s.data : select_rows(s.data, rows);

        LpdTape tape;
        const LpdOutput out = lpd_forward(net, *op, f, &tape);
        Image grad_recon, grad_seg;
        double loss;
        if (cfg.joint) {
          loss = loss_joint(out.reconstruction, out.segmentation, s.target, s.target_mask,
                            cfg.beta, &grad_recon, &grad_seg);
        } else {
          loss = loss_recon(out.reconstruction, s.target, &grad_recon);
        }
        batch_loss += loss * inv;
        const Image* gseg = (cfg.joint && cfg.beta > 0.0) ? &grad_seg : nullptr;
        const UnrolledNet g = lpd_backward(net, *op, tape, grad_recon, gseg);
        accumulate(grads, g, inv);
      }

      if (initial_loss < 0.0) initial_loss = batch_loss;
      if (batch_loss > 1e3 * initial_loss && batch_loss > 1e-12)
        throw std::runtime_error("train: diverged at step " + std::to_string(step) +
                                 " (loss " + std::to_string(batch_loss) + ")");

      adam_step(net, grads, state, cfg.learning_rate);
      if (trace != nullptr) {
        trace->step_epoch.push_back(epoch);
        trace->step_loss.push_back(batch_loss);
      }
      epoch_sum += batch_loss;
      epoch_batches += 1;
    }
    if (trace != nullptr)
      trace->epoch_loss.push_back(epoch_sum / static_cast<double>(epoch_batches));
  }
  return net;
}

}  // namespace

std::vector<std::pair<int, int>> default_batch_schedule(int epochs) {
  if (epochs <= 0) throw std::invalid_argument("default_batch_schedule: epochs must be positive");
  std::vector<std::pair<int, int>> schedule{{0, 2}};
  if (epochs / 3 > 0) schedule.emplace_back(epochs / 3, 6);
  if (2 * epochs / 3 > epochs / 3) schedule.emplace_back(2 * epochs / 3, 16);
  return schedule;
}

void TrainTrace::save_csv(const std::filesystem::path& path) const {
  std::string text = "step,epoch,loss\n";
  char line[96];
  for (std::size_t i = 0; i < step_loss.size(); ++i) {
    std::snprintf(line, sizeof line, "%zu,%d,%.9g\n", i, step_epoch[i], step_loss[i]);
    text += line;
  }
  io::write_text(path, text);
}

UnrolledNet train(UnrolledNet net, const AcousticOperator& op,
                  const std::vector<TrainSample>& samples, const TrainConfig& cfg,
                  TrainTrace* trace) {
  validate_config(cfg, net, samples);
  for (const auto& s : samples)
    if (s.data.n_det != op.detectors.count() || s.data.n_t != op.time.n_t)
      throw std::invalid_argument("train: sample sinogram does not match the operator");
  const std::vector<int> no_rows;
  return run_training(std::move(net), samples, cfg, trace,
                      [&op, &no_rows](int) { return std::make_pair(&op, no_rows); });
}

UnrolledNet train_random_detectors(UnrolledNet net, const AcousticOperator& full_op,
                                   int active_detectors,
                                   const std::vector<TrainSample>& samples,
                                   const TrainConfig& cfg, TrainTrace* trace) {
  validate_config(cfg, net, samples);
  const int n_det = full_op.detectors.count();
  if (active_detectors <= 0 || active_detectors > n_det)
    throw std::invalid_argument("train: active detector count out of range");
  for (const auto& s : samples)
    if (s.data.n_det != n_det || s.data.n_t != full_op.time.n_t)
      throw std::invalid_argument("train: sample sinogram does not match the full operator");

  // the sliced operator lives only for the duration of one step
  AcousticOperator batch_operator;
  auto make_batch = [&](int step) {
    Rng rng(mix_seed(cfg.seed, kDetectorStream, static_cast<std::uint64_t>(step)));
    std::vector<int> rows = rng.sample_without_replacement(n_det, active_detectors);
    batch_operator = select_detectors(full_op, rows);
    return std::make_pair(&batch_operator, rows);
  };
  return run_training(std::move(net), samples, cfg, trace, make_batch);
}

double select_threshold(const std::vector<Image>& outputs, const std::vector<Image>& gts) {
  if (outputs.empty() || outputs.size() != gts.size())
    throw std::invalid_argument("select_threshold: mismatched lists");

  std::vector<double> grid, mean_dice;
  for (int i = 1; i <= 99; ++i) grid.push_back(static_cast<double>(i) / 100.0);
  for (double t : grid) {
    double sum = 0.0;
    for (std::size_t s = 0; s < outputs.size(); ++s)
      sum += dice(threshold_image(outputs[s], t), gts[s]);
    mean_dice.push_back(sum / static_cast<double>(outputs.size()));
  }
  const double best = *std::max_element(mean_dice.begin(), mean_dice.end());
  std::size_t first = grid.size(), last = 0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (mean_dice[i] >= best - 1e-12) {
      first = std::min(first, i);
      last = i;
    }
  return 0.5 * (grid[first] + grid[last]);
}

Sinogram select_rows(const Sinogram& f, const std::vector<int>& indices) {
  Sinogram out(static_cast<int>(indices.size()), f.n_t, f.dt, f.t0);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const int d = indices[i];
    if (d < 0 || d >= f.n_det) throw std::out_of_range("select_rows: detector index");
    std::copy(f.row(d), f.row(d) + f.n_t, out.row(static_cast<int>(i)));
  }
  return out;
}

}  // namespace pat::nn
