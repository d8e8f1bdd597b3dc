#include "pat/harness/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pat/dataset.hpp"
#include "pat/eikonal.hpp"
#include "pat/fbp.hpp"
#include "pat/io.hpp"
#include "pat/metrics.hpp"
#include "pat/nn/lpd.hpp"
#include "pat/nn/train.hpp"
#include "pat/phantom.hpp"
#include "pat/png_io.hpp"
#include "pat/rng.hpp"
#include "pat/sino_io.hpp"
#include "pat/tv.hpp"

namespace pat::harness {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kReferenceDetectors = 64;
constexpr std::uint64_t kTrainSpecStream = 0x7ea1c0deULL;
constexpr std::uint64_t kTestSpecStream = 0x7e57c0deULL;
constexpr std::uint64_t kTrainNoiseStream = 0xa0153a11ULL;
constexpr std::uint64_t kTestNoiseStream = 0xa0153b22ULL;
constexpr std::uint64_t kNetStream = 0x0ddba11ULL;
constexpr std::uint64_t kLoopStream = 0x70a57e21ULL;

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_manifest(const fs::path& dir, const char* stage, const ExperimentConfig& cfg,
                    ordered_json extras) {
  ordered_json m;
  m["stage"] = stage;
  m["experiment"] = cfg.experiment;
  m["config"] = config_hash(cfg);
  m["seed"] = cfg.seed;
  for (auto& [key, value] : extras.items()) m[key] = value;
  io::write_text(dir / "manifest.json", m.dump(2) + "\n");
}

std::optional<ordered_json> read_manifest(const fs::path& dir) {
  const fs::path p = dir / "manifest.json";
  if (!fs::exists(p)) return std::nullopt;
  try {
    return ordered_json::parse(io::read_text(p));
  } catch (...) {
    return std::nullopt;
  }
}

bool manifest_current(const fs::path& dir, const char* stage, const ExperimentConfig& cfg) {
  const auto m = read_manifest(dir);
  return m.has_value() && m->value("stage", std::string()) == stage &&
         m->value("config", std::string()) == config_hash(cfg);
}

std::string file_hash(const fs::path& p) { return io::hex64(io::fnv1a(io::read_text(p))); }

void record_config(const ExperimentConfig& cfg, const RunPaths& paths) {
  fs::create_directories(paths.root);
  save_config(paths.root / "config.json", cfg);
}

std::vector<PhantomSpec> dataset_specs(const ExperimentConfig& cfg, int count,
                                       std::uint64_t stream) {
  const std::uint64_t seed = mix_seed(cfg.seed, stream);
  std::vector<PhantomSpec> specs = cfg.dataset.fluence_mix
                                       ? make_fluence_specs(count, seed)
                                       : make_class_specs(count, cfg.dataset.class_id, seed);
  for (PhantomSpec& s : specs) {
    s.class_id = cfg.dataset.class_id;
    s.vessel_count_lo = cfg.dataset.vessel_count_lo;
    s.vessel_count_hi = cfg.dataset.vessel_count_hi;
    s.width_lo = cfg.dataset.width_lo;
    s.width_hi = cfg.dataset.width_hi;
    if (!cfg.dataset.fluence_mix) s.illumination = parse_illumination(cfg.dataset.illumination);
  }
  return specs;
}

Sinogram scaled_sinogram(Sinogram f, double factor) {
  for (double& v : f.v) v *= factor;
  return f;
}

Image normalized_scores(const Image& u) {
  double lo = 1e300, hi = -1e300;
  for (double v : u.v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  Image out(u.nx, u.ny);
  const double span = hi - lo;
  if (span <= 0) return out;
  for (std::size_t i = 0; i < u.v.size(); ++i) out.v[i] = (u.v[i] - lo) / span;
  return out;
}

/// Pixels on the side of the image opposite the single lit boundary.
Image far_half_mask(const Illumination& il, int nx, int ny) {
  Image mask(nx, ny);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      bool far = false;
      if (il.left) far = ix >= nx / 2;
      if (il.right) far = ix < nx / 2;
      if (il.top) far = iy >= ny / 2;
      if (il.bottom) far = iy < ny / 2;
      mask.at(ix, iy) = far ? 1.0 : 0.0;
    }
  return mask;
}

std::string lit_side_name(const Illumination& il) {
  if (il.left) return "left";
  if (il.right) return "right";
  if (il.top) return "top";
  return "bottom";
}

struct LoadedSplit {
  std::vector<PhantomInstance> instances;
  std::vector<Sinogram> sinograms;
};

LoadedSplit load_split(const RunPaths& paths, const char* split, bool with_sinograms) {
  LoadedSplit out;
  const fs::path data_dir = paths.dataset_split(split);
  if (!fs::exists(data_dir))
    throw std::runtime_error("missing dataset split " + data_dir.string() +
                             " (run the phantom stage first)");
  out.instances = load_dataset(data_dir);
  if (!with_sinograms) return out;
  const fs::path sino_dir = paths.sino_split(split);
  for (std::size_t i = 0; i < out.instances.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "%04zu.pats", i);
    const fs::path p = sino_dir / name;
    if (!fs::exists(p))
      throw std::runtime_error("missing sinogram " + p.string() + " (run the simulate stage first)");
    out.sinograms.push_back(load_sinogram(p));
  }
  return out;
}

double noise_level_for(const ExperimentConfig& cfg, const PhantomInstance& inst) {
  if (cfg.simulate.noise == "none") return 0.0;
  if (cfg.simulate.noise == "fixed") return cfg.simulate.noise_level;
  return inst.noise_level;
}

}  // namespace

OperatorBundle build_operator(const ExperimentConfig& cfg) {
  validate(cfg);
  OperatorBundle b;
  b.grid = make_centered_grid(cfg.grid.n, cfg.grid.extent_mm);
  const double radius =
      cfg.geometry.radius_mm > 0 ? cfg.geometry.radius_mm : default_detector_radius(b.grid);
  const double span = cfg.geometry.span_deg * kPi / 180.0;
  const double start = cfg.geometry.start_deg * kPi / 180.0;
  const double c = cfg.geometry.sound_speed;
  b.detectors = make_uniform_detectors(b.grid, cfg.geometry.detectors, radius, span, start);
  b.time = make_default_time_axis(b.grid, b.detectors, c);

  if (cfg.simulate.speed.kind == "disk" ) {
    const SoundSpeedMap speed = SoundSpeedMap::two_region(
        b.grid, c, c + cfg.simulate.speed.delta, cfg.simulate.speed.center,
        cfg.simulate.speed.radius_mm);
    b.op = assemble(b.grid, b.detectors, b.time, eikonal_tof(speed, b.detectors, b.grid));
    b.tof_provenance = "eikonal";
  } else {
    b.op = assemble(b.grid, b.detectors, b.time, analytic_tof(b.grid, b.detectors, c));
    b.tof_provenance = "analytic";
  }

  // Shared normalization constant: the canonical full ring at this grid,
  // radius and sound speed. A run that already is that ring reuses its norm.
  if (cfg.geometry.detectors == kReferenceDetectors && cfg.geometry.span_deg == 360.0 &&
      b.tof_provenance == "analytic") {
    b.norm_ref = b.op.norm_estimate;
  } else {
    const DetectorArray ref_det =
        make_uniform_detectors(b.grid, kReferenceDetectors, radius, kTwoPi, 0.0);
    const TimeAxis ref_time = make_default_time_axis(b.grid, ref_det, c);
    const AcousticOperator ref_op =
        assemble(b.grid, ref_det, ref_time, analytic_tof(b.grid, ref_det, c));
    b.norm_ref = ref_op.norm_estimate;
  }

  b.lpd_op = b.op;
  const double s = 1.0 / b.norm_ref;
  for (double& v : b.lpd_op.k.val) v *= s;
  for (double& v : b.lpd_op.kt.val) v *= s;
  b.lpd_op.norm_estimate = b.op.norm_estimate * s;
  return b;
}

ImpulseKernel build_kernel(const ImpulseConfig& ic) {
  if (ic.kind == "gaussian") return gaussian_kernel(ic.sigma, ic.delay, ic.gain);
  return delta_kernel();
}

bool cmd_phantom(const ExperimentConfig& cfg, const RunPaths& paths) {
  validate(cfg);
  if (manifest_current(paths.dataset_root, "phantom", cfg)) {
    std::cout << "phantom: dataset up to date (" << paths.dataset_root.string() << ")\n";
    return false;
  }
  record_config(cfg, paths);
  const Grid2D grid = make_centered_grid(cfg.grid.n, cfg.grid.extent_mm);
  fs::remove_all(paths.dataset_split("train"));
  fs::remove_all(paths.dataset_split("test"));
  fs::create_directories(paths.dataset_root);

  if (cfg.dataset.train_count == 0)
    std::cerr << "phantom: warning: train_count is 0, train split left empty\n";
  else
    build_dataset(dataset_specs(cfg, cfg.dataset.train_count, kTrainSpecStream), grid,
                  Split::train, paths.dataset_split("train"));
  if (cfg.dataset.test_count == 0)
    std::cerr << "phantom: warning: test_count is 0, test split left empty\n";
  else
    build_dataset(dataset_specs(cfg, cfg.dataset.test_count, kTestSpecStream), grid, Split::test,
                  paths.dataset_split("test"));

  write_manifest(paths.dataset_root, "phantom", cfg,
                 {{"train_count", cfg.dataset.train_count},
                  {"test_count", cfg.dataset.test_count},
                  {"class_id", cfg.dataset.class_id},
                  {"fluence_mix", cfg.dataset.fluence_mix}});
  std::cout << "phantom: built " << cfg.dataset.train_count << " train / "
            << cfg.dataset.test_count << " test instances\n";
  return true;
}

bool cmd_simulate(const ExperimentConfig& cfg, const RunPaths& paths) {
  validate(cfg);
  if (manifest_current(paths.sino_dir(), "simulate", cfg)) {
    std::cout << "simulate: sinograms up to date (" << paths.sino_dir().string() << ")\n";
    return false;
  }
  record_config(cfg, paths);
  const OperatorBundle bundle = build_operator(cfg);
  const ImpulseKernel kernel = build_kernel(cfg.simulate.impulse);
  const bool with_kernel = cfg.simulate.impulse.kind != "delta";

  fs::remove_all(paths.sino_dir());
  const std::pair<const char*, std::uint64_t> splits[] = {{"train", kTrainNoiseStream},
                                                          {"test", kTestNoiseStream}};
  int total = 0;
  for (const auto& [split, stream] : splits) {
    if (!fs::exists(paths.dataset_split(split))) continue;
    const LoadedSplit data = load_split(paths, split, false);
    fs::create_directories(paths.sino_split(split));
    for (std::size_t i = 0; i < data.instances.size(); ++i) {
      const PhantomInstance& inst = data.instances[i];
      Sinogram f = bundle.op.apply(inst.initial_pressure);
      if (with_kernel) f = convolve_impulse(f, kernel);
      const double level = noise_level_for(cfg, inst);
      if (level > 0) f = add_noise(f, level, mix_seed(cfg.seed, stream, i));
      char name[32];
      std::snprintf(name, sizeof name, "%04zu.pats", i);
      save_sinogram(paths.sino_split(split) / name, f);
      ++total;
    }
  }
  write_manifest(paths.sino_dir(), "simulate", cfg,
                 {{"detectors", bundle.detectors.count()},
                  {"n_t", bundle.time.n_t},
                  {"dt", bundle.time.dt},
                  {"tof", bundle.tof_provenance},
                  {"impulse", cfg.simulate.impulse.kind},
                  {"noise", cfg.simulate.noise},
                  {"norm_ref", bundle.norm_ref},
                  {"count", total}});
  std::cout << "simulate: wrote " << total << " sinograms (" << bundle.tof_provenance
            << " travel times, " << bundle.detectors.count() << " detectors)\n";
  return true;
}

bool cmd_train(const ExperimentConfig& cfg, const RunPaths& paths) {
  validate(cfg);
  if (manifest_current(paths.model_dir(), "train", cfg) && fs::exists(paths.weights_file())) {
    std::cout << "train: model already complete for this configuration ("
              << paths.weights_file().string() << "); delete the model directory to retrain\n";
    return false;
  }
  record_config(cfg, paths);
  fs::remove_all(paths.model_dir());

  const LoadedSplit data = load_split(paths, "train", true);
  if (data.instances.empty()) throw std::runtime_error("train: the train split is empty");
  const OperatorBundle bundle = build_operator(cfg);

  std::vector<nn::TrainSample> samples;
  samples.reserve(data.instances.size());
  for (std::size_t i = 0; i < data.instances.size(); ++i) {
    nn::TrainSample s;
    s.data = scaled_sinogram(data.sinograms[i], 1.0 / bundle.norm_ref);
    s.target = data.instances[i].initial_pressure;
    s.target_mask = data.instances[i].segmentation;
    samples.push_back(std::move(s));
  }

  const NetworkShape shape = resolve_network(cfg.network);
  nn::UnrolledNet net = nn::init_net(shape.iterations, shape.channels, true,
                                     mix_seed(cfg.seed, kNetStream), shape.hidden);
  nn::TrainConfig tc;
  tc.epochs = cfg.train.epochs;
  tc.learning_rate = cfg.train.learning_rate;
  tc.joint = cfg.train.joint;
  tc.beta = cfg.train.beta;
  tc.seed = mix_seed(cfg.seed, kLoopStream);

  nn::TrainTrace trace;
  if (cfg.train.random_detectors > 0)
    net = nn::train_random_detectors(std::move(net), bundle.lpd_op, cfg.train.random_detectors,
                                     samples, tc, &trace);
  else
    net = nn::train(std::move(net), bundle.lpd_op, samples, tc, &trace);

  fs::create_directories(paths.model_dir());
  nn::save_net(net, paths.weights_file());
  trace.save_csv(paths.trace_file());
  write_manifest(paths.model_dir(), "train", cfg,
                 {{"epochs", cfg.train.epochs},
                  {"samples", samples.size()},
                  {"parameters", nn::parameter_count(net)},
                  {"final_epoch_loss", trace.epoch_loss.empty() ? 0.0 : trace.epoch_loss.back()},
                  {"weights_hash", file_hash(paths.weights_file())}});
  std::cout << "train: " << cfg.train.epochs << " epochs over " << samples.size()
            << " samples, final epoch loss "
            << (trace.epoch_loss.empty() ? 0.0 : trace.epoch_loss.back()) << "\n";
  return true;
}

bool cmd_evaluate(const ExperimentConfig& cfg, const RunPaths& paths) {
  validate(cfg);
  const auto wants = [&](const char* m) {
    return std::find(cfg.evaluate.methods.begin(), cfg.evaluate.methods.end(), m) !=
           cfg.evaluate.methods.end();
  };
  const bool wants_fbp = wants("fbp"), wants_tv = wants("tv"), wants_lpd = wants("lpd");

  const fs::path weights_path = cfg.evaluate.weights.empty()
                                    ? paths.weights_file()
                                    : fs::path(cfg.evaluate.weights);
  const bool have_weights = fs::exists(weights_path);
  const std::string weights_hash = have_weights ? file_hash(weights_path) : std::string();

  if (manifest_current(paths.eval_dir(), "evaluate", cfg)) {
    const auto m = read_manifest(paths.eval_dir());
    if (m->value("weights_hash", std::string()) == weights_hash) {
      std::cout << "evaluate: report up to date (" << paths.eval_dir().string() << ")\n";
      return false;
    }
  }
  record_config(cfg, paths);
  fs::remove_all(paths.eval_dir());
  fs::create_directories(paths.eval_dir());

  const LoadedSplit data = load_split(paths, "test", true);
  if (data.instances.empty()) throw std::runtime_error("evaluate: the test split is empty");
  const OperatorBundle bundle = build_operator(cfg);
  const ImpulseKernel kernel = build_kernel(cfg.simulate.impulse);
  const bool with_kernel = cfg.simulate.impulse.kind != "delta";

  std::vector<std::string> missing;
  nn::UnrolledNet net;
  bool run_lpd = wants_lpd;
  if (wants_lpd) {
    if (!have_weights) {
      missing.push_back("lpd: weights not found at " + weights_path.string());
      run_lpd = false;
    } else {
      net = nn::load_net(weights_path);
    }
  }

  const FbpReconstructor fbp = wants_fbp ? make_fbp_reconstructor(bundle.op) : FbpReconstructor{};

  struct MethodState {
    std::string name;
    std::vector<Image> recons;
    std::vector<Image> scores;
  };
  std::vector<MethodState> methods;
  if (wants_fbp) methods.push_back({"fbp", {}, {}});
  if (wants_tv) methods.push_back({"tv", {}, {}});
  if (run_lpd) methods.push_back({"lpd", {}, {}});

  for (std::size_t i = 0; i < data.instances.size(); ++i) {
    const PhantomInstance& inst = data.instances[i];
    const Image& gt = inst.initial_pressure;
    Sinogram f = data.sinograms[i];
    if (with_kernel) f = deconvolve_impulse(f, kernel, cfg.simulate.impulse.deconv_reg);

    for (MethodState& m : methods) {
      if (m.name == "fbp") {
        Image r = fbp.reconstruct(f);
        const double s = optimal_scale(r, gt);
        for (double& v : r.v) v *= s;
        m.scores.push_back(normalized_scores(r));
        m.recons.push_back(std::move(r));
      } else if (m.name == "tv") {
        Image r = tv_reconstruct(bundle.op, f, cfg.evaluate.tv_alphas, &gt,
                                 cfg.evaluate.tv_iters);
        m.scores.push_back(normalized_scores(r));
        m.recons.push_back(std::move(r));
      } else {
        const nn::LpdOutput out =
            nn::lpd_forward(net, bundle.lpd_op, scaled_sinogram(f, 1.0 / bundle.norm_ref));
        m.recons.push_back(out.reconstruction);
        m.scores.push_back(out.segmentation.v.empty() ? normalized_scores(out.reconstruction)
                                                      : out.segmentation);
      }
    }
  }

  // Per-method decision threshold, then the per-instance rows.
  std::vector<Image> gt_segs;
  for (const PhantomInstance& inst : data.instances) gt_segs.push_back(inst.segmentation);

  std::vector<EvalRow> rows;
  std::vector<MethodSummary> summaries;
  std::ostringstream far_csv;
  far_csv << "method,seed,side,auc_far\n";

  for (MethodState& m : methods) {
    const double threshold = nn::select_threshold(m.scores, gt_segs);
    MethodSummary sum;
    sum.method = m.name;
    sum.n_detectors = bundle.detectors.count();
    sum.threshold = threshold;
    for (std::size_t i = 0; i < data.instances.size(); ++i) {
      const PhantomInstance& inst = data.instances[i];
      EvalRow row;
      row.method = m.name;
      row.class_id = inst.spec.class_id;
      row.n_detectors = bundle.detectors.count();
      row.seed = inst.spec.seed;
      row.psnr_db = psnr(m.recons[i], inst.initial_pressure);
      row.auc = roc_auc(m.scores[i], inst.segmentation);
      row.dice = dice(threshold_image(m.scores[i], threshold), inst.segmentation);
      row.threshold = threshold;
      rows.push_back(row);
      sum.psnr_mean += row.psnr_db;
      sum.auc_mean += row.auc;
      sum.dice_mean += row.dice;
      ++sum.count;

      if (inst.spec.illumination.side_count() == 1 && !inst.spec.illumination.homogeneous) {
        const Image mask =
            far_half_mask(inst.spec.illumination, inst.segmentation.nx, inst.segmentation.ny);
        std::size_t far_pos = 0, far_neg = 0;
        for (std::size_t p = 0; p < mask.v.size(); ++p)
          if (mask.v[p] > 0.5) (inst.segmentation.v[p] > 0.5 ? far_pos : far_neg) += 1;
        if (far_pos > 0 && far_neg > 0) {
          const double auc_far = roc_auc_masked(m.scores[i], inst.segmentation, mask);
          far_csv << m.name << ',' << inst.spec.seed << ','
                  << lit_side_name(inst.spec.illumination) << ',' << fmt(auc_far) << '\n';
        }
      }
    }
    if (sum.count > 0) {
      sum.psnr_mean /= sum.count;
      sum.auc_mean /= sum.count;
      sum.dice_mean /= sum.count;
    }
    summaries.push_back(sum);
  }

  write_eval_csv(paths.eval_dir() / "rows.csv", rows);
  io::write_text(paths.eval_dir() / "far.csv", far_csv.str());

  std::ostringstream summary_csv;
  summary_csv << "method,n_detectors,count,psnr_mean,auc_mean,dice_mean,threshold,config\n";
  for (const MethodSummary& s : summaries)
    summary_csv << s.method << ',' << s.n_detectors << ',' << s.count << ',' << fmt(s.psnr_mean)
                << ',' << fmt(s.auc_mean) << ',' << fmt(s.dice_mean) << ',' << fmt(s.threshold)
                << ',' << config_hash(cfg) << '\n';
  io::write_text(paths.eval_dir() / "summary.csv", summary_csv.str());

  const int panels = std::min<int>(cfg.evaluate.panel_count,
                                   static_cast<int>(data.instances.size()));
  for (int i = 0; i < panels; ++i) {
    const Image& gt = data.instances[static_cast<std::size_t>(i)].initial_pressure;
    double lo = 0, hi = 1e-12;
    for (double v : gt.v) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    char name[64];
    std::snprintf(name, sizeof name, "%04d_gt.png", i);
    write_png_gray(paths.eval_dir() / "panels" / name, static_cast<std::size_t>(gt.nx),
                   static_cast<std::size_t>(gt.ny), gt.v, lo, hi);
    for (const MethodState& m : methods) {
      std::snprintf(name, sizeof name, "%04d_%s.png", i, m.name.c_str());
      const Image& r = m.recons[static_cast<std::size_t>(i)];
      write_png_gray(paths.eval_dir() / "panels" / name, static_cast<std::size_t>(r.nx),
                     static_cast<std::size_t>(r.ny), r.v, lo, hi);
      if (m.name == "lpd") {
        std::snprintf(name, sizeof name, "%04d_lpd_seg.png", i);
        const Image& s = m.scores[static_cast<std::size_t>(i)];
        write_png_gray(paths.eval_dir() / "panels" / name, static_cast<std::size_t>(s.nx),
                       static_cast<std::size_t>(s.ny), s.v, 0.0, 1.0);
      }
    }
  }

  write_manifest(paths.eval_dir(), "evaluate", cfg,
                 {{"methods", cfg.evaluate.methods},
                  {"weights", weights_path.string()},
                  {"weights_hash", weights_hash},
                  {"missing", missing},
                  {"instances", data.instances.size()}});
  std::cout << "evaluate: " << rows.size() << " rows over " << data.instances.size()
            << " instances";
  if (!missing.empty()) std::cout << " (" << missing.size() << " missing cells, see manifest)";
  std::cout << "\n";
  return true;
}

bool cmd_sweep(const ExperimentConfig& cfg, const RunPaths& paths) {
  validate(cfg);
  cmd_phantom(cfg, paths);

  std::ostringstream sweep_csv;
  sweep_csv << "method,n_detectors,count,psnr_mean,auc_mean,dice_mean,threshold,config\n";
  for (const int count : cfg.sweep_detectors) {
    ExperimentConfig sub = cfg;
    sub.geometry.detectors = count;
    char tag[16];
    std::snprintf(tag, sizeof tag, "d%03d", count);
    const RunPaths sub_paths(paths.sweep_dir() / tag, paths.dataset_root);
    sub.out = sub_paths.root.string();
    cmd_simulate(sub, sub_paths);
    cmd_train(sub, sub_paths);
    cmd_evaluate(sub, sub_paths);
    for (const MethodSummary& s : read_summary_csv(sub_paths.eval_dir() / "summary.csv"))
      sweep_csv << s.method << ',' << s.n_detectors << ',' << s.count << ',' << fmt(s.psnr_mean)
                << ',' << fmt(s.auc_mean) << ',' << fmt(s.dice_mean) << ',' << fmt(s.threshold)
                << ',' << config_hash(sub) << '\n';
  }
  fs::create_directories(paths.sweep_dir());
  io::write_text(paths.sweep_dir() / "sweep.csv", sweep_csv.str());
  std::cout << "sweep: aggregated " << cfg.sweep_detectors.size() << " detector counts into "
            << (paths.sweep_dir() / "sweep.csv").string() << "\n";
  return true;
}

std::vector<MethodSummary> read_summary_csv(const fs::path& path) {
  std::istringstream in(io::read_text(path));
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty summary csv: " + path.string());
  std::vector<MethodSummary> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    MethodSummary s;
    std::getline(ls, s.method, ',');
    std::getline(ls, field, ',');
    s.n_detectors = std::stoi(field);
    std::getline(ls, field, ',');
    s.count = std::stoi(field);
    std::getline(ls, field, ',');
    s.psnr_mean = std::stod(field);
    std::getline(ls, field, ',');
    s.auc_mean = std::stod(field);
    std::getline(ls, field, ',');
    s.dice_mean = std::stod(field);
    std::getline(ls, field, ',');
    s.threshold = std::stod(field);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace pat::harness
