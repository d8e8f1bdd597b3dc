#include "pat/harness/config.hpp"

#include <algorithm>
#include <initializer_list>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "pat/io.hpp"

namespace pat::harness {

namespace {

using nlohmann::ordered_json;

void expect_keys(const ordered_json& j, const char* where,
                 std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw std::invalid_argument(std::string("config: ") + where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const bool known = std::any_of(keys.begin(), keys.end(),
                                   [&](const char* k) { return it.key() == k; });
    if (!known)
      throw std::invalid_argument("config: unknown key \"" + it.key() + "\" in " + where);
  }
}

template <typename T>
void read_field(const ordered_json& j, const char* where, const char* key, T& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const ordered_json::exception&) {
    throw std::invalid_argument(std::string("config: bad value for \"") + key + "\" in " + where);
  }
}

void read_pair(const ordered_json& j, const char* where, const char* key, int& lo, int& hi) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_array() || it->size() != 2)
    throw std::invalid_argument(std::string("config: \"") + key + "\" in " + where +
                                " must be a [lo, hi] pair");
  lo = (*it)[0].get<int>();
  hi = (*it)[1].get<int>();
}

ordered_json grid_json(const GridConfig& g) {
  return {{"n", g.n}, {"extent_mm", g.extent_mm}};
}

ordered_json geometry_json(const GeometryConfig& g) {
  return {{"detectors", g.detectors},
          {"radius_mm", g.radius_mm},
          {"span_deg", g.span_deg},
          {"start_deg", g.start_deg},
          {"sound_speed", g.sound_speed}};
}

ordered_json dataset_json(const DatasetConfig& d) {
  return {{"train_count", d.train_count},
          {"test_count", d.test_count},
          {"class_id", d.class_id},
          {"fluence_mix", d.fluence_mix},
          {"illumination", d.illumination},
          {"vessel_count", {d.vessel_count_lo, d.vessel_count_hi}},
          {"width", {d.width_lo, d.width_hi}}};
}

ordered_json simulate_json(const SimulateConfig& s) {
  return {{"noise", s.noise},
          {"noise_level", s.noise_level},
          {"speed",
           {{"kind", s.speed.kind},
            {"delta", s.speed.delta},
            {"radius_mm", s.speed.radius_mm},
            {"center", {s.speed.center[0], s.speed.center[1]}}}},
          {"impulse",
           {{"kind", s.impulse.kind},
            {"sigma", s.impulse.sigma},
            {"delay", s.impulse.delay},
            {"gain", s.impulse.gain},
            {"deconv_reg", s.impulse.deconv_reg}}}};
}

ordered_json network_json(const NetworkConfig& n) {
  return {{"size", n.size},
          {"iterations", n.iterations},
          {"channels", n.channels},
          {"hidden", n.hidden}};
}

ordered_json train_json(const TrainStageConfig& t) {
  return {{"epochs", t.epochs},
          {"learning_rate", t.learning_rate},
          {"joint", t.joint},
          {"beta", t.beta},
          {"random_detectors", t.random_detectors}};
}

ordered_json evaluate_json(const EvaluateConfig& e) {
  return {{"methods", e.methods},
          {"tv_alphas", e.tv_alphas},
          {"tv_iters", e.tv_iters},
          {"panel_count", e.panel_count},
          {"weights", e.weights}};
}

}  // namespace

NetworkShape resolve_network(const NetworkConfig& net) {
  if (net.size == "small") return {5, 2, net.hidden};
  if (net.size == "large") return {10, 5, net.hidden};
  if (net.size == "custom") return {net.iterations, net.channels, net.hidden};
  throw std::invalid_argument("config: network.size must be small, large or custom");
}

std::string config_to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["experiment"] = cfg.experiment;
  j["seed"] = cfg.seed;
  j["out"] = cfg.out;
  j["grid"] = grid_json(cfg.grid);
  j["geometry"] = geometry_json(cfg.geometry);
  j["dataset"] = dataset_json(cfg.dataset);
  j["simulate"] = simulate_json(cfg.simulate);
  j["network"] = network_json(cfg.network);
  j["train"] = train_json(cfg.train);
  j["evaluate"] = evaluate_json(cfg.evaluate);
  j["sweep"] = ordered_json{{"detectors", cfg.sweep_detectors}};
  return j.dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
  }
  expect_keys(j, "the top level",
              {"experiment", "seed", "out", "grid", "geometry", "dataset", "simulate", "network",
               "train", "evaluate", "sweep"});

  ExperimentConfig cfg;
  read_field(j, "the top level", "experiment", cfg.experiment);
  read_field(j, "the top level", "seed", cfg.seed);
  read_field(j, "the top level", "out", cfg.out);

  if (j.contains("grid")) {
    const auto& g = j["grid"];
    expect_keys(g, "grid", {"n", "extent_mm"});
    read_field(g, "grid", "n", cfg.grid.n);
    read_field(g, "grid", "extent_mm", cfg.grid.extent_mm);
  }
  if (j.contains("geometry")) {
    const auto& g = j["geometry"];
    expect_keys(g, "geometry", {"detectors", "radius_mm", "span_deg", "start_deg", "sound_speed"});
    read_field(g, "geometry", "detectors", cfg.geometry.detectors);
    read_field(g, "geometry", "radius_mm", cfg.geometry.radius_mm);
    read_field(g, "geometry", "span_deg", cfg.geometry.span_deg);
    read_field(g, "geometry", "start_deg", cfg.geometry.start_deg);
    read_field(g, "geometry", "sound_speed", cfg.geometry.sound_speed);
  }
  if (j.contains("dataset")) {
    const auto& d = j["dataset"];
    expect_keys(d, "dataset",
                {"train_count", "test_count", "class_id", "fluence_mix", "illumination",
                 "vessel_count", "width"});
    read_field(d, "dataset", "train_count", cfg.dataset.train_count);
    read_field(d, "dataset", "test_count", cfg.dataset.test_count);
    read_field(d, "dataset", "class_id", cfg.dataset.class_id);
    read_field(d, "dataset", "fluence_mix", cfg.dataset.fluence_mix);
    read_field(d, "dataset", "illumination", cfg.dataset.illumination);
    read_pair(d, "dataset", "vessel_count", cfg.dataset.vessel_count_lo,
              cfg.dataset.vessel_count_hi);
    read_pair(d, "dataset", "width", cfg.dataset.width_lo, cfg.dataset.width_hi);
  }
  if (j.contains("simulate")) {
    const auto& s = j["simulate"];
    expect_keys(s, "simulate", {"noise", "noise_level", "speed", "impulse"});
    read_field(s, "simulate", "noise", cfg.simulate.noise);
    read_field(s, "simulate", "noise_level", cfg.simulate.noise_level);
    if (s.contains("speed")) {
      const auto& sp = s["speed"];
      expect_keys(sp, "simulate.speed", {"kind", "delta", "radius_mm", "center"});
      read_field(sp, "simulate.speed", "kind", cfg.simulate.speed.kind);
      read_field(sp, "simulate.speed", "delta", cfg.simulate.speed.delta);
      read_field(sp, "simulate.speed", "radius_mm", cfg.simulate.speed.radius_mm);
      if (sp.contains("center")) {
        const auto& c = sp["center"];
        if (!c.is_array() || c.size() != 2)
          throw std::invalid_argument("config: simulate.speed.center must be [x, y]");
        cfg.simulate.speed.center = {c[0].get<double>(), c[1].get<double>()};
      }
    }
    if (s.contains("impulse")) {
      const auto& im = s["impulse"];
      expect_keys(im, "simulate.impulse", {"kind", "sigma", "delay", "gain", "deconv_reg"});
      read_field(im, "simulate.impulse", "kind", cfg.simulate.impulse.kind);
      read_field(im, "simulate.impulse", "sigma", cfg.simulate.impulse.sigma);
      read_field(im, "simulate.impulse", "delay", cfg.simulate.impulse.delay);
      read_field(im, "simulate.impulse", "gain", cfg.simulate.impulse.gain);
      read_field(im, "simulate.impulse", "deconv_reg", cfg.simulate.impulse.deconv_reg);
    }
  }
  if (j.contains("network")) {
    const auto& n = j["network"];
    expect_keys(n, "network", {"size", "iterations", "channels", "hidden"});
    read_field(n, "network", "size", cfg.network.size);
    read_field(n, "network", "iterations", cfg.network.iterations);
    read_field(n, "network", "channels", cfg.network.channels);
    read_field(n, "network", "hidden", cfg.network.hidden);
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    expect_keys(t, "train", {"epochs", "learning_rate", "joint", "beta", "random_detectors"});
    read_field(t, "train", "epochs", cfg.train.epochs);
    read_field(t, "train", "learning_rate", cfg.train.learning_rate);
    read_field(t, "train", "joint", cfg.train.joint);
    read_field(t, "train", "beta", cfg.train.beta);
    read_field(t, "train", "random_detectors", cfg.train.random_detectors);
  }
  if (j.contains("evaluate")) {
    const auto& e = j["evaluate"];
    expect_keys(e, "evaluate", {"methods", "tv_alphas", "tv_iters", "panel_count", "weights"});
    read_field(e, "evaluate", "methods", cfg.evaluate.methods);
    read_field(e, "evaluate", "tv_alphas", cfg.evaluate.tv_alphas);
    read_field(e, "evaluate", "tv_iters", cfg.evaluate.tv_iters);
    read_field(e, "evaluate", "panel_count", cfg.evaluate.panel_count);
    read_field(e, "evaluate", "weights", cfg.evaluate.weights);
  }
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    expect_keys(s, "sweep", {"detectors"});
    read_field(s, "sweep", "detectors", cfg.sweep_detectors);
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return config_from_json(io::read_text(path));
}

void save_config(const std::filesystem::path& path, const ExperimentConfig& cfg) {
  io::write_text(path, config_to_json(cfg));
}

std::string config_hash(const ExperimentConfig& cfg) {
  // Location fields do not change what a run computes, so two copies of the
  // same experiment in different directories share a hash. Weight *content*
  // is tracked separately where it matters (the evaluation manifest).
  ExperimentConfig canon = cfg;
  canon.out.clear();
  canon.evaluate.weights.clear();
  return io::hex64(io::fnv1a(config_to_json(canon)));
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig cfg;
  if (name == "desk") {
    cfg.experiment = "desk";
    cfg.out = "runs/desk";
    cfg.dataset.fluence_mix = true;
    return cfg;
  }
  if (name == "desk-classes") {
    cfg.experiment = "desk-classes";
    cfg.out = "runs/desk-classes";
    cfg.dataset.fluence_mix = false;
    cfg.train.joint = false;
    cfg.evaluate.methods = {"lpd"};
    return cfg;
  }
  if (name == "tiny") {
    cfg.experiment = "tiny";
    cfg.out = "runs/tiny";
    cfg.dataset.fluence_mix = true;
    cfg.dataset.train_count = 12;
    cfg.dataset.test_count = 6;
    cfg.geometry.detectors = 16;
    cfg.network.hidden = 8;
    cfg.train.epochs = 5;
    cfg.evaluate.tv_iters = 120;
    cfg.evaluate.panel_count = 2;
    cfg.sweep_detectors = {8, 16};
    return cfg;
  }
  std::string known;
  for (const std::string& p : preset_names()) known += (known.empty() ? "" : ", ") + p;
  throw std::invalid_argument("unknown preset \"" + name + "\" (known: " + known + ")");
}

std::vector<std::string> preset_names() { return {"desk", "desk-classes", "tiny"}; }

void validate(const ExperimentConfig& cfg) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (cfg.grid.n < 8) fail("grid.n must be at least 8");
  if (!(cfg.grid.extent_mm > 0)) fail("grid.extent_mm must be positive");
  if (cfg.geometry.detectors < 1) fail("geometry.detectors must be at least 1");
  if (!(cfg.geometry.span_deg > 0) || cfg.geometry.span_deg > 360)
    fail("geometry.span_deg must be in (0, 360]");
  if (!(cfg.geometry.sound_speed > 0)) fail("geometry.sound_speed must be positive");
  if (cfg.geometry.radius_mm < 0) fail("geometry.radius_mm must be nonnegative");
  if (cfg.dataset.train_count < 0 || cfg.dataset.test_count < 0) fail("dataset counts must be nonnegative");
  if (cfg.dataset.class_id < 0 || cfg.dataset.class_id > 7) fail("dataset.class_id must be 0..7");
  if (cfg.dataset.vessel_count_lo < 1 || cfg.dataset.vessel_count_hi < cfg.dataset.vessel_count_lo)
    fail("dataset.vessel_count must be an increasing pair of positive counts");
  if (cfg.dataset.width_lo < 1 || cfg.dataset.width_hi < cfg.dataset.width_lo)
    fail("dataset.width must be an increasing pair of widths of at least one pixel");
  if (cfg.simulate.noise != "class" && cfg.simulate.noise != "none" && cfg.simulate.noise != "fixed")
    fail("simulate.noise must be class, none or fixed");
  if (cfg.simulate.noise_level < 0) fail("simulate.noise_level must be nonnegative");
  if (cfg.simulate.speed.kind != "uniform" && cfg.simulate.speed.kind != "disk")
    fail("simulate.speed.kind must be uniform or disk");
  if (!(cfg.simulate.speed.radius_mm > 0)) fail("simulate.speed.radius_mm must be positive");
  if (cfg.simulate.impulse.kind != "delta" && cfg.simulate.impulse.kind != "gaussian")
    fail("simulate.impulse.kind must be delta or gaussian");
  if (cfg.simulate.impulse.kind == "gaussian" && !(cfg.simulate.impulse.sigma > 0))
    fail("simulate.impulse.sigma must be positive");
  if (!(cfg.simulate.impulse.deconv_reg > 0)) fail("simulate.impulse.deconv_reg must be positive");
  const NetworkShape shape = resolve_network(cfg.network);
  if (shape.iterations < 1 || shape.channels < 1 || shape.hidden < 1)
    fail("network shape must be positive in every dimension");
  if (shape.channels < 2) fail("network needs at least two channels for the segmentation output");
  if (cfg.train.epochs < 1) fail("train.epochs must be at least 1");
  if (!(cfg.train.learning_rate > 0)) fail("train.learning_rate must be positive");
  if (cfg.train.beta < 0) fail("train.beta must be nonnegative");
  if (cfg.train.random_detectors < 0 || cfg.train.random_detectors > cfg.geometry.detectors)
    fail("train.random_detectors must be between 0 and geometry.detectors");
  for (const std::string& m : cfg.evaluate.methods)
    if (m != "fbp" && m != "tv" && m != "lpd") fail("evaluate.methods entries must be fbp, tv or lpd");
  if (cfg.evaluate.methods.empty()) fail("evaluate.methods must not be empty");
  const bool wants_tv = std::any_of(cfg.evaluate.methods.begin(), cfg.evaluate.methods.end(),
                                    [](const std::string& m) { return m == "tv"; });
  if (wants_tv && cfg.evaluate.tv_alphas.empty()) fail("evaluate.tv_alphas must not be empty");
  for (const double a : cfg.evaluate.tv_alphas)
    if (!(a > 0)) fail("evaluate.tv_alphas must be positive");
  if (cfg.evaluate.tv_iters < 1) fail("evaluate.tv_iters must be at least 1");
  if (cfg.evaluate.panel_count < 0) fail("evaluate.panel_count must be nonnegative");
  if (cfg.sweep_detectors.empty()) fail("sweep.detectors must not be empty");
  for (const int d : cfg.sweep_detectors)
    if (d < 1) fail("sweep.detectors entries must be positive");
}

}  // namespace pat::harness
