#include "pat/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"
#include "pat/fluence.hpp"
#include "pat/io.hpp"
#include "pat/png_io.hpp"
#include "pat/rng.hpp"

namespace pat {

namespace {

constexpr std::uint64_t kSpecStream = 0x5bec1d5ULL;
constexpr std::uint64_t kOpticsStream = 0x0b71c5ULL;
constexpr std::uint64_t kIllumStream = 0x111f3aULL;

}  // namespace

PhantomInstance make_instance(const PhantomSpec& spec, const Grid2D& grid) {
  validate(spec);
  const Image mask = generate_vessels(spec, grid);
  ClassTransformResult ct = apply_class_transform(mask, spec.class_id, spec.seed);

  PhantomInstance inst;
  inst.spec = spec;
  inst.noise_level = ct.noise_level;
  inst.segmentation = std::move(ct.segmentation);

  const Optics& o = spec.optics;
  inst.absorption = Image(grid.nx, grid.ny);
  Image scattering(grid.nx, grid.ny);
  for (std::size_t i = 0; i < inst.absorption.size(); ++i) {
    inst.absorption.v[i] = o.bg_mu_a + ct.intensity.v[i] * (o.vessel_mu_a - o.bg_mu_a);
    scattering.v[i] = inst.segmentation.v[i] > 0.5 ? o.vessel_mu_sp : o.bg_mu_sp;
  }

  inst.fluence =
      fluence_solve(inst.absorption, scattering, spec.illumination, grid, &inst.fluence_residual);

  inst.initial_pressure = Image(grid.nx, grid.ny);
  for (std::size_t i = 0; i < inst.initial_pressure.size(); ++i)
    inst.initial_pressure.v[i] = ct.intensity.v[i] * inst.fluence.v[i];
  return inst;
}

std::vector<PhantomSpec> make_class_specs(int count, int class_id, std::uint64_t seed) {
  std::vector<PhantomSpec> specs;
  specs.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    PhantomSpec spec;
    spec.seed = mix_seed(seed, kSpecStream, static_cast<std::uint64_t>(i));
    spec.class_id = class_id;
    specs.push_back(spec);
  }
  return specs;
}

std::vector<PhantomSpec> make_fluence_specs(int count, std::uint64_t seed) {
  std::vector<PhantomSpec> specs = make_class_specs(count, 0, seed);
  for (int i = 0; i < count; ++i) {
    auto& illum = specs[static_cast<std::size_t>(i)].illumination;
    if (i % 4 == 0) continue;  // one in four keeps homogeneous fluence
    illum.homogeneous = false;
    Rng rng(mix_seed(specs[static_cast<std::size_t>(i)].seed, kIllumStream));
    if (i % 4 == 1) {
      const int side = rng.uniform_int(0, 3);
      illum.left = side == 0;
      illum.right = side == 1;
      illum.top = side == 2;
      illum.bottom = side == 3;
    } else if (i % 4 == 2) {
      const int first = rng.uniform_int(0, 3);
      int second = rng.uniform_int(0, 2);
      if (second >= first) ++second;
      for (int side : {first, second}) {
        if (side == 0) illum.left = true;
        if (side == 1) illum.right = true;
        if (side == 2) illum.top = true;
        if (side == 3) illum.bottom = true;
      }
    } else {
      illum.left = illum.right = illum.top = illum.bottom = true;
    }
  }
  return specs;
}

void save_pati(const std::filesystem::path& path, const Image& image, std::uint32_t channel) {
  auto os = io::open_out(path);
  io::Writer w(os);
  w.magic("PATI");
  w.u32(static_cast<std::uint32_t>(image.nx));
  w.u32(static_cast<std::uint32_t>(image.ny));
  w.u32(channel);
  w.f32_array(image.v);
}

Image load_pati(const std::filesystem::path& path, std::uint32_t* channel) {
  auto is = io::open_in(path);
  io::Reader r(is);
  r.expect_magic("PATI");
  const auto nx = r.u32();
  const auto ny = r.u32();
  const auto tag = r.u32();
  if (channel) *channel = tag;
  if (nx == 0 || ny == 0 || nx > 1u << 16 || ny > 1u << 16)
    throw std::runtime_error("corrupt grid header in " + path.string());
  Image out(static_cast<int>(nx), static_cast<int>(ny));
  out.v = r.f32_array(out.size());
  return out;
}

namespace {

nlohmann::ordered_json spec_to_json(const PhantomInstance& inst) {
  const PhantomSpec& s = inst.spec;
  nlohmann::ordered_json j;
  j["seed"] = s.seed;
  j["class_id"] = s.class_id;
  j["vessel_count"] = {s.vessel_count_lo, s.vessel_count_hi};
  j["width"] = {s.width_lo, s.width_hi};
  j["optics"] = {{"vessel_mu_a", s.optics.vessel_mu_a},
                 {"vessel_mu_sp", s.optics.vessel_mu_sp},
                 {"background_mu_a", s.optics.bg_mu_a},
                 {"background_mu_sp", s.optics.bg_mu_sp}};
  j["illumination"] = illumination_to_string(s.illumination);
  j["noise_level"] = inst.noise_level;
  j["fluence_residual"] = inst.fluence_residual;
  return j;
}

void spec_from_json(const nlohmann::json& j, PhantomInstance& inst) {
  PhantomSpec& s = inst.spec;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.class_id = j.at("class_id").get<int>();
  s.vessel_count_lo = j.at("vessel_count").at(0).get<int>();
  s.vessel_count_hi = j.at("vessel_count").at(1).get<int>();
  s.width_lo = j.at("width").at(0).get<int>();
  s.width_hi = j.at("width").at(1).get<int>();
  const auto& o = j.at("optics");
  s.optics.vessel_mu_a = o.at("vessel_mu_a").get<double>();
  s.optics.vessel_mu_sp = o.at("vessel_mu_sp").get<double>();
  s.optics.bg_mu_a = o.at("background_mu_a").get<double>();
  s.optics.bg_mu_sp = o.at("background_mu_sp").get<double>();
  s.illumination = parse_illumination(j.at("illumination").get<std::string>());
  inst.noise_level = j.at("noise_level").get<double>();
  inst.fluence_residual = j.at("fluence_residual").get<double>();
}

}  // namespace

void save_instance(const std::filesystem::path& dir, const PhantomInstance& inst) {
  std::filesystem::create_directories(dir);
  save_pati(dir / "absorption.pati", inst.absorption, kChannelAbsorption);
  save_pati(dir / "fluence.pati", inst.fluence, kChannelFluence);
  save_pati(dir / "initial_pressure.pati", inst.initial_pressure, kChannelPressure);
  save_pati(dir / "segmentation.pati", inst.segmentation, kChannelSegmentation);
  io::write_text(dir / "spec.json", spec_to_json(inst).dump(2) + "\n");

  const auto nx = static_cast<std::size_t>(inst.absorption.nx);
  const auto ny = static_cast<std::size_t>(inst.absorption.ny);
  write_png_gray(dir / "absorption.png", nx, ny, inst.absorption.v, 0.0,
                 std::max(1e-12, max_value(inst.absorption.v)));
  write_png_gray(dir / "fluence.png", nx, ny, inst.fluence.v, 0.0, 1.0);
  write_png_gray(dir / "initial_pressure.png", nx, ny, inst.initial_pressure.v, 0.0,
                 std::max(1e-12, max_value(inst.initial_pressure.v)));
  write_png_gray(dir / "segmentation.png", nx, ny, inst.segmentation.v, 0.0, 1.0);
}

PhantomInstance load_instance(const std::filesystem::path& dir) {
  PhantomInstance inst;
  std::uint32_t tag = 0;
  inst.absorption = load_pati(dir / "absorption.pati", &tag);
  if (tag != kChannelAbsorption) throw std::runtime_error("wrong channel tag in absorption grid");
  inst.fluence = load_pati(dir / "fluence.pati", &tag);
  if (tag != kChannelFluence) throw std::runtime_error("wrong channel tag in fluence grid");
  inst.initial_pressure = load_pati(dir / "initial_pressure.pati", &tag);
  if (tag != kChannelPressure) throw std::runtime_error("wrong channel tag in pressure grid");
  inst.segmentation = load_pati(dir / "segmentation.pati", &tag);
  if (tag != kChannelSegmentation)
    throw std::runtime_error("wrong channel tag in segmentation grid");
  spec_from_json(nlohmann::json::parse(io::read_text(dir / "spec.json")), inst);
  return inst;
}

std::vector<PhantomInstance> build_dataset(const std::vector<PhantomSpec>& specs,
                                           const Grid2D& grid, Split split,
                                           const std::filesystem::path& out_dir) {
  if (specs.empty()) throw std::invalid_argument("build_dataset: no specs");
  std::vector<PhantomInstance> instances;
  instances.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    PhantomSpec spec = specs[i];
    if (split == Split::test) {
      spec.optics = Optics{};
    } else {
      Rng rng(mix_seed(spec.seed, kOpticsStream));
      spec.optics = Optics{};
      spec.optics.vessel_mu_a = rng.uniform(0.20, 0.60);
      spec.optics.bg_mu_sp = rng.uniform(0.50, 2.00);
    }
    char name[8];
    std::snprintf(name, sizeof(name), "%04zu", i);
    PhantomInstance inst = make_instance(spec, grid);
    save_instance(out_dir / name, inst);
    instances.push_back(std::move(inst));
  }
  return instances;
}

std::vector<PhantomInstance> load_dataset(const std::filesystem::path& root) {
  std::vector<std::filesystem::path> dirs;
  if (std::filesystem::is_directory(root))
    for (const auto& entry : std::filesystem::directory_iterator(root))
      if (entry.is_directory() && std::filesystem::exists(entry.path() / "spec.json"))
        dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  std::vector<PhantomInstance> out;
  out.reserve(dirs.size());
  for (const auto& dir : dirs) out.push_back(load_instance(dir));
  return out;
}

}  // namespace pat
