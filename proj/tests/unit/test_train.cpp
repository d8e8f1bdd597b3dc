#include <cmath>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "pat/io.hpp"
#include "pat/nn/train.hpp"
#include "pat/rng.hpp"

namespace fs = std::filesystem;
using namespace pat;
using namespace pat::nn;

namespace {

AcousticOperator small_op(int n, int n_det) {
  const Grid2D g = make_centered_grid(n, 8.0);
  const auto det = make_uniform_detectors(g, n_det, default_detector_radius(g), kTwoPi, 0.0);
  const auto time = make_default_time_axis(g, det, 1.5);
  return assemble(g, det, time, analytic_tof(g, det, 1.5));
}

TrainSample make_sample(const AcousticOperator& op, std::uint64_t seed) {
  TrainSample s;
  const int n = op.grid.nx;
  s.target = Image(n, n);
  s.target_mask = Image(n, n);
  Rng rng(seed);
  const int cx = rng.uniform_int(n / 3, 2 * n / 3);
  const int cy = rng.uniform_int(n / 3, 2 * n / 3);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const double d2 = (ix - cx) * (ix - cx) + (iy - cy) * (iy - cy);
      if (d2 <= 4.0) {
        s.target.at(ix, iy) = 1.0;
        s.target_mask.at(ix, iy) = 1.0;
      }
    }
  s.data = op.apply(s.target);
  return s;
}

}  // namespace

TEST_SUITE("train") {
  TEST_CASE("default batch schedule ramps in thirds") {
    const auto s = default_batch_schedule(200);
    REQUIRE(s.size() == 3);
    CHECK(s[0] == std::pair{0, 2});
    CHECK(s[1] == std::pair{66, 6});
    CHECK(s[2] == std::pair{133, 16});
    CHECK(default_batch_schedule(1).size() == 1);
  }

  TEST_CASE("overfits a single sample") {
    const auto op = small_op(12, 4);
    const std::vector<TrainSample> data{make_sample(op, 5)};
    TrainConfig cfg;
    cfg.epochs = 200;
    cfg.seed = 3;
    TrainTrace trace;
    (void)train(init_net(2, 2, false, 12), op, data, cfg, &trace);
    REQUIRE(trace.step_loss.size() == 200);
    const double initial = trace.step_loss.front();
    double final_min = initial;
    for (double l : trace.step_loss) final_min = std::min(final_min, l);
    CHECK(trace.step_loss.back() <= initial / 100.0);
    CHECK(final_min <= initial / 100.0);
  }

  TEST_CASE("training is bit-reproducible") {
    const auto op = small_op(12, 4);
    std::vector<TrainSample> data;
    for (std::uint64_t i = 0; i < 5; ++i) data.push_back(make_sample(op, 10 + i));
    TrainConfig cfg;
    cfg.epochs = 4;
    cfg.seed = 77;
    TrainTrace t1, t2;
    const UnrolledNet a = train(init_net(2, 2, false, 13, 8), op, data, cfg, &t1);
    const UnrolledNet b = train(init_net(2, 2, false, 13, 8), op, data, cfg, &t2);
    CHECK(t1.step_loss == t2.step_loss);
    std::vector<const std::vector<double>*> pa, pb;
    for_each_param(a, [&pa](const std::vector<double>& p) { pa.push_back(&p); });
    for_each_param(b, [&pb](const std::vector<double>& p) { pb.push_back(&p); });
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(*pa[i] == *pb[i]);
  }

  TEST_CASE("joint loss with zero beta reproduces the plain trace bitwise") {
    const auto op = small_op(12, 4);
    std::vector<TrainSample> data;
    for (std::uint64_t i = 0; i < 3; ++i) data.push_back(make_sample(op, 20 + i));
    TrainConfig recon_cfg;
    recon_cfg.epochs = 3;
    recon_cfg.seed = 5;
    TrainConfig joint_cfg = recon_cfg;
    joint_cfg.joint = true;
    joint_cfg.beta = 0.0;

    TrainTrace tr, tj;
    const UnrolledNet a = train(init_net(2, 2, true, 31, 8), op, data, recon_cfg, &tr);
    const UnrolledNet b = train(init_net(2, 2, true, 31, 8), op, data, joint_cfg, &tj);
    CHECK(tr.step_loss == tj.step_loss);
    std::vector<const std::vector<double>*> pa, pb;
    for_each_param(a, [&pa](const std::vector<double>& p) { pa.push_back(&p); });
    for_each_param(b, [&pb](const std::vector<double>& p) { pb.push_back(&p); });
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(*pa[i] == *pb[i]);
  }

  TEST_CASE("joint training moves the segmentation head") {
    const auto op = small_op(12, 4);
    std::vector<TrainSample> data;
    for (std::uint64_t i = 0; i < 3; ++i) data.push_back(make_sample(op, 30 + i));
    TrainConfig cfg;
    cfg.epochs = 10;
    cfg.joint = true;
    cfg.beta = 0.5;
    cfg.seed = 6;
    TrainTrace trace;
    const UnrolledNet net = train(init_net(2, 2, true, 41, 8), op, data, cfg, &trace);
    CHECK(trace.epoch_loss.back() < trace.epoch_loss.front());
    const LpdOutput out = lpd_forward(net, op, data[0].data);
    bool moved = false;
    for (double s : out.segmentation.v)
      if (std::abs(s - 0.5) > 1e-3) moved = true;
    CHECK(moved);
  }

  TEST_CASE("divergence aborts") {
    const auto op = small_op(12, 4);
    const std::vector<TrainSample> data{make_sample(op, 40)};
    TrainConfig cfg;
    cfg.epochs = 400;
    cfg.learning_rate = 30.0;  // grossly unstable on purpose
    cfg.seed = 7;
    CHECK_THROWS_AS((void)train(init_net(2, 2, false, 51, 8), op, data, cfg, nullptr),
                    std::runtime_error);
  }

  TEST_CASE("random-detector batches see different subsets deterministically") {
    const auto full = small_op(12, 12);
    std::vector<TrainSample> data;
    for (std::uint64_t i = 0; i < 4; ++i) data.push_back(make_sample(full, 50 + i));
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.seed = 8;
    TrainTrace t1, t2;
    const UnrolledNet a =
        train_random_detectors(init_net(2, 2, false, 61, 8), full, 4, data, cfg, &t1);
    const UnrolledNet b =
        train_random_detectors(init_net(2, 2, false, 61, 8), full, 4, data, cfg, &t2);
    CHECK(t1.step_loss == t2.step_loss);
    std::vector<const std::vector<double>*> pa, pb;
    for_each_param(a, [&pa](const std::vector<double>& p) { pa.push_back(&p); });
    for_each_param(b, [&pb](const std::vector<double>& p) { pb.push_back(&p); });
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(*pa[i] == *pb[i]);

    CHECK_THROWS_AS((void)train_random_detectors(init_net(2, 2, false, 61, 8), full, 13, data,
                                                 cfg, nullptr),
                    std::invalid_argument);
  }

  TEST_CASE("select_rows keeps the requested traces") {
    Sinogram f(4, 3, 0.1, 0.0);
    for (std::size_t i = 0; i < f.v.size(); ++i) f.v[i] = static_cast<double>(i);
    const Sinogram out = select_rows(f, {2, 0});
    CHECK(out.n_det == 2);
    CHECK(out.at(0, 0) == 6.0);
    CHECK(out.at(0, 2) == 8.0);
    CHECK(out.at(1, 1) == 1.0);
    CHECK_THROWS(select_rows(f, {4}));
  }

  TEST_CASE("trace CSV has no wall-clock column") {
    TrainTrace trace;
    trace.step_epoch = {0, 0, 1};
    trace.step_loss = {1.5, 1.25, 1.0};
    trace.epoch_loss = {1.375, 1.0};
    const fs::path dir = fs::temp_directory_path() / "patlab_train_trace";
    fs::create_directories(dir);
    trace.save_csv(dir / "trace.csv");
    const std::string text = io::read_text(dir / "trace.csv");
    CHECK(text == "step,epoch,loss\n0,0,1.5\n1,0,1.25\n2,1,1\n");
    fs::remove_all(dir);
  }

  TEST_CASE("threshold selection") {
    // perfect outputs: every interior threshold works, midpoint wins
    std::vector<Image> outs, gts;
    Image gt(6, 6);
    for (int i = 0; i < 12; ++i) gt.v[static_cast<std::size_t>(i)] = 1.0;
    outs.push_back(gt);
    gts.push_back(gt);
    CHECK(select_threshold(outs, gts) == doctest::Approx(0.5).epsilon(1e-12));

    // constant 0.5 output: all-ones mask beats all-zeros, plateau is 0.01..0.49
    std::vector<Image> flat{Image(6, 6, 0.5)};
    CHECK(select_threshold(flat, gts) == doctest::Approx(0.25).epsilon(1e-12));

    // calibrated mixture with a known best cut at 0.3
    Rng rng(9);
    Image scores(20, 20), mask(20, 20);
    for (std::size_t i = 0; i < scores.v.size(); ++i) {
      const bool vessel = i % 4 == 0;
      mask.v[i] = vessel ? 1.0 : 0.0;
      scores.v[i] = vessel ? rng.uniform(0.31, 1.0) : rng.uniform(0.0, 0.29);
    }
    const double t = select_threshold({scores}, {mask});
    CHECK(t >= 0.29);
    CHECK(t <= 0.31);

    CHECK_THROWS(select_threshold({}, {}));
  }
}
