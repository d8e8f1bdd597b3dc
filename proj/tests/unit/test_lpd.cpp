#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>

#include "doctest.h"
#include "pat/io.hpp"
#include "pat/nn/lpd.hpp"
#include "pat/rng.hpp"

namespace fs = std::filesystem;
using namespace pat;
using namespace pat::nn;

namespace {

struct Instance {
  AcousticOperator op;
  Sinogram f;
  Image gt;
  Image gt_seg;
};

Instance make_instance(int n, int n_det, std::uint64_t seed) {
  Instance inst;
  const Grid2D g = make_centered_grid(n, 8.0);
  const auto det = make_uniform_detectors(g, n_det, default_detector_radius(g), kTwoPi, 0.0);
  const auto time = make_default_time_axis(g, det, 1.5);
  inst.op = assemble(g, det, time, analytic_tof(g, det, 1.5));

  inst.gt = Image(n, n);
  inst.gt_seg = Image(n, n);
  Rng rng(seed);
  for (int iy = n / 4; iy < 3 * n / 4; ++iy)
    for (int ix = n / 3; ix < 2 * n / 3; ++ix) {
      inst.gt.at(ix, iy) = 0.5 + 0.5 * rng.uniform();
      inst.gt_seg.at(ix, iy) = 1.0;
    }
  inst.f = inst.op.apply(inst.gt);
  return inst;
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

}  // namespace

TEST_SUITE("lpd") {
  TEST_CASE("zero weights give zero reconstruction and neutral segmentation") {
    const Instance inst = make_instance(12, 4, 3);
    const UnrolledNet net = UnrolledNet::zeros(3, 2, true);
    const LpdOutput out = lpd_forward(net, inst.op, inst.f);
    CHECK(max_abs(out.reconstruction.v) == 0.0);
    for (double s : out.segmentation.v) CHECK(s == 0.5);
  }

  TEST_CASE("forward is deterministic") {
    const Instance inst = make_instance(12, 4, 4);
    const UnrolledNet net = init_net(2, 2, true, 17);
    const LpdOutput a = lpd_forward(net, inst.op, inst.f);
    const LpdOutput b = lpd_forward(net, inst.op, inst.f);
    CHECK(a.reconstruction.v == b.reconstruction.v);
    CHECK(a.segmentation.v == b.segmentation.v);
  }

  TEST_CASE("segmentation stays strictly inside the unit interval") {
    CHECK(logistic(1e18) < 1.0);
    CHECK(logistic(1e18) > 0.0);
    CHECK(logistic(-1e18) > 0.0);
    CHECK(logistic(0.0) == 0.5);

    const Instance inst = make_instance(12, 4, 5);
    UnrolledNet net = init_net(2, 2, true, 23);
    // crank the last primal block so the head sees huge values
    for (auto& w : net.primal_blocks[1].l3.w) w *= 1e6;
    const LpdOutput out = lpd_forward(net, inst.op, inst.f);
    for (double s : out.segmentation.v) {
      CHECK(s > 0.0);
      CHECK(s < 1.0);
    }
  }

  TEST_CASE("structural validation") {
    CHECK_THROWS_AS(UnrolledNet::zeros(2, 1, true), std::invalid_argument);
    const UnrolledNet net = init_net(2, 2, false, 1);
    CHECK(net.hidden == 32);
    CHECK(net.dual_blocks[0].l1.in_ch == 4);
    CHECK(net.dual_blocks[0].l3.out_ch == 2);
    CHECK(net.primal_blocks[0].l1.in_ch == 3);

    const Instance inst = make_instance(12, 4, 6);
    Sinogram wrong(inst.f.n_det + 1, inst.f.n_t, inst.f.dt, inst.f.t0);
    CHECK_THROWS_AS(lpd_forward(net, inst.op, wrong), std::invalid_argument);
  }

  TEST_CASE("non-finite intermediates abort with the iteration index") {
    const Instance inst = make_instance(12, 4, 7);
    UnrolledNet net = init_net(3, 2, false, 31);
    net.dual_blocks[1].l1.w[5] = std::nan("");
    try {
      (void)lpd_forward(net, inst.op, inst.f);
      FAIL("expected a throw");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("iteration 1") != std::string::npos);
    }
  }

  TEST_CASE("weights round-trip through the container format") {
    const fs::path dir = fs::temp_directory_path() / "patlab_lpdw_test";
    fs::create_directories(dir);
    const UnrolledNet net = init_net(3, 2, true, 55, 8);
    save_net(net, dir / "w.lpdw");
    const UnrolledNet back = load_net(dir / "w.lpdw");
    CHECK(back.iterations == 3);
    CHECK(back.channels == 2);
    CHECK(back.hidden == 8);
    CHECK(back.segmentation_head);
    std::vector<const std::vector<double>*> a, b;
    for_each_param(net, [&a](const std::vector<double>& p) { a.push_back(&p); });
    for_each_param(back, [&b](const std::vector<double>& p) { b.push_back(&p); });
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(*a[i] == *b[i]);

    io::write_text(dir / "bad.lpdw", "NOPE");
    CHECK_THROWS(load_net(dir / "bad.lpdw"));
    fs::remove_all(dir);
  }

  TEST_CASE("initialization is seeded and the final layers start small") {
    const UnrolledNet a = init_net(2, 2, false, 9, 8);
    const UnrolledNet b = init_net(2, 2, false, 9, 8);
    const UnrolledNet c = init_net(2, 2, false, 10, 8);
    CHECK(a.dual_blocks[0].l1.w == b.dual_blocks[0].l1.w);
    CHECK(a.dual_blocks[0].l1.w != c.dual_blocks[0].l1.w);

    double sum1 = 0.0, sum3 = 0.0;
    for (double w : a.primal_blocks[0].l1.w) sum1 += w * w;
    for (double w : a.primal_blocks[0].l3.w) sum3 += w * w;
    const double rms1 = std::sqrt(sum1 / static_cast<double>(a.primal_blocks[0].l1.w.size()));
    const double rms3 = std::sqrt(sum3 / static_cast<double>(a.primal_blocks[0].l3.w.size()));
    // same fan-in would give comparable scales; the 0.1 factor separates them
    CHECK(rms3 < 0.3 * rms1);
    for (double bb : a.dual_blocks[1].l2.b) CHECK(bb == 0.0);
  }

  TEST_CASE("loss_recon value and gradient") {
    Image a(3, 3), b(3, 3);
    CHECK(loss_recon(a, b, nullptr) == 0.0);
    a.at(1, 2) = 1.0;
    Image grad;
    CHECK(loss_recon(a, b, &grad) == 1.0);
    CHECK(grad.at(1, 2) == 2.0);
    CHECK(grad.at(0, 0) == 0.0);

    Rng rng(40);
    Image x(4, 4), y(4, 4);
    for (auto& v : x.v) v = rng.uniform(-1, 1);
    for (auto& v : y.v) v = rng.uniform(-1, 1);
    Image g;
    (void)loss_recon(x, y, &g);
    const double step = 1e-6;
    for (std::size_t i = 0; i < x.v.size(); ++i) {
      const double keep = x.v[i];
      x.v[i] = keep + step;
      const double hi = loss_recon(x, y, nullptr);
      x.v[i] = keep - step;
      const double lo = loss_recon(x, y, nullptr);
      x.v[i] = keep;
      CHECK(rel_err(g.v[i], (hi - lo) / (2 * step)) <= 1e-7);
    }
  }

  TEST_CASE("loss_joint analytic cases") {
    Image recon(4, 4), gt(4, 4);
    Image seg(4, 4, 0.5);
    Image gt_seg(4, 4);
    for (int i = 0; i < 8; ++i) gt_seg.v[static_cast<std::size_t>(i)] = 1.0;

    const double loss = loss_joint(recon, seg, gt, gt_seg, 0.5, nullptr, nullptr);
    CHECK(loss == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));

    // beta 0 skips the segmentation term bitwise
    Rng rng(41);
    for (auto& v : recon.v) v = rng.uniform(-1, 1);
    for (auto& v : gt.v) v = rng.uniform(-1, 1);
    Image ga, gb;
    const double l0 = loss_joint(recon, seg, gt, gt_seg, 0.0, &ga, nullptr);
    const double lr = loss_recon(recon, gt, &gb);
    CHECK(l0 == lr);
    CHECK(ga.v == gb.v);

    Image bad = gt_seg;
    bad.v[3] = 0.25;
    CHECK_THROWS_AS(loss_joint(recon, seg, gt, bad, 0.5, nullptr, nullptr),
                    std::invalid_argument);
  }

  TEST_CASE("loss_joint segmentation gradient matches finite differences") {
    Rng rng(42);
    Image recon(4, 4), gt(4, 4), seg(4, 4), gt_seg(4, 4);
    for (auto& v : recon.v) v = rng.uniform(-1, 1);
    for (auto& v : gt.v) v = rng.uniform(-1, 1);
    for (auto& v : seg.v) v = rng.uniform(0.05, 0.95);
    for (std::size_t i = 0; i < gt_seg.v.size(); ++i) gt_seg.v[i] = i % 3 == 0 ? 1.0 : 0.0;

    Image gr, gs;
    (void)loss_joint(recon, seg, gt, gt_seg, 0.7, &gr, &gs);
    const double step = 1e-6;
    for (std::size_t i = 0; i < seg.v.size(); ++i) {
      const double keep = seg.v[i];
      seg.v[i] = keep + step;
      const double hi = loss_joint(recon, seg, gt, gt_seg, 0.7, nullptr, nullptr);
      seg.v[i] = keep - step;
      const double lo = loss_joint(recon, seg, gt, gt_seg, 0.7, nullptr, nullptr);
      seg.v[i] = keep;
      CHECK(rel_err(gs.v[i], (hi - lo) / (2 * step)) <= 1e-6);
    }
  }

  // Central differences only measure the derivative of a piecewise-linear
  // activation when no pre-activation crosses zero inside the probe step, so
  // the instance keeps every |z| three orders of magnitude above the reach of
  // a 1e-5 parameter perturbation: first two layers get small weights and
  // biases jittered away from zero (mixed on/off channels), the third layer is
  // linear and keeps full-size weights so gradients stay well above the
  // rounding noise of a loss evaluation.
  TEST_CASE("full unrolled gradient matches finite differences") {
    const Instance base = make_instance(16, 4, 8);
    Sinogram f = base.f;
    for (auto& v : f.v) v *= 1e-2;

    UnrolledNet net = init_net(2, 2, true, 71, 8);
    Rng brng(71 * 977 + 13);
    auto shape = [&brng](ConvBlockWeights& blk, double scale1) {
      for (auto& w : blk.l1.w) w *= scale1;
      for (auto& w : blk.l2.w) w *= 3e-2;
      auto jitter = [&brng](std::vector<double>& b, double lo, double hi) {
        for (auto& v : b) {
          const double mag = brng.uniform(lo, hi);
          v = brng.uniform() < 0.5 ? -mag : mag;
        }
      };
      jitter(blk.l1.b, 0.02, 0.1);
      jitter(blk.l2.b, 0.02, 0.1);
      jitter(blk.l3.b, 0.005, 0.02);
    };
    for (auto& blk : net.dual_blocks) shape(blk, 3e-3);
    for (auto& blk : net.primal_blocks) shape(blk, 1e-2);

    auto eval = [&]() {
      const LpdOutput out = lpd_forward(net, base.op, f);
      return loss_joint(out.reconstruction, out.segmentation, base.gt, base.gt_seg, 0.7,
                        nullptr, nullptr);
    };

    LpdTape tape;
    const LpdOutput out = lpd_forward(net, base.op, f, &tape);

    // oracle validity: no kink within reach, and both active and inactive units
    double z_margin = 1e300;
    std::size_t on = 0, units = 0;
    for (const auto* half : {&tape.dual, &tape.primal})
      for (const auto& bt : *half)
        for (const auto* z : {&bt.z1, &bt.z2})
          for (double v : z->v) {
            z_margin = std::min(z_margin, std::abs(v));
            on += v > 0 ? 1 : 0;
            ++units;
          }
    REQUIRE(z_margin > 2e-3);
    REQUIRE(static_cast<double>(on) > 0.2 * static_cast<double>(units));
    REQUIRE(static_cast<double>(on) < 0.8 * static_cast<double>(units));

    Image grad_recon, grad_seg;
    (void)loss_joint(out.reconstruction, out.segmentation, base.gt, base.gt_seg, 0.7,
                     &grad_recon, &grad_seg);
    const UnrolledNet grads = lpd_backward(net, base.op, tape, grad_recon, &grad_seg);

    // entries below a millionth of the largest gradient sit under the
    // rounding noise of the loss difference; compare those at scale instead
    double gmax = 0.0;
    for_each_param(grads, [&gmax](const std::vector<double>& p) {
      for (double v : p) gmax = std::max(gmax, std::abs(v));
    });
    REQUIRE(gmax > 0.0);
    const double floor = 1e-6 * gmax;

    const double step = 1e-5;
    double worst = 0.0;
    auto check_tensor = [&](std::vector<double>& w, const std::vector<double>& g) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double keep = w[i];
        w[i] = keep + step;
        const double hi = eval();
        w[i] = keep - step;
        const double lo = eval();
        w[i] = keep;
        const double fd = (hi - lo) / (2.0 * step);
        worst = std::max(worst, std::abs(g[i] - fd) /
                                    std::max({std::abs(g[i]), std::abs(fd), floor}));
      }
    };

    for (int n = 0; n < 2; ++n) {
      auto& db = net.dual_blocks[static_cast<std::size_t>(n)];
      const auto& dg = grads.dual_blocks[static_cast<std::size_t>(n)];
      auto& pb = net.primal_blocks[static_cast<std::size_t>(n)];
      const auto& pg = grads.primal_blocks[static_cast<std::size_t>(n)];
      const std::pair<ConvLayer*, const ConvLayer*> layers[] = {
          {&db.l1, &dg.l1}, {&db.l2, &dg.l2}, {&db.l3, &dg.l3},
          {&pb.l1, &pg.l1}, {&pb.l2, &pg.l2}, {&pb.l3, &pg.l3}};
      for (auto [layer, glayer] : layers) {
        check_tensor(layer->w, glayer->w);
        check_tensor(layer->b, glayer->b);
      }
    }
    CHECK(worst <= 1e-4);
  }

  TEST_CASE("recon-only gradient ignores the segmentation head") {
    const Instance inst = make_instance(12, 4, 9);
    UnrolledNet net = init_net(2, 2, true, 81, 8);
    LpdTape tape;
    const LpdOutput out = lpd_forward(net, inst.op, inst.f, &tape);
    Image grad_recon;
    (void)loss_recon(out.reconstruction, inst.gt, &grad_recon);
    const UnrolledNet g1 = lpd_backward(net, inst.op, tape, grad_recon, nullptr);

    UnrolledNet plain = net;
    plain.segmentation_head = false;
    LpdTape tape2;
    (void)lpd_forward(plain, inst.op, inst.f, &tape2);
    const UnrolledNet g2 = lpd_backward(plain, inst.op, tape2, grad_recon, nullptr);

    std::vector<const std::vector<double>*> a, b;
    for_each_param(g1, [&a](const std::vector<double>& p) { a.push_back(&p); });
    for_each_param(g2, [&b](const std::vector<double>& p) { b.push_back(&p); });
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(*a[i] == *b[i]);
  }
}
