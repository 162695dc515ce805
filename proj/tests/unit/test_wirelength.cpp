#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "leaps/wirelength.hpp"

using namespace leaps;

namespace {

Netlist chain(std::vector<std::vector<int>> const &nets, int ninst) {
  Netlist n;
  for (int i = 0; i < ninst; ++i) {
    Instance inst;
    inst.id = i;
    inst.name = "i" + std::to_string(i);
    inst.demand[0] = 1;
    n.instances.push_back(inst);
  }
  for (std::size_t e = 0; e < nets.size(); ++e) {
    Net net;
    net.id = static_cast<int>(e);
    for (int p : nets[e]) net.pins.push_back({p});
    n.nets.push_back(net);
  }
  n.finalize();
  return n;
}

Netlist random_design(int ninst, int nnets, std::mt19937 &rng) {
  std::vector<std::vector<int>> nets;
  for (int e = 0; e < nnets; ++e) {
    std::vector<int> pins;
    int k = 2 + static_cast<int>(rng() % 5);
    for (int j = 0; j < k; ++j) pins.push_back(static_cast<int>(rng() % ninst));
    nets.push_back(pins);
  }
  auto n = chain(nets, ninst);
  std::uniform_real_distribution<double> off(-0.3, 0.3);
  for (auto &net : n.nets)
    for (auto &p : net.pins) {
      p.dx = off(rng);
      p.dy = off(rng);
    }
  return n;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

}  // namespace

TEST(Wirelength, HpwlExamples) {
  auto n = chain({{0, 1}}, 2);
  PlacementState s{{0, 3}, {0, 4}};
  EXPECT_DOUBLE_EQ(hpwl(s, n), 7);
  PlacementState same{{2, 2}, {2, 2}};
  EXPECT_DOUBLE_EQ(hpwl(same, n), 0);
  auto m = chain({{0, 1, 2}}, 3);
  PlacementState t{{0, 5, 2}, {0, 1, 9}};
  EXPECT_DOUBLE_EQ(hpwl(t, m), 14);
}

TEST(Wirelength, WaTwoCoincidentPins) {
  auto n = chain({{0, 1}}, 2);
  PlacementState s{{3, 3}, {1, 1}};
  auto e = wa_wirelength_xy(s, n, 0.5);
  EXPECT_NEAR(e.value, 0, 1e-15);
  for (double g : e.grad_x) EXPECT_NEAR(g, 0, 1e-15);
}

TEST(Wirelength, WaTwoPinClosedForm) {
  // For two points distance d apart: WA span = d * tanh(d / (2 gamma)).
  auto n = chain({{0, 1}}, 2);
  double d = 3.0;
  PlacementState s{{0, d}, {0, 0}};
  for (double g : {2.0, 1.0, 0.5, 0.1, 0.01}) {
    auto e = wa_wirelength_xy(s, n, g);
    EXPECT_NEAR(e.value, d * std::tanh(d / (2 * g)), 1e-12);
  }
  EXPECT_NEAR(wa_wirelength_xy(s, n, 1e-3).value, d, 1e-9);
}

TEST(Wirelength, WaBoundAndMonotoneConvergence) {
  std::mt19937 rng(2);
  auto n = random_design(20, 30, rng);
  PlacementState s;
  std::uniform_real_distribution<double> u(0, 20);
  for (int i = 0; i < 20; ++i) {
    s.x.push_back(u(rng));
    s.y.push_back(u(rng));
  }
  double exact = hpwl(s, n);
  double prev = 0;
  for (double scale : {8.0, 4.0, 2.0, 1.0, 0.5}) {
    double v = wa_wirelength_xy(s, n, scale).value;
    EXPECT_GE(v, 0);
    EXPECT_LE(v, exact + 1e-9);
    EXPECT_GE(v, prev - 1e-12);
    prev = v;
  }
}

TEST(Wirelength, WaGradientFiniteDifference) {
  std::mt19937 rng(3);
  auto n = chain({{0, 1, 2, 3, 4}}, 5);
  PlacementState s;
  std::uniform_real_distribution<double> u(0, 10);
  for (int i = 0; i < 5; ++i) {
    s.x.push_back(u(rng));
    s.y.push_back(u(rng));
  }
  auto e = wa_wirelength_xy(s, n, 1.5);
  double h = 1e-5;
  for (int i = 0; i < 5; ++i) {
    auto p = s, m = s;
    p.x[i] += h;
    m.x[i] -= h;
    double fd = (wa_wirelength_xy(p, n, 1.5).value - wa_wirelength_xy(m, n, 1.5).value) / (2 * h);
    EXPECT_LE(rel_err(fd, e.grad_x[i]), 1e-4);
  }
}

TEST(Wirelength, SoftFloorBasics) {
  // At a boundary the boundary's sigmoid contributes exactly 0.5.
  EXPECT_NEAR(soft_floor(10, 0, 10, 2, 7.0), 0.5, 1e-15);
  // One column: identically zero.
  EXPECT_EQ(soft_floor(3.3, 0, 10, 1, 20.0), 0.0);
  // Tail bound at the cell centre.
  double const tail = 2.0 / (1.0 + std::exp(10.0));
  for (int k = 0; k < 4; ++k) {
    double z = soft_floor((k + 0.5) * 10, 0, 10, 4, 20.0);
    EXPECT_LE(std::abs(z - k), tail + 1e-15);
  }
}

TEST(Wirelength, SoftFloorMonotoneAndDerivative) {
  double prev = -1;
  for (double x = 0; x <= 40; x += 0.05) {
    double d = 0;
    double z = soft_floor(x, 0, 10, 4, 5.0, &d);
    EXPECT_GE(z, prev);
    prev = z;
    double h = 1e-6;
    double fd = (soft_floor(x + h, 0, 10, 4, 5.0) - soft_floor(x - h, 0, 10, 4, 5.0)) / (2 * h);
    EXPECT_NEAR(fd, d, 1e-6);
  }
}

TEST(Wirelength, SoftHardConsistency) {
  SlrTopology t{2, 3, 30.0, 20.0, {}};
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> ux(0, 60), uy(0, 60);
  for (int i = 0; i < 5000; ++i) {
    double x = ux(rng), y = uy(rng);
    double fx = std::fmod(x, 30.0), fy = std::fmod(y, 20.0);
    bool far = std::min(fx, 30.0 - fx) > 0.15 * 30.0 && std::min(fy, 20.0 - fy) > 0.15 * 20.0;
    if (!far) continue;
    auto hard = slr_index_of(x, y, t);
    EXPECT_EQ(std::lround(soft_floor(x, 0, 30, 2, 20.0)), hard.zx);
    EXPECT_EQ(std::lround(soft_floor(y, 0, 20, 3, 20.0)), hard.zy);
  }
}

TEST(Wirelength, ZSingleSlrNearZero) {
  SlrTopology t{1, 4, 10.0, 10.0, {}};
  auto n = chain({{0, 1, 2}}, 3);
  PlacementState s{{1, 5, 9}, {4, 5, 6}};
  auto z = soft_floor_z(s, t, 20.0);
  EXPECT_NEAR(wa_wirelength_z(z, n, 20.0).value, 0, 1e-6);
}

TEST(Wirelength, ZTwoPinGapLimit) {
  SlrTopology t{1, 4, 10.0, 10.0, {}};
  auto n = chain({{0, 1}}, 2);
  PlacementState s{{5, 5}, {5, 15}};
  double prev = 0;
  for (double g : {1.0, 5.0, 20.0, 50.0}) {
    auto z = soft_floor_z(s, t, g);
    double v = wa_wirelength_z(z, n, g).value;
    EXPECT_GE(v, prev);
    prev = v;
  }
  EXPECT_NEAR(prev, 1.0, 1e-6);
}

TEST(Wirelength, TotalObjectiveComponents) {
  std::mt19937 rng(12);
  auto n = random_design(30, 40, rng);
  SlrTopology t{2, 2, 20.0, 20.0, {}};
  PlacementState s;
  std::uniform_real_distribution<double> u(0, 40);
  for (int i = 0; i < 30; ++i) {
    s.x.push_back(u(rng));
    s.y.push_back(u(rng));
  }
  WlParams p{2.0, 3.0, 0.0};
  auto a = total_wl_objective(s, n, t, p);
  auto xy = wa_wirelength_xy(s, n, 2.0);
  EXPECT_DOUBLE_EQ(a.value, xy.value);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_DOUBLE_EQ(a.grad_x[i], xy.grad_x[i]);

  p.psi = 0.7;
  auto b = total_wl_objective(s, n, t, p);
  p.psi = 1.4;
  auto c = total_wl_objective(s, n, t, p);
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_NEAR(c.grad_x[i] - xy.grad_x[i], 2 * (b.grad_x[i] - xy.grad_x[i]), 1e-12);
    EXPECT_NEAR(c.grad_y[i] - xy.grad_y[i], 2 * (b.grad_y[i] - xy.grad_y[i]), 1e-12);
  }
  auto z = soft_floor_z(s, t, 3.0);
  auto ws = wa_wirelength_z(z, n, 3.0);
  EXPECT_NEAR(b.value, xy.value + 0.7 * ws.value, 1e-9);
  EXPECT_NEAR(b.wl_h, xy.value, 1e-12);
  EXPECT_NEAR(b.wl_s, ws.value, 1e-12);
}

TEST(Wirelength, TranslationInvariance) {
  std::mt19937 rng(13);
  auto n = random_design(20, 20, rng);
  SlrTopology t{2, 2, 20.0, 20.0, {}};
  PlacementState s;
  std::uniform_real_distribution<double> u(5, 30);
  for (int i = 0; i < 20; ++i) {
    s.x.push_back(u(rng));
    s.y.push_back(u(rng));
  }
  auto shifted = s;
  for (auto &x : shifted.x) x += 3.7;
  for (auto &y : shifted.y) y -= 1.9;
  WlParams p{1.0, 5.0, 1.0};
  EXPECT_NEAR(total_wl_objective(s, n, t, p).wl_h, total_wl_objective(shifted, n, t, p).wl_h, 1e-9);
}

TEST(Wirelength, FullGradientFiniteDifference) {
  std::mt19937 rng(14);
  SlrTopology t{2, 2, 25.0, 25.0, {}};
  for (int design = 0; design < 20; ++design) {
    auto n = random_design(50, 60, rng);
    n.instances[0].fixed = true;
    PlacementState s;
    std::uniform_real_distribution<double> u(0, 50);
    for (int i = 0; i < 50; ++i) {
      s.x.push_back(u(rng));
      s.y.push_back(u(rng));
    }
    WlParams p{2.0, 4.0, 0.8};
    auto e = total_wl_objective(s, n, t, p);
    EXPECT_EQ(e.grad_x[0], 0.0);
    double h = 1e-4 * 25.0;
    for (int i = 1; i < 50; ++i) {
      for (int axis = 0; axis < 2; ++axis) {
        auto a = s, b = s;
        (axis ? a.y : a.x)[i] += h;
        (axis ? b.y : b.x)[i] -= h;
        double fd = (total_wl_objective(a, n, t, p).value - total_wl_objective(b, n, t, p).value) / (2 * h);
        double g = axis ? e.grad_y[i] : e.grad_x[i];
        ASSERT_LE(rel_err(fd, g), 1e-4) << "design " << design << " inst " << i << " axis " << axis;
      }
    }
  }
}
