#include <gtest/gtest.h>

#include <random>

#include "leaps/clockmodel.hpp"

using namespace leaps;

namespace {

FabricLayout grid_layout(int slr_cols = 1, int slr_rows = 1) {
  ArchConfig c;
  c.width = 100;
  c.height = 160;
  c.slr_cols = slr_cols;
  c.slr_rows = slr_rows;
  c.bins_x = 4;
  c.bins_y = 4;
  return build_layout(c);
}

// `clocks` clock nets; clock k holds the instances listed in members[k].
Netlist clocked(std::vector<std::vector<int>> const &members, int ninst) {
  Netlist n;
  for (int i = 0; i < ninst; ++i) {
    Instance inst;
    inst.id = i;
    inst.name = "f" + std::to_string(i);
    inst.demand[index(Resource::FF)] = 1;
    n.instances.push_back(inst);
  }
  for (std::size_t k = 0; k < members.size(); ++k) {
    Net net;
    net.id = static_cast<int>(k);
    net.clock = true;
    for (int m : members[k]) net.pins.push_back({m});
    n.nets.push_back(net);
  }
  n.finalize();
  return n;
}

int find_region(FabricLayout const &L, int col, int row) {
  for (auto const &r : L.regions())
    if (r.col == col && r.row == row) return r.id;
  return -1;
}

}  // namespace

TEST(ClockModel, BoxInsideRegion) {
  auto L = grid_layout();
  auto n = clocked({{0, 1}}, 2);
  PlacementState s{{22, 27}, {23, 31}};
  auto u = clock_usage(s, n, L);
  int r = find_region(L, 1, 1);
  bool found = false;
  for (auto const &e : u.entries) {
    if (e.region != r) continue;
    found = true;
    EXPECT_DOUBLE_EQ(e.h, 5);
    EXPECT_DOUBLE_EQ(e.v, 8);
    EXPECT_TRUE(e.used);
  }
  EXPECT_TRUE(found);
  EXPECT_EQ(u.region_count[r], 1);
  // Disjoint region: no usage.
  EXPECT_EQ(u.region_count[find_region(L, 3, 5)], 0);
}

TEST(ClockModel, EmptySlrContributesNothing) {
  auto L = grid_layout(1, 4);
  auto n = clocked({{0, 1}}, 2);
  PlacementState s{{5, 15}, {5, 15}};
  auto u = clock_usage(s, n, L);
  for (auto const &e : u.entries) EXPECT_EQ(L.regions()[e.region].slr.zy, 0);
}

TEST(ClockModel, PointClockModes) {
  auto L = grid_layout();
  auto n = clocked({{0}}, 1);
  PlacementState s{{45}, {45}};
  int r = find_region(L, 2, 2);
  EXPECT_EQ(clock_usage(s, n, L, PointClockMode::Inclusive).region_count[r], 1);
  EXPECT_EQ(clock_usage(s, n, L, PointClockMode::Literal).region_count[r], 0);
  // A zero-height box along a region's bottom edge touches the region below only in literal H/V terms.
  auto m = clocked({{0, 1}}, 2);
  PlacementState t{{41, 49}, {40, 40}};
  auto u = clock_usage(t, m, L);
  EXPECT_EQ(u.region_count[find_region(L, 2, 2)], 1);
  EXPECT_EQ(u.region_count[find_region(L, 2, 1)], 0);
}

TEST(ClockModel, RegionBudgetBoundary) {
  auto L = grid_layout();
  for (int clocks : {24, 25}) {
    std::vector<std::vector<int>> members;
    PlacementState s;
    for (int k = 0; k < clocks; ++k) {
      members.push_back({2 * k, 2 * k + 1});
      // Spread horizontally within region (0,0) so half-columns stay within budget.
      double x = 0.5 + 19.0 * k / clocks;
      s.x.push_back(x);
      s.x.push_back(x + 0.1);
      s.y.push_back(2 + (k % 2) * 10);
      s.y.push_back(3 + (k % 2) * 10);
    }
    auto n = clocked(members, 2 * clocks);
    auto v = check_constraints(clock_usage(s, n, L), L);
    std::size_t cr = 0;
    for (auto const &x : v) cr += x.kind == ClockViolation::Kind::Region;
    EXPECT_EQ(cr, clocks == 24 ? 0u : 1u);
  }
}

TEST(ClockModel, HalfColumnBudget) {
  auto L = grid_layout();
  std::vector<std::vector<int>> members;
  PlacementState s;
  for (int k = 0; k < 13; ++k) {
    members.push_back({k});
    s.x.push_back(1.0 + 0.1 * k);
    s.y.push_back(1.0);
  }
  auto n = clocked(members, 13);
  auto v = check_constraints(clock_usage(s, n, L), L);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ClockViolation::Kind::HalfColumn);
  EXPECT_EQ(v[0].count, 13);
}

TEST(ClockModel, BruteForceRecount) {
  std::mt19937 rng(3);
  for (auto [sc, sr] : {std::pair{1, 4}, std::pair{2, 2}}) {
    auto L = grid_layout(sc, sr);
    std::vector<std::vector<int>> members(12);
    int ninst = 400;
    for (int i = 0; i < ninst; ++i) members[rng() % 12].push_back(i);
    auto n = clocked(members, ninst);
    PlacementState s;
    std::uniform_real_distribution<double> cx(0, 100), cy(0, 160), jitter(-12, 12);
    std::vector<std::pair<double, double>> centre(12);
    for (auto &c : centre) c = {cx(rng), cy(rng)};
    s.x.resize(ninst);
    s.y.resize(ninst);
    for (int k = 0; k < 12; ++k)
      for (int i : members[k]) {
        s.x[i] = std::clamp(centre[k].first + jitter(rng), 0.0, 99.99);
        s.y[i] = std::clamp(centre[k].second + jitter(rng), 0.0, 159.99);
      }
    auto u = clock_usage(s, n, L);
    std::vector<int> expect(L.regions().size(), 0);
    for (auto const &r : L.regions()) {
      for (int k = 0; k < 12; ++k) {
        double lx = 1e9, hx = -1e9, ly = 1e9, hy = -1e9;
        bool any = false, inside = false;
        for (int i : members[k]) {
          if (!(slr_index_of(s.x[i], s.y[i], L.topology()) == r.slr)) continue;
          any = true;
          lx = std::min(lx, s.x[i]);
          hx = std::max(hx, s.x[i]);
          ly = std::min(ly, s.y[i]);
          hy = std::max(hy, s.y[i]);
          inside |= r.box.contains(s.x[i], s.y[i]);
        }
        if (!any) continue;
        double H = std::min(hx, r.box.hx) - std::max(lx, r.box.lx);
        double V = std::min(hy, r.box.hy) - std::max(ly, r.box.ly);
        if ((H > 0 && V > 0) || (H >= 0 && V >= 0 && inside)) ++expect[r.id];
      }
    }
    EXPECT_EQ(u.region_count, expect);
  }
}

TEST(ClockModel, PenaltyExamples) {
  auto L = grid_layout();
  auto n = clocked({{0}}, 1);
  int r = find_region(L, 1, 1);  // box [20,40) x [20,40)
  ClockMapping m{{r}};
  PlacementState inside{{30}, {30}};
  std::vector<double> gx(1, 0), gy(1, 0);
  EXPECT_EQ(clock_penalty(inside, n, m, L, &gx, &gy), 0.0);
  EXPECT_EQ(gx[0], 0.0);
  PlacementState left{{18}, {30}};
  gx[0] = 0;
  EXPECT_DOUBLE_EQ(clock_penalty(left, n, m, L, &gx, &gy), 4.0);
  EXPECT_DOUBLE_EQ(gx[0], -4.0);
  EXPECT_DOUBLE_EQ(outside_fraction(left, m, L), 1.0);
  EXPECT_DOUBLE_EQ(outside_fraction(inside, m, L), 0.0);
}

TEST(ClockModel, BowlContinuousAndC1) {
  double lo = 2, hi = 5;
  double prev_v = bowl(lo - 1, lo, hi), prev_d = 0;
  bowl(lo - 1, lo, hi, &prev_d);
  for (double v = lo - 1; v <= hi + 1; v += 1e-4) {
    double d = 0;
    double f = bowl(v, lo, hi, &d);
    ASSERT_LE(std::abs(f - prev_v), 1e-3);
    ASSERT_LE(std::abs(d - prev_d), 1e-3);
    prev_v = f;
    prev_d = d;
  }
}

TEST(ClockModel, PenaltyGradientFiniteDifference) {
  auto L = grid_layout();
  std::mt19937 rng(4);
  int ninst = 60;
  std::vector<std::vector<int>> members(3);
  for (int i = 0; i < ninst; ++i) members[i % 3].push_back(i);
  auto n = clocked(members, ninst);
  ClockMapping m;
  PlacementState s;
  std::uniform_real_distribution<double> ux(0, 100), uy(0, 160);
  for (int i = 0; i < ninst; ++i) {
    m.region.push_back(static_cast<int>(rng() % L.regions().size()));
    s.x.push_back(ux(rng));
    s.y.push_back(uy(rng));
  }
  std::vector<double> gx(ninst, 0), gy(ninst, 0);
  clock_penalty(s, n, m, L, &gx, &gy);
  double h = 1e-4;
  for (int i = 0; i < ninst; ++i) {
    auto const &b = L.regions()[m.region[i]].box;
    for (int axis = 0; axis < 2; ++axis) {
      double v = axis ? s.y[i] : s.x[i];
      double lo = axis ? b.ly : b.lx, hi = axis ? b.hy : b.hx;
      if (std::abs(v - lo) < 1e-2 || std::abs(v - hi) < 1e-2) continue;
      auto a = s, c = s;
      (axis ? a.y : a.x)[i] += h;
      (axis ? c.y : c.x)[i] -= h;
      double fd = (clock_penalty(a, n, m, L) - clock_penalty(c, n, m, L)) / (2 * h);
      double g = axis ? gy[i] : gx[i];
      EXPECT_LE(std::abs(fd - g) / std::max(1.0, std::abs(g)), 1e-6);
    }
  }
}

TEST(ClockModel, PenaltyZeroIffInside) {
  auto L = grid_layout();
  auto n = clocked({{0, 1}}, 2);
  int r = find_region(L, 0, 0);
  ClockMapping m{{r, r}};
  PlacementState s{{5, 10}, {5, 10}};
  EXPECT_EQ(clock_penalty(s, n, m, L), 0.0);
  s.x[1] = 25;
  EXPECT_GT(clock_penalty(s, n, m, L), 0.0);
}

TEST(ClockModel, EtaFormula) {
  ClockPenaltyConfig c;
  EXPECT_EQ(c.eta, 0.0);
  EXPECT_NEAR(update_eta(1.0, 0.0, c), 1e-2, 1e-15);
  EXPECT_NEAR(update_eta(2.0, 0.5, c), 2 * update_eta(1.0, 0.5, c), 1e-18);
}
