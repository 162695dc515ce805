#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "leaps/sll.hpp"

using namespace leaps;

namespace {

int l1(SlrIndex a, SlrIndex b) { return std::abs(a.zx - b.zx) + std::abs(a.zy - b.zy); }

// Minimum over every labelled tree (Pruefer sequences).
int enumerate_trees(std::vector<SlrIndex> const &pts) {
  int const k = static_cast<int>(pts.size());
  if (k < 2) return 0;
  if (k == 2) return l1(pts[0], pts[1]);
  int best = 1 << 30;
  std::vector<int> seq(static_cast<std::size_t>(k - 2), 0);
  while (true) {
    std::vector<int> degree(static_cast<std::size_t>(k), 1);
    for (int v : seq) ++degree[static_cast<std::size_t>(v)];
    int w = 0;
    for (int v : seq) {
      for (int leaf = 0; leaf < k; ++leaf) {
        if (degree[static_cast<std::size_t>(leaf)] == 1) {
          w += l1(pts[static_cast<std::size_t>(leaf)], pts[static_cast<std::size_t>(v)]);
          --degree[static_cast<std::size_t>(leaf)];
          --degree[static_cast<std::size_t>(v)];
          break;
        }
      }
    }
    int a = -1, b = -1;
    for (int v = 0; v < k; ++v)
      if (degree[static_cast<std::size_t>(v)] == 1) (a < 0 ? a : b) = v;
    w += l1(pts[static_cast<std::size_t>(a)], pts[static_cast<std::size_t>(b)]);
    best = std::min(best, w);
    std::size_t pos = 0;
    while (pos < seq.size() && ++seq[pos] == k) seq[pos++] = 0;
    if (pos == seq.size()) break;
  }
  return best;
}

SlrTopology topo(int c, int r) { return SlrTopology{c, r, 10.0, 10.0, {}}; }

}  // namespace

TEST(Sll, SpecExamples) {
  std::vector<SlrIndex> a{{0, 0}, {0, 3}};
  EXPECT_EQ(net_sll_count(a, topo(1, 4)), 3);
  std::vector<SlrIndex> b{{1, 1}, {1, 1}, {1, 1}};
  EXPECT_EQ(net_sll_count(b, topo(2, 2)), 0);
  std::vector<SlrIndex> c{{0, 0}, {1, 1}, {1, 0}};
  EXPECT_EQ(net_sll_count(c, topo(2, 2)), 2);
}

TEST(Sll, OracleExamples) {
  std::vector<SlrIndex> one{{3, 3}};
  EXPECT_EQ(mst_weight_oracle(one), 0);
  std::vector<SlrIndex> two{{0, 0}, {2, 1}};
  EXPECT_EQ(mst_weight_oracle(two), 3);
  std::vector<SlrIndex> corners{{0, 0}, {2, 0}, {0, 2}, {2, 2}};
  EXPECT_EQ(mst_weight_oracle(corners), 6);
  std::vector<SlrIndex> many(13, SlrIndex{0, 0});
  EXPECT_THROW(mst_weight_oracle(many), std::length_error);
}

TEST(Sll, OracleAgreesWithTreeEnumeration) {
  std::mt19937 rng(9);
  for (int t = 0; t < 300; ++t) {
    int k = 1 + static_cast<int>(rng() % 6);
    std::vector<SlrIndex> pts;
    for (int i = 0; i < k; ++i) pts.push_back({static_cast<int>(rng() % 5), static_cast<int>(rng() % 5)});
    ASSERT_EQ(mst_weight_oracle(pts), enumerate_trees(pts));
  }
}

TEST(Sll, ExhaustiveSubsetsUpTo4x4) {
  for (int c = 1; c <= 4; ++c) {
    for (int r = 1; r <= 4; ++r) {
      auto t = topo(c, r);
      int const cells = c * r;
      std::vector<SlrIndex> pts;
      std::function<void(int)> rec = [&](int start) {
        ASSERT_EQ(net_sll_count(pts, t), mst_weight_oracle(pts));
        if (pts.size() == 5) return;
        for (int f = start; f < cells; ++f) {
          pts.push_back({f % c, f / c});
          rec(f + 1);
          pts.pop_back();
        }
      };
      rec(0);
    }
  }
}

TEST(Sll, LineTopologyIsSpan) {
  std::mt19937 rng(4);
  for (int n = 1; n <= 5; ++n) {
    for (int t = 0; t < 200; ++t) {
      std::vector<SlrIndex> pts;
      int lo = 99, hi = -1;
      for (int i = 0; i < 1 + static_cast<int>(rng() % 6); ++i) {
        int z = static_cast<int>(rng() % n);
        pts.push_back({0, z});
        lo = std::min(lo, z);
        hi = std::max(hi, z);
      }
      ASSERT_EQ(net_sll_count(pts, topo(1, n)), hi - lo);
    }
  }
}

TEST(Sll, MonotoneOnLines) {
  std::mt19937 rng(5);
  for (int rows = 1; rows <= 5; ++rows) {
    auto t = topo(1, rows);
    for (int it = 0; it < 500; ++it) {
      std::vector<SlrIndex> pts;
      for (int i = 0; i < 4; ++i) pts.push_back({0, static_cast<int>(rng() % rows)});
      int before = net_sll_count(pts, t);
      pts.push_back({0, static_cast<int>(rng() % rows)});
      ASSERT_GE(net_sll_count(pts, t), before);
    }
  }
}

TEST(Sll, GridSteinerPointCanLowerCount) {
  // On 2-D grids a spanning tree can shrink when a hub point joins.
  auto t = topo(3, 3);
  std::vector<SlrIndex> plus{{0, 1}, {2, 1}, {1, 0}, {1, 2}};
  EXPECT_EQ(net_sll_count(plus, t), 6);
  plus.push_back({1, 1});
  EXPECT_EQ(net_sll_count(plus, t), 4);
}

TEST(Sll, TableCachesCanonicalKeys) {
  SllMappingTable table(topo(3, 3));
  std::vector<SlrIndex> a{{0, 0}, {2, 2}, {1, 0}};
  std::vector<SlrIndex> b{{1, 0}, {2, 2}, {0, 0}, {2, 2}};
  EXPECT_EQ(table.count(a), table.count(b));
  EXPECT_EQ(table.cached(), 1u);
  EXPECT_EQ(table.count(a), mst_weight_oracle(a));
}

namespace {

Netlist random_netlist(int ninst, int nnets, std::mt19937 &rng) {
  Netlist n;
  for (int i = 0; i < ninst; ++i) {
    Instance inst;
    inst.id = i;
    inst.name = "i" + std::to_string(i);
    inst.demand[0] = 1;
    n.instances.push_back(inst);
  }
  for (int e = 0; e < nnets; ++e) {
    Net net;
    net.id = e;
    int k = 2 + static_cast<int>(rng() % 5);
    for (int j = 0; j < k; ++j) net.pins.push_back({static_cast<int>(rng() % ninst)});
    n.nets.push_back(net);
  }
  n.finalize();
  return n;
}

}  // namespace

TEST(Sll, TotalMatchesOracleSum) {
  std::mt19937 rng(6);
  auto n = random_netlist(60, 100, rng);
  auto t = SlrTopology{2, 2, 50.0, 50.0, {}};
  PlacementState s;
  std::uniform_real_distribution<double> u(0, 100);
  for (int i = 0; i < 60; ++i) {
    s.x.push_back(u(rng));
    s.y.push_back(u(rng));
  }
  int expect = 0;
  for (auto const &net : n.nets) {
    std::vector<SlrIndex> pts;
    for (auto const &p : net.pins) {
      auto z = slr_index_of(s.x[p.instance], s.y[p.instance], t);
      if (std::find(pts.begin(), pts.end(), z) == pts.end()) pts.push_back(z);
    }
    expect += mst_weight_oracle(pts);
  }
  EXPECT_EQ(total_sll(s, n, t), expect);

  // Within-SLR perturbation leaves the total unchanged.
  auto moved = s;
  for (std::size_t i = 0; i < moved.size(); ++i) {
    double bx = std::floor(s.x[i] / 50.0) * 50.0;
    double by = std::floor(s.y[i] / 50.0) * 50.0;
    moved.x[i] = bx + std::uniform_real_distribution<double>(0, 49.99)(rng);
    moved.y[i] = by + std::uniform_real_distribution<double>(0, 49.99)(rng);
  }
  EXPECT_EQ(total_sll(moved, n, t), expect);
}

TEST(Sll, SmallCases) {
  Netlist n;
  for (int i = 0; i < 2; ++i) {
    Instance inst;
    inst.id = i;
    inst.demand[0] = 1;
    n.instances.push_back(inst);
  }
  n.nets.push_back({0, 1.0, false, {{0}, {1}}});
  n.finalize();
  auto t = SlrTopology{1, 4, 10.0, 10.0, {}};
  PlacementState s{{1, 2}, {1, 2}};
  EXPECT_EQ(total_sll(s, n, t), 0);
  s.y[1] = 12;
  EXPECT_EQ(total_sll(s, n, t), 1);
}
