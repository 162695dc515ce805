#include "leaps/sll.hpp"

#include <algorithm>
#include <array>
#include <memory>
#include <bit>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace leaps {

SllMappingTable::SllMappingTable(SlrTopology const &topo) : topo_(topo) {}

std::uint32_t SllMappingTable::mask_of(std::span<SlrIndex const> indices) const {
  std::uint32_t mask = 0;
  for (auto const &z : indices) mask |= 1u << flat(z, topo_);
  return mask;
}

int SllMappingTable::count(std::span<SlrIndex const> indices) const { return count_mask(mask_of(indices)); }

int SllMappingTable::count_mask(std::uint32_t mask) const {
  if (std::popcount(mask) < 2) return 0;
  if (topo_.cols == 1 || topo_.rows == 1) {
    // Points on a line: the tree is the span.
    int const lo = std::countr_zero(mask);
    int const hi = 31 - std::countl_zero(mask);
    return hi - lo;
  }
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(mask); it != cache_.end()) return it->second;
  }
  int const w = compute(mask);
  std::lock_guard lock(mu_);
  cache_.emplace(mask, w);
  return w;
}

std::size_t SllMappingTable::cached() const {
  std::lock_guard lock(mu_);
  return cache_.size();
}

int SllMappingTable::compute(std::uint32_t mask) const {
  // Prim over the occupied cells.
  std::vector<SlrIndex> pts;
  for (int f = 0; f < topo_.count(); ++f)
    if (mask & (1u << f)) pts.push_back({f % topo_.cols, f / topo_.cols});
  std::size_t const k = pts.size();
  std::vector<int> best(k, 1 << 30);
  std::vector<bool> in(k, false);
  best[0] = 0;
  int total = 0;
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t u = k;
    for (std::size_t i = 0; i < k; ++i)
      if (!in[i] && (u == k || best[i] < best[u])) u = i;
    in[u] = true;
    total += best[u];
    for (std::size_t i = 0; i < k; ++i) {
      if (in[i]) continue;
      int const d = std::abs(pts[i].zx - pts[u].zx) + std::abs(pts[i].zy - pts[u].zy);
      best[i] = std::min(best[i], d);
    }
  }
  return total;
}

namespace {

SllMappingTable &table_for(SlrTopology const &topo) {
  // One table per grid shape; shapes are at most 5x5.
  static std::array<std::unique_ptr<SllMappingTable>, 36> tables;
  static std::mutex mu;
  std::lock_guard lock(mu);
  auto &t = tables[static_cast<std::size_t>(topo.rows * 6 + topo.cols)];
  if (!t) t = std::make_unique<SllMappingTable>(topo);
  return *t;
}

}  // namespace

SllMappingTable const &shared_sll_table(SlrTopology const &topo) { return table_for(topo); }

int net_sll_count(std::span<SlrIndex const> indices, SlrTopology const &topo) {
  return table_for(topo).count(indices);
}

std::vector<int> net_sll_counts(PlacementState const &s, Netlist const &n, SlrTopology const &topo,
                                bool include_clock) {
  auto const &table = table_for(topo);
  std::vector<int> out(n.nets.size(), 0);
  for (auto const &net : n.nets) {
    if (net.clock && !include_clock) continue;
    std::uint32_t mask = 0;
    for (auto const &p : net.pins) {
      auto const z = slr_index_clamped(s.x[static_cast<std::size_t>(p.instance)],
                                       s.y[static_cast<std::size_t>(p.instance)], topo);
      mask |= 1u << flat(z, topo);
    }
    out[static_cast<std::size_t>(net.id)] = table.count_mask(mask);
  }
  return out;
}

int total_sll(PlacementState const &s, Netlist const &n, SlrTopology const &topo, bool include_clock) {
  auto const c = net_sll_counts(s, n, topo, include_clock);
  return std::accumulate(c.begin(), c.end(), 0);
}

int mst_weight_oracle(std::span<SlrIndex const> points) {
  if (points.size() > 12) throw std::length_error("oracle limited to 12 points");
  std::size_t const k = points.size();
  struct Edge {
    int w;
    std::size_t a, b;
  };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      edges.push_back({std::abs(points[i].zx - points[j].zx) + std::abs(points[i].zy - points[j].zy), i, j});
  std::stable_sort(edges.begin(), edges.end(), [](Edge const &a, Edge const &b) { return a.w < b.w; });
  std::vector<std::size_t> parent(k);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  int total = 0;
  for (auto const &e : edges) {
    auto ra = find(e.a);
    auto rb = find(e.b);
    if (ra == rb) continue;
    parent[ra] = rb;
    total += e.w;
  }
  return total;
}

}  // namespace leaps
