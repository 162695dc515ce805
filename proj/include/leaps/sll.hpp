#pragma once

#include <cstdint>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "leaps/placement.hpp"

namespace leaps {

/// Crossing counts keyed by the set of occupied SLRs. A set of SLR indices on
/// a topology with at most 5x5 dies is canonicalized as a 25-bit occupancy
/// mask, so the key is independent of order and duplicates.
class SllMappingTable {
 public:
  explicit SllMappingTable(SlrTopology const &topo);

  int count(std::span<SlrIndex const> indices) const;
  int count_mask(std::uint32_t mask) const;
  std::uint32_t mask_of(std::span<SlrIndex const> indices) const;
  std::size_t cached() const;

  SlrTopology const &topology() const { return topo_; }

 private:
  int compute(std::uint32_t mask) const;

  SlrTopology topo_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::uint32_t, int> cache_;
};

/// Process-wide table for the topology's grid shape.
SllMappingTable const &shared_sll_table(SlrTopology const &topo);

/// MST weight (L1 metric on the SLR grid) over the distinct indices; 0 for
/// fewer than two distinct indices.
int net_sll_count(std::span<SlrIndex const> indices, SlrTopology const &topo);

/// Sum over nets of the crossing count of the set of SLRs its instances occupy.
int total_sll(PlacementState const &s, Netlist const &n, SlrTopology const &topo, bool include_clock = true);

/// Per-net crossing counts (clock nets get 0 when include_clock is false).
std::vector<int> net_sll_counts(PlacementState const &s, Netlist const &n, SlrTopology const &topo,
                                bool include_clock = true);

/// Exhaustive Kruskal over the complete L1 graph. Throws std::length_error for
/// more than 12 points.
int mst_weight_oracle(std::span<SlrIndex const> points);

}  // namespace leaps
