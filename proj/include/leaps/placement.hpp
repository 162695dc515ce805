#pragma once

#include <vector>

#include "leaps/arch.hpp"
#include "leaps/netlist.hpp"

namespace leaps {

/// Continuous coordinates of every instance, indexed by instance id.
struct PlacementState {
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const { return x.size(); }
  Point at(int i) const { return {x[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(i)]}; }
  void set(int i, Point p) {
    x[static_cast<std::size_t>(i)] = p.x;
    y[static_cast<std::size_t>(i)] = p.y;
  }
};

/// Fixed instances at their positions, movable ones at their given position or
/// at the layout centre.
PlacementState initial_state(Netlist const &n, FabricLayout const &layout);

/// Hard SLR index of every instance (clamped into the layout).
std::vector<SlrIndex> slr_indices(PlacementState const &s, SlrTopology const &topo);

}  // namespace leaps
