#pragma once

#include <string>
#include <vector>

#include "leaps/netlist.hpp"
#include "leaps/placement.hpp"

namespace leaps {

/// Instances as dots, one CSS class `slrK` per SLR index K, over SLR and clock
/// region outlines.
std::string placement_svg(PlacementState const &s, Netlist const &n, FabricLayout const &layout);

/// Demand over capacity per density bin (all fields pooled), at most 64x64 cells.
std::string density_svg(PlacementState const &s, Netlist const &n, FabricLayout const &layout);

struct TraceSeries {
  std::string name;
  std::vector<double> values;
};

/// One panel per series, each a polyline with one point per value. Series with
/// no values still get axes.
std::string trace_svg(std::vector<TraceSeries> const &series, std::string const &title);

}  // namespace leaps
