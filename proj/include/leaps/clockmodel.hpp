#pragma once

#include <string>
#include <vector>

#include "leaps/placement.hpp"

namespace leaps {

/// How a clock whose bounding box degenerates inside a region is counted.
enum class PointClockMode {
  Inclusive,  ///< P = 1 also when H >= 0, V >= 0 and an instance lies in the region
  Literal,    ///< P = 1 iff H > 0 and V > 0
};

struct ClockUsageEntry {
  int clock = 0;   ///< clock net id
  int region = 0;  ///< ClockRegion::id (the SLR is implied by the region)
  double h = 0.0;
  double v = 0.0;
  bool used = false;  ///< P(k, o, z)
};

struct ClockUsage {
  /// One entry per (clock, region) pair on SLRs where the clock has instances.
  std::vector<ClockUsageEntry> entries;
  std::vector<int> region_count;  ///< sum_k P per region
  std::vector<int> hc_count;      ///< distinct clocks per half-column
};

ClockUsage clock_usage(PlacementState const &s, Netlist const &n, FabricLayout const &layout,
                       PointClockMode mode = PointClockMode::Inclusive);

struct ClockViolation {
  enum class Kind { Region, HalfColumn } kind = Kind::Region;
  int id = 0;  ///< region id or half-column id
  int count = 0;
  int limit = 0;
  std::string describe() const;
};

std::vector<ClockViolation> check_constraints(ClockUsage const &usage, FabricLayout const &layout);

/// Region assignment per instance id; -1 for unmapped instances.
struct ClockMapping {
  std::vector<int> region;

  bool empty() const { return region.empty(); }
  int of(int instance) const {
    return region.empty() ? -1 : region[static_cast<std::size_t>(instance)];
  }
};

/// Piecewise quadratic distance of one coordinate to [lo, hi]; optional derivative.
double bowl(double v, double lo, double hi, double *derivative = nullptr);

/// Gamma = sum over mapped movable instances of the x and y bowls around their
/// region box. Adds dGamma into grad_x/grad_y when they are non-null.
double clock_penalty(PlacementState const &s, Netlist const &n, ClockMapping const &mapping,
                     FabricLayout const &layout, std::vector<double> *grad_x = nullptr,
                     std::vector<double> *grad_y = nullptr);

struct ClockPenaltyConfig {
  double iota = 1e-4;
  double epsilon = 1e-2;
  double eta = 0.0;
};

/// iota |grad W| / (|grad Gamma| + epsilon).
double update_eta(double wl_grad_norm, double clock_grad_norm, ClockPenaltyConfig const &config);

/// Fraction of mapped instances lying outside their region box.
double outside_fraction(PlacementState const &s, ClockMapping const &mapping, FabricLayout const &layout);

}  // namespace leaps
