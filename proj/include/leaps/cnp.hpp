#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "leaps/clockmodel.hpp"
#include "leaps/placement.hpp"

namespace leaps {

struct CnpConfig {
  double alpha = 8.0;          ///< weight of the SLL increase against distance
  bool signed_delta = true;    ///< false: accumulate |delta| per net
  int max_fanout = 100;        ///< nets above this fanout are ineligible
  std::int64_t node_limit = 200000;
  double time_limit_s = 0.0;   ///< 0 disables the wall-clock limit
  double tile_fraction = 0.5;  ///< clustering tile side as a fraction of a clock region
  int max_cluster = 64;
  double capacity_factor = 1.0;
  PointClockMode mode = PointClockMode::Inclusive;
};

/// Manhattan distance from p to the closed box; 0 inside.
double distance_cost(Point p, Box const &box);

struct SllIncreaseStats {
  std::size_t pin_visits = 0;
  std::size_t nets_evaluated = 0;
};

/// Increase in SLL count when each node is moved, one at a time, to the
/// centre of `target`. Nodes already in the target's SLR contribute 0.
double sll_increase(std::span<int const> nodes, ClockRegion const &target, PlacementState const &s,
                    Netlist const &n, SlrTopology const &topo, CnpConfig const &config,
                    SllIncreaseStats *stats = nullptr);

struct CnpItem {
  std::vector<int> members;  ///< instance ids
  ResourceVector demand{};
  std::vector<int> clocks;   ///< sorted clock net ids
};

struct CnpRegion {
  int id = 0;
  Box box;
  SlrIndex slr;
  ResourceVector capacity{};
  int max_clocks = 24;
};

/// Fixed clocked instance: a pre-assigned point in the clock budget check.
struct CnpFixedPoint {
  int clock = 0;
  Point at;
  int region = 0;
};

struct CnpProblem {
  std::vector<CnpItem> items;
  std::vector<CnpRegion> regions;
  std::vector<std::vector<double>> distance;  ///< [item][region]
  std::vector<std::vector<double>> increase;  ///< [item][region]
  double alpha = 1.0;
  std::vector<CnpFixedPoint> fixed;
  PointClockMode mode = PointClockMode::Inclusive;
  std::int64_t node_limit = 200000;
  double time_limit_s = 0.0;

  double cost(std::size_t item, std::size_t region) const {
    return distance[item][region] + alpha * increase[item][region];
  }
};

struct CnpSolution {
  bool feasible = false;
  bool optimal = false;  ///< search tree exhausted
  std::vector<int> assignment;  ///< region index per item
  double objective = 0.0;
  double lower_bound = 0.0;
  double gap = 0.0;
  std::int64_t nodes = 0;
  std::string certificate;  ///< reason when infeasible or truncated
};

CnpSolution solve_mapping(CnpProblem const &p);

/// Per-region clock counts from bounding boxes over assigned region boxes are
/// within budget.
bool feasible_clock_routing(CnpProblem const &p, std::vector<int> const &assignment);

/// Per-region per-field capacity holds.
bool capacity_ok(CnpProblem const &p, std::vector<int> const &assignment);

double assignment_cost(CnpProblem const &p, std::vector<int> const &assignment);

/// Clusters the movable clocked instances and fills the cost matrices.
CnpProblem build_cnp_problem(PlacementState const &s, Netlist const &n, FabricLayout const &layout,
                             CnpConfig const &config);

struct CnpResult {
  ClockMapping mapping;
  CnpSolution solution;
  std::size_t clusters = 0;
};

CnpResult run_cnp(PlacementState const &s, Netlist const &n, FabricLayout const &layout, CnpConfig const &config);

}  // namespace leaps
