#pragma once

#include <string>
#include <vector>

#include "leaps/clockmodel.hpp"
#include "leaps/placement.hpp"

namespace leaps {

struct LgdpConfig {
  double phi_w = 0.02;     ///< weight of the placement terms in the score
  double alpha_lg = 4.0;   ///< SLL weight against HPWL
  int window = 5;          ///< initial search window side, in sites
  int dp_passes = 10;
  double dp_min_gain = 5e-4;  ///< stop when a pass improves less than this fraction
  int set_size = 32;
  int set_radius = 4;      ///< neighbourhood radius in sites when growing an independent set
  int empty_slots = 8;     ///< free slots added to each matching
  PointClockMode mode = PointClockMode::Inclusive;
};

/// Cells placed together into one site during legalization.
struct LgCluster {
  std::vector<int> members;
};

/// Clustering term plus the weighted placement deltas.
double score(double clustering, double delta_hpwl, double delta_sll, double phi_w, double alpha_lg);

/// Sum over signal nets touching `c` of (internal pins - 1) / (total pins - 1);
/// nets with a single pin are skipped.
double clustering_term(LgCluster const &c, Netlist const &n);

/// Incremental net state: per-net HPWL and SLL count over signal nets.
class NetState {
 public:
  NetState(Netlist const &n, SlrTopology const &topo, PlacementState s);

  PlacementState const &placement() const { return s_; }
  double hpwl() const { return hpwl_; }
  long sll() const { return sll_; }
  double net_hpwl(int net) const { return net_hpwl_[static_cast<std::size_t>(net)]; }
  int net_sll(int net) const { return net_sll_[static_cast<std::size_t>(net)]; }

  struct Delta {
    double hpwl = 0.0;
    int sll = 0;
  };

  /// Exact change of HPWL and SLL when `cell` moves to `to` (nothing applied).
  Delta delta(int cell, Point to) const;
  /// Exact change for a simultaneous move of several cells.
  Delta delta(std::vector<int> const &cells, std::vector<Point> const &to) const;
  void move(int cell, Point to);
  void move(std::vector<int> const &cells, std::vector<Point> const &to);

 private:
  double eval_hpwl(Net const &net) const;
  int eval_sll(Net const &net) const;

  Netlist const &n_;
  SlrTopology topo_;
  PlacementState s_;
  std::vector<double> net_hpwl_;
  std::vector<int> net_sll_;
  double hpwl_ = 0.0;
  long sll_ = 0;
};

/// (dHPWL, dSLL) of moving `cell` to `to`.
inline NetState::Delta delta_metrics(NetState const &state, int cell, Point to) { return state.delta(cell, to); }

struct LgRejection {
  int cell = 0;
  int site = 0;
  std::string reason;
};

struct LegalPlacement {
  std::vector<int> site;        ///< site id per instance
  PlacementState placement;     ///< site centres (fixed instances keep their position)
  std::vector<ResourceVector> occupancy;  ///< per site
  std::vector<LgRejection> audit;
  bool feasible = true;
  std::string failure;
  double displacement = 0.0;
};

/// Tracks per-half-column clock sets and per-region clock counts from the
/// bounding boxes of placed cells, so LG can refuse over-budget sites.
class ClockBudget {
 public:
  ClockBudget(Netlist const &n, FabricLayout const &layout);

  /// Whether placing a cell with `clocks` at `p` keeps every budget.
  bool allows(std::vector<int> const &clocks, Point p, std::string *why = nullptr) const;
  void add(std::vector<int> const &clocks, Point p);

  int region_count(int region) const { return region_count_[static_cast<std::size_t>(region)]; }
  int hc_count(int hc) const { return static_cast<int>(hc_clocks_[static_cast<std::size_t>(hc)].size()); }

 private:
  struct BoxState {
    bool any = false;
    Box box;
  };
  /// Regions on `slr` meeting the closed box `b` (degenerate boxes included).
  void regions_touched(Box const &b, int slr, std::vector<int> &out) const;

  FabricLayout const &layout_;
  int nslr_ = 1;
  std::vector<std::vector<int>> regions_on_;  // per flat SLR
  std::vector<std::vector<int>> hc_clocks_;   // per half-column, sorted distinct clocks
  std::vector<int> region_count_;
  std::vector<int> clock_slot_;               // net id -> slot, -1 for signal nets
  std::vector<std::vector<BoxState>> boxes_;  // [slot][slr]
  std::vector<std::vector<char>> counted_;    // [slot][region]
};

LegalPlacement legalize(PlacementState const &gp, ClockMapping const &mapping, FabricLayout const &layout,
                        Netlist const &n, LgdpConfig const &config = {});

struct DpStats {
  int passes = 0;
  int sets = 0;
  int improved_sets = 0;
  double cost_before = 0.0;
  double cost_after = 0.0;
  std::vector<double> pass_cost;
};

/// Independent-set matching passes; the HPWL + alpha_lg * SLL cost never increases.
LegalPlacement detailed_place(LegalPlacement const &lp, ClockMapping const &mapping, Netlist const &n,
                              FabricLayout const &layout, LgdpConfig const &config = {}, DpStats *stats = nullptr);

/// Minimum-cost assignment of rows to distinct columns (rows <= columns).
/// Returns the column per row; costs may contain +inf for forbidden pairs.
std::vector<int> hungarian(std::vector<std::vector<double>> const &cost);

/// Per-site occupancy over capacity, reported as violations.
struct OverlapViolation {
  int site = 0;
  Resource resource = Resource::LUTL;
  double used = 0.0;
  double capacity = 0.0;
};
std::vector<OverlapViolation> check_overlap(std::vector<int> const &site, Netlist const &n,
                                            FabricLayout const &layout);

}  // namespace leaps
