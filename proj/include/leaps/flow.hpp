#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "leaps/gp.hpp"
#include "leaps/io.hpp"
#include "leaps/lgdp.hpp"

namespace leaps {

struct StageSet {
  bool gp = true;
  bool cnp = true;
  bool lg = true;
  bool dp = true;

  bool any() const { return gp || cnp || lg || dp; }
};

/// Comma-separated stage names in any order ("gp,lg,dp,cnp"). Throws
/// ConfigError("stages") on unknown names, an empty set, cnp without gp or dp
/// without lg.
StageSet parse_stages(std::string const &text);
/// Normalized order: gp,cnp,lg,dp.
std::string stage_string(StageSet s);

struct RunConfig {
  std::string netlist_path;
  std::string arch_path;
  std::string out_dir = ".";
  int topology_cols = 0;  ///< 0 keeps the architecture file's SLR grid
  int topology_rows = 0;
  std::uint64_t seed = 1;
  StageSet stages;
  int threads = 1;
  GpConfig gp;
  LgdpConfig lgdp;

  /// Settings that affect results, one `key value` per line. Paths and the
  /// thread count are left out.
  std::string canonical() const;
  std::string hash() const { return fnv1a_hex(canonical()); }
  /// GpConfig with the seed, stage toggles and thread count applied.
  GpConfig effective_gp() const;
};

struct StageMetrics {
  std::string stage;
  double hpwl = 0.0;
  int sll = 0;
  double delta_hpwl = 0.0;  ///< against the previous stage
  int delta_sll = 0;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct MetricsReport {
  std::string design;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string topology;
  std::string stages;
  std::size_t instances = 0;
  double hpwl = 0.0;
  int sll = 0;
  std::vector<StageMetrics> per_stage;
  std::vector<ClockViolation> clock_violations;
  std::size_t overlaps = 0;
  std::vector<double> overflow_trace;
  double final_overflow = 0.0;
  bool converged = true;
  std::string reason;
  std::vector<std::string> warnings;
  int gp_iterations = 0;
  int cnp_rounds = 0;
  double outside_fraction = 0.0;
  double lg_displacement = 0.0;
  std::size_t lg_rejections = 0;
  int dp_passes = 0;
  int dp_improved_sets = 0;
  std::vector<StageTiming> timing;  ///< kept out of the report JSON
};

std::string metrics_json(MetricsReport const &r);
MetricsReport parse_metrics_json(std::string const &text);
std::string timing_json(std::vector<StageTiming> const &t);

struct FlowResult {
  PlacementFile placement;
  ClockMapping mapping;
  GpReport gp;
  LegalPlacement legal;
  DpStats dp;
  MetricsReport report;
  /// 0 on success, 3 when GP did not converge or LG found no legal site.
  int exit_code = 0;
};

/// Runs the enabled stages in order GP (with CNP inside) -> LG -> DP.
FlowResult run_flow(Netlist const &n, FabricLayout const &layout, RunConfig const &config);

/// Architecture with the topology override applied and the SLR size re-derived
/// from the total width and height.
ArchConfig apply_topology(ArchConfig arch, int cols, int rows);

struct CheckIssue {
  std::string kind;  ///< "overlap", "clock", "site", "fixed", "bounds"
  std::string message;
};

struct CheckResult {
  double hpwl = 0.0;
  int sll = 0;
  std::vector<OverlapViolation> overlaps;
  std::vector<ClockViolation> clock;
  std::vector<CheckIssue> issues;

  bool clean() const { return issues.empty(); }
};

/// Recomputes metrics and legality from the placement alone. HPWL and SLL cover
/// signal nets. Instances without a slice id are assigned the site containing
/// their position.
CheckResult check_placement(PlacementFile const &p, Netlist const &n, FabricLayout const &layout);
std::string check_json(CheckResult const &c);

/// The `small20` preset: 20 seeded designs from 2000 to 7700 instances; every
/// fourth one has more clocks than a clock region can hold.
std::vector<GeneratorParams> suite_small20();

std::string mapping_json(ClockMapping const &m, FabricLayout const &layout);
std::string audit_json(std::vector<LgRejection> const &audit);

}  // namespace leaps
