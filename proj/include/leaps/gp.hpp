#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "leaps/clockmodel.hpp"
#include "leaps/cnp.hpp"
#include "leaps/density.hpp"
#include "leaps/wirelength.hpp"

namespace leaps {

/// EMA + Adam state driving the SLL weighting factor psi.
struct WlwState {
  double rho = 0.9;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double step = 0.1;  ///< t_psi
  double ema = 0.0;   ///< E_S
  double m = 0.0;     ///< psi_m
  double v = 0.0;     ///< psi_v
  double m_hat = 0.0;
  double v_hat = 0.0;
  int updates = 0;
};

/// One WLW update from the SLL growth `delta` since the previous outer
/// iteration. Returns the new psi, clamped to >= 0.
double wlw_update(WlwState &w, double delta, double psi);

/// Multiplicative ascent lambda_s *= clamp(base^tau_s, 1, max_step).
void update_lambda(std::vector<double> &lambda, std::vector<double> const &overflow, double base = 1.1,
                   double max_step = 1.6);

/// eta_w |grad W_psi|_1 / sum_s sum_i |dPhi_s/d(x_i, y_i)|_1, the same value
/// for every field. Falls back to eta_w per field when the denominator is 0.
struct LambdaInit {
  std::vector<double> lambda;
  double wl_norm = 0.0;
  double field_norm = 0.0;
  bool fallback = false;
};

/// `x`, `y` hold the density objects (instances first, then fillers).
LambdaInit init_lambda(std::vector<double> const &x, std::vector<double> const &y, Netlist const &n,
                       SlrTopology const &topo, WlParams const &wl, DensityModel &density, double eta_w = 1e-4);

/// Wirelength smoothing schedule from overflow (bin-scaled, coarse at high overflow).
double gamma_h_schedule(double overflow, double bin);
/// Soft-floor gain: gamma_lo at overflow >= hi, gamma_hi at overflow <= lo, geometric between.
double gamma_s_schedule(double overflow, double gamma_lo, double gamma_hi, double lo = 0.15, double hi = 0.9);

struct GpConfig {
  std::uint64_t seed = 1;
  int max_iterations = 3000;
  double target_overflow = 0.10;
  double band_lo = 0.15;
  double band_hi = 0.9;

  bool wlw = true;
  double psi0 = 0.5;
  double t_psi = 0.1;
  int wlw_period = 10;  ///< in-band iterations per psi update
  bool psi_floor = true;  ///< WLW never takes psi below psi0
  double sll_scale = 0.0;  ///< layout units per unit of z span; 0 means the mean SLR pitch

  double eta_w = 1e-4;
  double lambda_base = 1.1;
  double lambda_max_step = 1.6;
  double quad_weight = 1.0;  ///< W_s = quad_weight / Phi_s at the start

  double gamma_s_lo = 2.0;
  double gamma_s_hi = 20.0;

  bool inflation = true;
  double kappa = 0.1;

  bool cnp = true;
  int cnp_rounds = 3;
  int iterations_per_round = 150;
  double outside_target = 0.01;
  double eta_growth = 1.1;
  CnpConfig cnp_config;
  ClockPenaltyConfig clock;

  DensityConfig density;
  double jitter = 0.1;  ///< initial spread around the centroid, in bins
  double armijo = 1e-4;
};

/// Per-iteration log record.
struct GpRecord {
  int iteration = 0;
  double objective = 0.0;
  double hpwl = 0.0;
  int sll = 0;
  double overflow = 0.0;
  std::vector<double> overflow_field;
  std::vector<double> energy;
  std::vector<double> lambda;
  double psi = 0.0;
  double eta = 0.0;
  double gamma_h = 0.0;
  double gamma_s = 0.0;
  double step = 0.0;
  bool wlw_active = false;
  bool inflated = false;
  int cnp_round = 0;
};

struct GpReport {
  std::vector<GpRecord> records;
  bool converged = false;
  std::string reason;
  int cnp_rounds = 0;
  std::vector<std::string> warnings;
  CnpSolution last_cnp;
  double outside_fraction = 0.0;
  std::vector<std::string> fields;
};

void write_gp_record(GpRecord const &r, std::ostream &out);
void write_gp_report_jsonl(GpReport const &r, std::ostream &out);

struct GpResult {
  PlacementState placement;
  ClockMapping mapping;
  GpReport report;
};

/// Objective value and gradient at the density objects.
struct GpEval {
  double value = 0.0;
  double wl = 0.0;
  double density = 0.0;
  double clock = 0.0;
  std::vector<double> gx, gy;
  DensityEval dens;
};

/// Optimizer state. Positions cover all density objects: netlist instances
/// (ids 0..N-1) followed by fillers.
struct GpState {
  std::vector<double> x, y;
  std::vector<double> lambda, w;
  double psi = 0.0;
  double eta = 0.0;
  double gamma_h = 1.0;
  double gamma_s = 1.0;
  WlwState wlw;
  ClockMapping mapping;
  int iteration = 0;
  int outer = 0;
  double overflow = 1.0;
  std::vector<double> overflow_history;

  // Nesterov memory.
  std::vector<double> ux, uy;  ///< major sequence
  std::vector<double> px, py;  ///< previous extrapolated point
  std::vector<double> pgx, pgy;  ///< preconditioned gradient there
  double a = 1.0;
  double alpha = 0.0;
  bool has_prev = false;
  std::uint64_t epoch = 0;    ///< bumped whenever the objective changes
  std::uint64_t u_epoch = ~0ULL;
  double u_value = 0.0;
  double last_step = 0.0;
};

/// Owns the density model and evaluates L = W_psi + sum lambda_s D_s + eta Gamma.
class GpEngine {
 public:
  GpEngine(Netlist const &n, FabricLayout const &layout, GpConfig const &config);

  Netlist const &netlist() const { return n_; }
  FabricLayout const &layout() const { return layout_; }
  GpConfig const &config() const { return config_; }
  DensityModel &density() { return *density_; }
  std::size_t num_objects() const { return density_->num_objects(); }
  bool movable(std::size_t object) const { return object >= n_.instances.size() || !n_.instances[object].fixed; }

  /// Initial positions (instances and fillers) and multipliers.
  GpState initial_state();

  void evaluate(GpState const &st, std::vector<double> const &x, std::vector<double> const &y, GpEval &out,
                bool want_grad = true);

  PlacementState instances(std::vector<double> const &x, std::vector<double> const &y) const;
  /// Wirelength parameters at the current state (psi scaled to layout units).
  WlParams wl_params(GpState const &st) const;

 private:
  std::vector<double> precondition(GpState const &st) const;
  friend void solve_subproblem_step(GpEngine &engine, GpState &st);

  Netlist const &n_;
  FabricLayout const &layout_;
  GpConfig config_;
  std::unique_ptr<DensityModel> density_;
  double sll_scale_ = 1.0;
  std::vector<double> degree_;
  std::vector<std::vector<double>> field_mass_;  // [field][object]
};

/// One preconditioned Nesterov step with Armijo backtracking from a BB step
/// estimate. Multipliers in `st` are held fixed.
void solve_subproblem_step(GpEngine &engine, GpState &st);

/// Marks a change of multipliers so stale objective values are not compared.
inline void objective_changed(GpState &st) { ++st.epoch; }

GpResult run_global_placement(Netlist const &n, FabricLayout const &layout, GpConfig const &config);

}  // namespace leaps
