#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "leaps/placement.hpp"

namespace leaps {

/// Spectral Poisson solver on a fixed bin grid (Neumann boundary).
class PoissonSolver {
 public:
  PoissonSolver(int nx, int ny, double width, double height);
  ~PoissonSolver();
  PoissonSolver(PoissonSolver const &) = delete;
  PoissonSolver &operator=(PoissonSolver const &) = delete;

  /// Solves lap(phi) = -(mass - target) / bin_area. Returns 1/2 sum (mass - target) phi.
  double solve(std::vector<double> const &mass, std::vector<double> const &target, std::vector<double> &phi);
  /// Electric field -grad(phi) per bin from the last solve.
  void field(std::vector<double> &ex, std::vector<double> &ey);

  int nx() const { return nx_; }
  int ny() const { return ny_; }

 private:
  struct Plans;
  int nx_, ny_;
  double width_, height_;
  std::vector<double> wx_, wy_;
  std::vector<double> coeff_;
  std::unique_ptr<Plans> plans_;
};

struct Potential {
  double energy = 0.0;
  std::vector<double> phi;
  std::vector<double> ex;
  std::vector<double> ey;
};

/// One-shot solve. Target is capacity scaled to the total mass. Throws
/// ConfigError for fewer than 2 bins per axis.
Potential solve_potential(std::vector<double> const &mass, std::vector<double> const &capacity, int nx, int ny,
                          double width, double height);

/// sum max(mass - cap, 0) / sum mass; 0 for an empty map.
double density_overflow(std::vector<double> const &mass, std::vector<double> const &capacity);

/// Per-bin demand of field `r` from the real instances (no fillers).
std::vector<double> splat_density(PlacementState const &s, Netlist const &n, Resource r,
                                  FabricLayout const &layout, double stretch = 1.4142135623730951);

/// sum_s lambda_s (Phi_s + W_s Phi_s^2 / 2).
double density_penalty_value(std::vector<double> const &energy, std::vector<double> const &lambda,
                             std::vector<double> const &w);

struct DensityConfig {
  bool fillers = true;
  double stretch = 1.4142135623730951;  ///< minimum footprint side in bins
  int threads = 1;
  std::uint64_t seed = 1;
};

struct FieldState {
  Resource resource = Resource::LUTL;
  double demand = 0.0;    ///< real demand
  double capacity = 0.0;  ///< total capacity
  std::vector<double> cap;
  std::vector<double> mass;       ///< real + fillers, as seen by the solver
  std::vector<double> mass_real;  ///< real instances at original demand
  std::vector<double> phi;
  std::vector<double> ex, ey;
  double energy = 0.0;
  double overflow = 0.0;
};

struct DensityEval {
  double value = 0.0;
  double overflow = 0.0;  ///< demand-weighted over fields
  std::vector<double> energy;
  std::vector<double> overflow_field;
  std::vector<double> grad_x;
  std::vector<double> grad_y;
};

/// Multi-field density model over "objects": the netlist instances (ids
/// 0..N-1) followed by filler objects. Overflow uses the box footprint; the
/// electrostatic charge of an object is a separable tent of half-width sqrt(2)
/// times the box half-extent (same variance), so its energy is C1 in position.
class DensityModel {
 public:
  DensityModel(Netlist const &n, FabricLayout const &layout, DensityConfig const &config = {});
  ~DensityModel();

  std::size_t num_instances() const { return num_instances_; }
  std::size_t num_objects() const { return num_instances_ + filler_field_.size(); }
  std::size_t num_fields() const { return fields_.size(); }
  std::vector<FieldState> const &fields() const { return fields_; }
  /// Index into fields() of the filler's field, for object ids >= num_instances().
  int filler_field(std::size_t object) const { return filler_field_[object - num_instances_]; }

  /// Appends seeded filler positions, spread in proportion to free capacity.
  void place_fillers(std::vector<double> &x, std::vector<double> &y) const;

  /// Multiplies each instance's density mass by factor[i]; filler mass shrinks
  /// so the field total stays at capacity when possible.
  void set_inflation(std::vector<double> const &factor);

  /// Density charge of each object (sum of its masses), used by preconditioning.
  std::vector<double> const &charge() const { return charge_; }

  /// Evaluates Phi_s per field, penalty value and (optionally) its gradient per
  /// object. lambda and w are per field.
  void evaluate(std::vector<double> const &x, std::vector<double> const &y, std::vector<double> const &lambda,
                std::vector<double> const &w, DensityEval &out, bool want_grad = true);

  /// Overflow of real instances only (also refreshes fields()[].mass_real).
  double overflow(std::vector<double> const &x, std::vector<double> const &y);

  /// Field vectors for export; call after evaluate().
  void compute_fields();

  /// Sum over objects of charge * |field| per object (the denominator of the
  /// multiplier initialization), per field.
  std::vector<double> field_norms(std::vector<double> const &x, std::vector<double> const &y);

  /// Per-object gradient of Phi_s for field index f (no multipliers).
  void energy_gradient(std::size_t f, std::vector<double> const &x, std::vector<double> const &y,
                       std::vector<double> &gx, std::vector<double> &gy) const;

 private:
  struct Member {
    std::uint32_t object;
    double mass;
    double base_mass;
    double hw, hh;
    double base_hw, base_hh;
  };
  void splat(std::vector<Member> const &members, std::vector<double> const &x, std::vector<double> const &y,
             bool real_only, std::vector<double> &out) const;
  void charge_splat(std::vector<Member> const &members, std::vector<double> const &x,
                    std::vector<double> const &y, std::vector<double> &out) const;
  void gradient(std::vector<Member> const &members, std::vector<double> const &phi, std::vector<double> const &x,
                std::vector<double> const &y, double scale, std::vector<double> &gx, std::vector<double> &gy) const;
  void solve_field(std::size_t f, std::vector<double> const &x, std::vector<double> const &y);
  double half_extent(double mass, double density, double bin) const;

  FabricLayout const &layout_;
  DensityConfig config_;
  std::size_t num_instances_ = 0;
  int nx_ = 0, ny_ = 0;
  double bw_ = 0, bh_ = 0;
  std::vector<FieldState> fields_;
  std::vector<std::vector<Member>> members_;  // per field
  std::vector<std::unique_ptr<PoissonSolver>> solvers_;
  std::vector<double> cap_density_;             // per field, capacity per unit area of the densest site
  std::vector<int> filler_field_;
  std::vector<double> charge_;
  std::vector<std::vector<double>> target_;
};

}  // namespace leaps
