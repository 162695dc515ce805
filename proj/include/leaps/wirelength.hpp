#pragma once

#include <vector>

#include "leaps/placement.hpp"

namespace leaps {

struct WlParams {
  double gamma_h = 1.0;  ///< x/y smoothing, layout units
  double gamma_s = 1.0;  ///< z sharpness, also the soft-floor sigmoid gain
  double psi = 0.0;      ///< SLL weighting factor
};

/// Value and gradient of a smooth wirelength term. Gradients are indexed by
/// instance id; fixed instances keep zero entries.
struct WlEval {
  double value = 0.0;
  double wl_h = 0.0;  ///< smoothed x/y part
  double wl_s = 0.0;  ///< smoothed z part (before psi)
  std::vector<double> grad_x;
  std::vector<double> grad_y;
};

/// Weighted half-perimeter wirelength over pin positions of the signal nets.
/// Clock nets are skipped here and in the smooth models.
double hpwl(PlacementState const &s, Netlist const &n);
/// Per-net unweighted half perimeter.
double net_hpwl(PlacementState const &s, Net const &net);

WlEval wa_wirelength_xy(PlacementState const &s, Netlist const &n, double gamma_h);

/// Continuous SLR coordinates and their derivatives.
struct SoftZ {
  std::vector<double> zx, zy;
  std::vector<double> dzx_dx, dzy_dy;
};

/// zx(x) = sum_{k=1}^{cols-1} sigmoid(gamma_s (x/delta_x - k)), likewise zy.
SoftZ soft_floor_z(PlacementState const &s, SlrTopology const &topo, double gamma_s);
/// Scalar form used by tests and plots.
double soft_floor(double x, double ref, double pitch, int count, double gamma_s, double *derivative = nullptr);

/// WA max-minus-min of zx and of zy per net, chained back to x/y.
WlEval wa_wirelength_z(SoftZ const &z, Netlist const &n, double gamma_s);

/// W_H + psi * W_S.
WlEval total_wl_objective(PlacementState const &s, Netlist const &n, SlrTopology const &topo,
                          WlParams const &params);

/// Numerically stable weighted-average max/min of `v` with sharpness `a`
/// (a = 1/gamma). Writes d(max - min)/dv_j into `grad` and returns max - min.
double wa_span(std::vector<double> const &v, double a, std::vector<double> &grad);

}  // namespace leaps
