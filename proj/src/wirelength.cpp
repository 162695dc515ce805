#include "leaps/wirelength.hpp"

#include <algorithm>
#include <cmath>

namespace leaps {

namespace {

constexpr double kExpFloor = -40.0;

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  double const e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

double net_hpwl(PlacementState const &s, Net const &net) {
  if (net.pins.empty()) return 0.0;
  double lx = 1e300, hx = -1e300, ly = 1e300, hy = -1e300;
  for (auto const &p : net.pins) {
    double const x = s.x[static_cast<std::size_t>(p.instance)] + p.dx;
    double const y = s.y[static_cast<std::size_t>(p.instance)] + p.dy;
    lx = std::min(lx, x);
    hx = std::max(hx, x);
    ly = std::min(ly, y);
    hy = std::max(hy, y);
  }
  return (hx - lx) + (hy - ly);
}

double hpwl(PlacementState const &s, Netlist const &n) {
  double total = 0.0;
  for (auto const &net : n.nets)
    if (!net.clock) total += net.weight * net_hpwl(s, net);
  return total;
}

double wa_span(std::vector<double> const &v, double a, std::vector<double> &grad) {
  std::size_t const k = v.size();
  grad.assign(k, 0.0);
  if (k < 2) return 0.0;
  double const vmax = *std::max_element(v.begin(), v.end());
  double const vmin = *std::min_element(v.begin(), v.end());
  thread_local std::vector<double> w, u;
  thread_local std::vector<char> wc, uc;
  w.resize(k);
  u.resize(k);
  wc.resize(k);
  uc.resize(k);
  double S = 0, T = 0, U = 0, R = 0;
  for (std::size_t j = 0; j < k; ++j) {
    double ew = a * (v[j] - vmax);
    double eu = -a * (v[j] - vmin);
    wc[j] = ew < kExpFloor;
    uc[j] = eu < kExpFloor;
    w[j] = std::exp(std::max(ew, kExpFloor));
    u[j] = std::exp(std::max(eu, kExpFloor));
    S += w[j];
    T += v[j] * w[j];
    U += u[j];
    R += v[j] * u[j];
  }
  double const M = T / S;
  double const m = R / U;
  for (std::size_t j = 0; j < k; ++j) {
    double const dM = w[j] / S * (1.0 + (wc[j] ? 0.0 : a * (v[j] - M)));
    double const dm = u[j] / U * (1.0 - (uc[j] ? 0.0 : a * (v[j] - m)));
    grad[j] = dM - dm;
  }
  return M - m;
}

WlEval wa_wirelength_xy(PlacementState const &s, Netlist const &n, double gamma_h) {
  WlEval out;
  out.grad_x.assign(s.size(), 0.0);
  out.grad_y.assign(s.size(), 0.0);
  double const a = 1.0 / gamma_h;
  std::vector<double> vx, vy, gx, gy;
  for (auto const &net : n.nets) {
    if (net.clock || net.pins.size() < 2 || net.weight == 0.0) continue;
    vx.clear();
    vy.clear();
    for (auto const &p : net.pins) {
      vx.push_back(s.x[static_cast<std::size_t>(p.instance)] + p.dx);
      vy.push_back(s.y[static_cast<std::size_t>(p.instance)] + p.dy);
    }
    double const val = wa_span(vx, a, gx) + wa_span(vy, a, gy);
    out.value += net.weight * val;
    for (std::size_t j = 0; j < net.pins.size(); ++j) {
      auto const i = static_cast<std::size_t>(net.pins[j].instance);
      if (n.instances[i].fixed) continue;
      out.grad_x[i] += net.weight * gx[j];
      out.grad_y[i] += net.weight * gy[j];
    }
  }
  out.wl_h = out.value;
  return out;
}

double soft_floor(double x, double ref, double pitch, int count, double gamma_s, double *derivative) {
  double const t = (x - ref) / pitch;
  double z = 0.0;
  double dz = 0.0;
  for (int k = 1; k < count; ++k) {
    double const sg = sigmoid(gamma_s * (t - k));
    z += sg;
    dz += gamma_s * sg * (1.0 - sg) / pitch;
  }
  if (derivative) *derivative = dz;
  return z;
}

SoftZ soft_floor_z(PlacementState const &s, SlrTopology const &topo, double gamma_s) {
  SoftZ z;
  std::size_t const n = s.size();
  z.zx.resize(n);
  z.zy.resize(n);
  z.dzx_dx.resize(n);
  z.dzy_dy.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    z.zx[i] = soft_floor(s.x[i], topo.ref.x, topo.slr_width, topo.cols, gamma_s, &z.dzx_dx[i]);
    z.zy[i] = soft_floor(s.y[i], topo.ref.y, topo.slr_height, topo.rows, gamma_s, &z.dzy_dy[i]);
  }
  return z;
}

WlEval wa_wirelength_z(SoftZ const &z, Netlist const &n, double gamma_s) {
  WlEval out;
  std::size_t const N = z.zx.size();
  out.grad_x.assign(N, 0.0);
  out.grad_y.assign(N, 0.0);
  bool const use_x = std::any_of(z.dzx_dx.begin(), z.dzx_dx.end(), [](double d) { return d != 0.0; }) ||
                     std::any_of(z.zx.begin(), z.zx.end(), [](double v) { return v != 0.0; });
  bool const use_y = std::any_of(z.dzy_dy.begin(), z.dzy_dy.end(), [](double d) { return d != 0.0; }) ||
                     std::any_of(z.zy.begin(), z.zy.end(), [](double v) { return v != 0.0; });
  std::vector<double> v, g;
  for (auto const &net : n.nets) {
    if (net.clock || net.pins.size() < 2 || net.weight == 0.0) continue;
    for (int axis = 0; axis < 2; ++axis) {
      if ((axis == 0 && !use_x) || (axis == 1 && !use_y)) continue;
      auto const &zz = axis == 0 ? z.zx : z.zy;
      auto const &dz = axis == 0 ? z.dzx_dx : z.dzy_dy;
      auto &grad = axis == 0 ? out.grad_x : out.grad_y;
      v.clear();
      for (auto const &p : net.pins) v.push_back(zz[static_cast<std::size_t>(p.instance)]);
      out.value += net.weight * wa_span(v, gamma_s, g);
      for (std::size_t j = 0; j < net.pins.size(); ++j) {
        auto const i = static_cast<std::size_t>(net.pins[j].instance);
        if (n.instances[i].fixed) continue;
        grad[i] += net.weight * g[j] * dz[i];
      }
    }
  }
  out.wl_s = out.value;
  return out;
}

WlEval total_wl_objective(PlacementState const &s, Netlist const &n, SlrTopology const &topo,
                          WlParams const &params) {
  WlEval out = wa_wirelength_xy(s, n, params.gamma_h);
  if (topo.count() > 1) {
    auto const z = soft_floor_z(s, topo, params.gamma_s);
    auto const ws = wa_wirelength_z(z, n, params.gamma_s);
    out.wl_s = ws.value;
    for (std::size_t i = 0; i < s.size(); ++i) {
      out.grad_x[i] += params.psi * ws.grad_x[i];
      out.grad_y[i] += params.psi * ws.grad_y[i];
    }
  }
  out.value = out.wl_h + params.psi * out.wl_s;
  return out;
}

}  // namespace leaps
