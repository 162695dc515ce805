#include "leaps/density.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

namespace leaps {

namespace {

// FFTW's planner is not reentrant.
std::mutex &planner_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

struct PoissonSolver::Plans {
  double *in = nullptr;
  double *out = nullptr;
  fftw_plan dct = nullptr;
  fftw_plan idct = nullptr;
  fftw_plan fx = nullptr;
  fftw_plan fy = nullptr;

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    for (auto p : {dct, idct, fx, fy})
      if (p) fftw_destroy_plan(p);
    fftw_free(in);
    fftw_free(out);
  }
};

PoissonSolver::PoissonSolver(int nx, int ny, double width, double height)
    : nx_(nx), ny_(ny), width_(width), height_(height), plans_(std::make_unique<Plans>()) {
  if (nx < 2) throw ConfigError("bins_x", "need at least 2 bins per axis");
  if (ny < 2) throw ConfigError("bins_y", "need at least 2 bins per axis");
  std::size_t const n = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  wx_.resize(static_cast<std::size_t>(nx));
  wy_.resize(static_cast<std::size_t>(ny));
  for (int u = 0; u < nx; ++u) wx_[static_cast<std::size_t>(u)] = std::numbers::pi * u / width;
  for (int v = 0; v < ny; ++v) wy_[static_cast<std::size_t>(v)] = std::numbers::pi * v / height;
  coeff_.assign(n, 0.0);
  std::lock_guard lock(planner_mutex());
  auto &P = *plans_;
  P.in = static_cast<double *>(fftw_malloc(sizeof(double) * n));
  P.out = static_cast<double *>(fftw_malloc(sizeof(double) * n));
  // Row-major: y is the slow dimension.
  P.dct = fftw_plan_r2r_2d(ny, nx, P.in, P.out, FFTW_REDFT10, FFTW_REDFT10, FFTW_ESTIMATE);
  P.idct = fftw_plan_r2r_2d(ny, nx, P.in, P.out, FFTW_REDFT01, FFTW_REDFT01, FFTW_ESTIMATE);
  P.fx = fftw_plan_r2r_2d(ny, nx, P.in, P.out, FFTW_REDFT01, FFTW_RODFT01, FFTW_ESTIMATE);
  P.fy = fftw_plan_r2r_2d(ny, nx, P.in, P.out, FFTW_RODFT01, FFTW_REDFT01, FFTW_ESTIMATE);
}

PoissonSolver::~PoissonSolver() = default;

double PoissonSolver::solve(std::vector<double> const &mass, std::vector<double> const &target,
                            std::vector<double> &phi) {
  auto &P = *plans_;
  std::size_t const n = coeff_.size();
  double const inv_area = static_cast<double>(nx_) * ny_ / (width_ * height_);
  for (std::size_t b = 0; b < n; ++b) P.in[b] = (mass[b] - target[b]) * inv_area;
  fftw_execute(P.dct);
  double const norm = 1.0 / (4.0 * nx_ * ny_);
  for (int v = 0; v < ny_; ++v) {
    for (int u = 0; u < nx_; ++u) {
      std::size_t const k = static_cast<std::size_t>(v) * nx_ + u;
      double const w2 = wx_[static_cast<std::size_t>(u)] * wx_[static_cast<std::size_t>(u)] +
                        wy_[static_cast<std::size_t>(v)] * wy_[static_cast<std::size_t>(v)];
      coeff_[k] = (u == 0 && v == 0) ? 0.0 : P.out[k] * norm / w2;
    }
  }
  std::copy(coeff_.begin(), coeff_.end(), P.in);
  fftw_execute(P.idct);
  phi.assign(P.out, P.out + n);
  double energy = 0.0;
  for (std::size_t b = 0; b < n; ++b) energy += (mass[b] - target[b]) * phi[b];
  return 0.5 * energy;
}

void PoissonSolver::field(std::vector<double> &ex, std::vector<double> &ey) {
  auto &P = *plans_;
  std::size_t const n = coeff_.size();
  // ex: sine series in x with the index shifted down by one.
  for (int v = 0; v < ny_; ++v) {
    for (int u = 0; u < nx_; ++u) {
      std::size_t const k = static_cast<std::size_t>(v) * nx_ + u;
      P.in[k] = u + 1 < nx_ ? coeff_[k + 1] * wx_[static_cast<std::size_t>(u + 1)] : 0.0;
    }
  }
  fftw_execute(P.fx);
  ex.assign(P.out, P.out + n);
  for (int v = 0; v < ny_; ++v) {
    for (int u = 0; u < nx_; ++u) {
      std::size_t const k = static_cast<std::size_t>(v) * nx_ + u;
      P.in[k] = v + 1 < ny_ ? coeff_[k + static_cast<std::size_t>(nx_)] * wy_[static_cast<std::size_t>(v + 1)] : 0.0;
    }
  }
  fftw_execute(P.fy);
  ey.assign(P.out, P.out + n);
}

namespace {

std::vector<double> scaled_target(std::vector<double> const &cap, double total_mass) {
  double total_cap = 0.0;
  for (double c : cap) total_cap += c;
  std::vector<double> t(cap.size(), 0.0);
  if (total_cap <= 0.0) {
    std::fill(t.begin(), t.end(), total_mass / static_cast<double>(cap.size()));
    return t;
  }
  double const k = total_mass / total_cap;
  for (std::size_t b = 0; b < cap.size(); ++b) t[b] = cap[b] * k;
  return t;
}

}  // namespace

Potential solve_potential(std::vector<double> const &mass, std::vector<double> const &capacity, int nx, int ny,
                          double width, double height) {
  PoissonSolver solver(nx, ny, width, height);
  double total = 0.0;
  for (double m : mass) total += m;
  Potential p;
  p.energy = solver.solve(mass, scaled_target(capacity, total), p.phi);
  solver.field(p.ex, p.ey);
  return p;
}

double density_overflow(std::vector<double> const &mass, std::vector<double> const &capacity) {
  double over = 0.0;
  double total = 0.0;
  for (std::size_t b = 0; b < mass.size(); ++b) {
    over += std::max(mass[b] - capacity[b], 0.0);
    total += mass[b];
  }
  return total > 0.0 ? over / total : 0.0;
}

double density_penalty_value(std::vector<double> const &energy, std::vector<double> const &lambda,
                             std::vector<double> const &w) {
  double v = 0.0;
  for (std::size_t s = 0; s < energy.size(); ++s) v += lambda[s] * (energy[s] + 0.5 * w[s] * energy[s] * energy[s]);
  return v;
}

// ---------------------------------------------------------------------------

namespace {

double densest_capacity(FabricLayout const &layout, Resource r) {
  double best = 0.0;
  double const area = layout.site_width() * layout.site_height();
  for (auto const &t : layout.site_types()) best = std::max(best, t.capacity[index(r)] / area);
  return best;
}

}  // namespace

double DensityModel::half_extent(double mass, double density, double bin) const {
  double const side = density > 0.0 ? std::sqrt(mass / density) : bin;
  return 0.5 * std::max(side, config_.stretch * bin);
}

DensityModel::DensityModel(Netlist const &n, FabricLayout const &layout, DensityConfig const &config)
    : layout_(layout), config_(config), num_instances_(n.instances.size()) {
  nx_ = layout.bins_x();
  ny_ = layout.bins_y();
  bw_ = layout.bin_width();
  bh_ = layout.bin_height();
  ResourceVector demand{};
  ResourceVector count{};
  for (auto const &inst : n.instances)
    for (std::size_t r = 0; r < kNumResources; ++r)
      if (inst.demand[r] > 0) {
        demand[r] += inst.demand[r];
        count[r] += 1;
      }
  auto const capacity = layout.total_capacity();
  std::vector<int> field_of(kNumResources, -1);
  for (std::size_t r = 0; r < kNumResources; ++r) {
    if (demand[r] <= 0.0) continue;
    if (capacity[r] <= 0.0)
      throw ConfigError("site_capacity", std::string("no capacity for demanded resource ") +
                                             std::string(kResourceNames[r]));
    FieldState f;
    f.resource = static_cast<Resource>(r);
    f.demand = demand[r];
    f.capacity = capacity[r];
    f.cap = layout.capacity_map(f.resource);
    field_of[r] = static_cast<int>(fields_.size());
    fields_.push_back(std::move(f));
    cap_density_.push_back(densest_capacity(layout, static_cast<Resource>(r)));
  }
  members_.resize(fields_.size());
  for (auto const &inst : n.instances) {
    for (std::size_t r = 0; r < kNumResources; ++r) {
      double const a = inst.demand[r];
      if (a <= 0.0) continue;
      auto const f = static_cast<std::size_t>(field_of[r]);
      double const hw = half_extent(a, cap_density_[f], bw_);
      double const hh = half_extent(a, cap_density_[f], bh_);
      members_[f].push_back({static_cast<std::uint32_t>(inst.id), a, a, hw, hh, hw, hh});
    }
  }
  if (config_.fillers) {
    for (std::size_t f = 0; f < fields_.size(); ++f) {
      double const free = fields_[f].capacity - fields_[f].demand;
      double const real_count = count[index(fields_[f].resource)];
      double const mean = fields_[f].demand / real_count;
      if (free < mean) continue;
      auto const nfill = static_cast<std::size_t>(std::min(real_count, std::floor(free / mean)));
      double const m = free / static_cast<double>(nfill);
      for (std::size_t k = 0; k < nfill; ++k) {
        auto const id = static_cast<std::uint32_t>(num_instances_ + filler_field_.size());
        double const hw = half_extent(m, cap_density_[f], bw_);
        double const hh = half_extent(m, cap_density_[f], bh_);
        members_[f].push_back({id, m, m, hw, hh, hw, hh});
        filler_field_.push_back(static_cast<int>(f));
      }
    }
  }
  charge_.assign(num_objects(), 0.0);
  for (auto const &list : members_)
    for (auto const &m : list) charge_[m.object] += m.mass;
  for (std::size_t f = 0; f < fields_.size(); ++f)
    solvers_.push_back(std::make_unique<PoissonSolver>(nx_, ny_, layout.width(), layout.height()));
  target_.resize(fields_.size());
}

DensityModel::~DensityModel() = default;

void DensityModel::place_fillers(std::vector<double> &x, std::vector<double> &y) const {
  std::mt19937_64 rng(config_.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> cumulative(fields_.size());
  for (std::size_t f = 0; f < fields_.size(); ++f) {
    auto &c = cumulative[f];
    c.resize(fields_[f].cap.size());
    double acc = 0.0;
    for (std::size_t b = 0; b < c.size(); ++b) c[b] = acc += fields_[f].cap[b];
  }
  for (int f : filler_field_) {
    auto const &c = cumulative[static_cast<std::size_t>(f)];
    double const pick = unit(rng) * c.back();
    auto b = static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), pick) - c.begin());
    b = std::min(b, c.size() - 1);
    double const bx = static_cast<double>(b % static_cast<std::size_t>(nx_));
    double const by = static_cast<double>(b / static_cast<std::size_t>(nx_));
    x.push_back((bx + unit(rng)) * bw_);
    y.push_back((by + unit(rng)) * bh_);
  }
}

void DensityModel::set_inflation(std::vector<double> const &factor) {
  for (std::size_t f = 0; f < fields_.size(); ++f) {
    double real = 0.0;
    double filler = 0.0;
    for (auto &m : members_[f]) {
      if (m.object < num_instances_) {
        m.mass = m.base_mass * factor[m.object];
        m.hw = half_extent(m.mass, cap_density_[f], bw_);
        m.hh = half_extent(m.mass, cap_density_[f], bh_);
        real += m.mass;
      } else {
        filler += m.base_mass;
      }
    }
    double const room = std::max(0.0, fields_[f].capacity - real);
    double const k = filler > 0.0 ? std::min(1.0, room / filler) : 0.0;
    for (auto &m : members_[f]) {
      if (m.object < num_instances_) continue;
      m.mass = m.base_mass * k;
      m.hw = half_extent(std::max(m.mass, 1e-12), cap_density_[f], bw_);
      m.hh = half_extent(std::max(m.mass, 1e-12), cap_density_[f], bh_);
    }
  }
  std::fill(charge_.begin(), charge_.end(), 0.0);
  for (auto const &list : members_)
    for (auto const &m : list) charge_[m.object] += m.mass;
}

namespace {

struct Span {
  double lo;
  bool clamped;
};

Span place_span(double c, double half, double extent) {
  double lo = c - half;
  bool clamped = false;
  if (lo < 0.0) {
    lo = 0.0;
    clamped = true;
  } else if (lo + 2 * half > extent) {
    lo = std::max(0.0, extent - 2 * half);
    clamped = true;
  }
  return {lo, clamped};
}

constexpr double kTent = 1.4142135623730951;

inline int bin_of(double v, double pitch, int count) {
  return std::clamp(static_cast<int>(std::floor(v / pitch)), 0, count - 1);
}

}  // namespace

void DensityModel::splat(std::vector<Member> const &members, std::vector<double> const &x,
                         std::vector<double> const &y, bool real_only, std::vector<double> &out) const {
  out.assign(static_cast<std::size_t>(nx_) * ny_, 0.0);
  double const W = layout_.width();
  double const H = layout_.height();
  for (auto const &m : members) {
    if (real_only && m.object >= num_instances_) continue;
    double const mass = real_only ? m.base_mass : m.mass;
    double const hw = real_only ? m.base_hw : m.hw;
    double const hh = real_only ? m.base_hh : m.hh;
    auto const sx = place_span(x[m.object], hw, W);
    auto const sy = place_span(y[m.object], hh, H);
    double const hx = sx.lo + 2 * hw;
    double const hy = sy.lo + 2 * hh;
    int const bx0 = bin_of(sx.lo, bw_, nx_);
    int const bx1 = bin_of(hx, bw_, nx_);
    int const by0 = bin_of(sy.lo, bh_, ny_);
    int const by1 = bin_of(hy, bh_, ny_);
    double const k = mass / (4.0 * hw * hh);
    for (int by = by0; by <= by1; ++by) {
      double const oy = std::min(hy, (by + 1) * bh_) - std::max(sy.lo, by * bh_);
      if (oy <= 0.0) continue;
      double *row = out.data() + static_cast<std::size_t>(by) * nx_;
      for (int bx = bx0; bx <= bx1; ++bx) {
        double const ox = std::min(hx, (bx + 1) * bw_) - std::max(sx.lo, bx * bw_);
        if (ox <= 0.0) continue;
        row[bx] += k * ox * oy;
      }
    }
  }
}

namespace {

/// Cumulative distribution and density of a unit-mass tent of half-width h centred at 0.
double tent_cdf(double t, double h) {
  if (t <= -h) return 0.0;
  if (t >= h) return 1.0;
  if (t <= 0.0) return 0.5 * (t + h) * (t + h) / (h * h);
  return 1.0 - 0.5 * (h - t) * (h - t) / (h * h);
}

double tent_pdf(double t, double h) {
  double const a = std::abs(t);
  return a >= h ? 0.0 : (h - a) / (h * h);
}

/// Per-bin fractions of a tent along one axis and their derivatives with
/// respect to the centre. Returns the first bin index.
int tent_weights(double c, double half, double pitch, int count, double extent, std::vector<double> &w,
                 std::vector<double> &dw, bool &clamped) {
  auto const span = place_span(c, half, extent);
  clamped = span.clamped;
  double const centre = span.lo + half;
  int const b0 = bin_of(span.lo, pitch, count);
  int const b1 = bin_of(span.lo + 2 * half, pitch, count);
  w.assign(static_cast<std::size_t>(b1 - b0 + 1), 0.0);
  dw.assign(w.size(), 0.0);
  for (int b = b0; b <= b1; ++b) {
    double const lo = b * pitch - centre;
    double const hi = (b + 1) * pitch - centre;
    w[static_cast<std::size_t>(b - b0)] = tent_cdf(hi, half) - tent_cdf(lo, half);
    dw[static_cast<std::size_t>(b - b0)] = clamped ? 0.0 : tent_pdf(lo, half) - tent_pdf(hi, half);
  }
  return b0;
}

}  // namespace

void DensityModel::charge_splat(std::vector<Member> const &members, std::vector<double> const &x,
                                std::vector<double> const &y, std::vector<double> &out) const {
  out.assign(static_cast<std::size_t>(nx_) * ny_, 0.0);
  std::vector<double> wx, dwx, wy, dwy;
  bool cx = false, cy = false;
  for (auto const &m : members) {
    int const bx0 = tent_weights(x[m.object], kTent * m.hw, bw_, nx_, layout_.width(), wx, dwx, cx);
    int const by0 = tent_weights(y[m.object], kTent * m.hh, bh_, ny_, layout_.height(), wy, dwy, cy);
    for (std::size_t j = 0; j < wy.size(); ++j) {
      if (wy[j] == 0.0) continue;
      double *row = out.data() + static_cast<std::size_t>(by0 + static_cast<int>(j)) * nx_ + bx0;
      double const k = m.mass * wy[j];
      for (std::size_t i = 0; i < wx.size(); ++i) row[i] += k * wx[i];
    }
  }
}

void DensityModel::gradient(std::vector<Member> const &members, std::vector<double> const &phi,
                            std::vector<double> const &x, std::vector<double> const &y, double scale,
                            std::vector<double> &gx, std::vector<double> &gy) const {
  std::vector<double> wx, dwx, wy, dwy;
  bool cx = false, cy = false;
  for (auto const &m : members) {
    int const bx0 = tent_weights(x[m.object], kTent * m.hw, bw_, nx_, layout_.width(), wx, dwx, cx);
    int const by0 = tent_weights(y[m.object], kTent * m.hh, bh_, ny_, layout_.height(), wy, dwy, cy);
    double dx = 0.0;
    double dy = 0.0;
    for (std::size_t j = 0; j < wy.size(); ++j) {
      double const *row = phi.data() + static_cast<std::size_t>(by0 + static_cast<int>(j)) * nx_ + bx0;
      double sw = 0.0;
      double sd = 0.0;
      for (std::size_t i = 0; i < wx.size(); ++i) {
        sw += wx[i] * row[i];
        sd += dwx[i] * row[i];
      }
      dx += wy[j] * sd;
      dy += dwy[j] * sw;
    }
    gx[m.object] += scale * m.mass * dx;
    gy[m.object] += scale * m.mass * dy;
  }
}

void DensityModel::solve_field(std::size_t f, std::vector<double> const &x, std::vector<double> const &y) {
  auto &F = fields_[f];
  charge_splat(members_[f], x, y, F.mass);
  double total = 0.0;
  for (double m : F.mass) total += m;
  target_[f] = scaled_target(F.cap, total);
  F.energy = solvers_[f]->solve(F.mass, target_[f], F.phi);
}

void DensityModel::evaluate(std::vector<double> const &x, std::vector<double> const &y,
                            std::vector<double> const &lambda, std::vector<double> const &w, DensityEval &out,
                            bool want_grad) {
  std::size_t const nf = fields_.size();
  int const threads = std::max(1, std::min<int>(config_.threads, static_cast<int>(nf)));
  if (threads > 1) {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t f = static_cast<std::size_t>(t); f < nf; f += static_cast<std::size_t>(threads))
          solve_field(f, x, y);
      });
    for (auto &th : pool) th.join();
  } else {
    for (std::size_t f = 0; f < nf; ++f) solve_field(f, x, y);
  }
  out.energy.resize(nf);
  out.value = 0.0;
  for (std::size_t f = 0; f < nf; ++f) {
    out.energy[f] = fields_[f].energy;
    out.value += lambda[f] * (fields_[f].energy + 0.5 * w[f] * fields_[f].energy * fields_[f].energy);
  }
  if (!want_grad) return;
  out.grad_x.assign(num_objects(), 0.0);
  out.grad_y.assign(num_objects(), 0.0);
  for (std::size_t f = 0; f < nf; ++f) {
    double const scale = lambda[f] * (1.0 + w[f] * fields_[f].energy);
    if (scale == 0.0) continue;
    gradient(members_[f], fields_[f].phi, x, y, scale, out.grad_x, out.grad_y);
  }
}

void DensityModel::energy_gradient(std::size_t f, std::vector<double> const &x, std::vector<double> const &y,
                                   std::vector<double> &gx, std::vector<double> &gy) const {
  gx.assign(num_objects(), 0.0);
  gy.assign(num_objects(), 0.0);
  gradient(members_[f], fields_[f].phi, x, y, 1.0, gx, gy);
}

double DensityModel::overflow(std::vector<double> const &x, std::vector<double> const &y) {
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t f = 0; f < fields_.size(); ++f) {
    auto &F = fields_[f];
    splat(members_[f], x, y, true, F.mass_real);
    F.overflow = density_overflow(F.mass_real, F.cap);
    weighted += F.overflow * F.demand;
    total += F.demand;
  }
  return total > 0.0 ? weighted / total : 0.0;
}

void DensityModel::compute_fields() {
  for (std::size_t f = 0; f < fields_.size(); ++f) solvers_[f]->field(fields_[f].ex, fields_[f].ey);
}

std::vector<double> DensityModel::field_norms(std::vector<double> const &x, std::vector<double> const &y) {
  std::vector<double> out(fields_.size(), 0.0);
  std::vector<double> gx, gy;
  for (std::size_t f = 0; f < fields_.size(); ++f) {
    solve_field(f, x, y);
    energy_gradient(f, x, y, gx, gy);
    // The per-object gradient of Phi_s already carries the charge q_i: it is q_i times the
    // footprint-averaged field.
    for (std::size_t i = 0; i < gx.size(); ++i) out[f] += std::abs(gx[i]) + std::abs(gy[i]);
  }
  return out;
}

std::vector<double> splat_density(PlacementState const &s, Netlist const &n, Resource r, FabricLayout const &layout,
                                  double stretch) {
  DensityConfig cfg;
  cfg.fillers = false;
  cfg.stretch = stretch;
  Netlist only;
  only.instances = n.instances;
  for (auto &inst : only.instances) {
    auto keep = inst.demand[index(r)];
    inst.demand = {};
    inst.demand[index(r)] = keep;
  }
  bool any = false;
  for (auto const &inst : only.instances) any |= inst.demand[index(r)] > 0;
  if (!any) return std::vector<double>(static_cast<std::size_t>(layout.bins_x()) * layout.bins_y(), 0.0);
  DensityModel model(only, layout, cfg);
  model.overflow(s.x, s.y);
  return model.fields()[0].mass_real;
}

}  // namespace leaps
