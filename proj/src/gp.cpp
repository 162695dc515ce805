#include "leaps/gp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "leaps/sll.hpp"

namespace leaps {

double wlw_update(WlwState &w, double delta, double psi) {
  w.ema = w.rho * delta + (1.0 - w.rho) * w.ema;
  w.m = w.beta1 * w.m + (1.0 - w.beta1) * w.ema;
  w.v = w.beta2 * w.v + (1.0 - w.beta2) * w.ema * w.ema;
  w.m_hat = w.m / (1.0 - w.beta1);
  w.v_hat = w.v / (1.0 - w.beta2);
  ++w.updates;
  return std::max(0.0, psi + w.step * w.m_hat / (std::sqrt(w.v_hat) + w.eps));
}

void update_lambda(std::vector<double> &lambda, std::vector<double> const &overflow, double base,
                   double max_step) {
  for (std::size_t s = 0; s < lambda.size(); ++s)
    lambda[s] *= std::clamp(std::pow(base, overflow[s]), 1.0, max_step);
}

LambdaInit init_lambda(std::vector<double> const &x, std::vector<double> const &y, Netlist const &n,
                       SlrTopology const &topo, WlParams const &wl, DensityModel &density, double eta_w) {
  LambdaInit out;
  std::size_t const N = n.instances.size();
  PlacementState ps{std::vector<double>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(N)),
                    std::vector<double>(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(N))};
  auto const w = total_wl_objective(ps, n, topo, wl);
  for (std::size_t i = 0; i < N; ++i) out.wl_norm += std::abs(w.grad_x[i]) + std::abs(w.grad_y[i]);

  std::vector<double> const zero(density.num_fields(), 0.0);
  DensityEval scratch;
  density.evaluate(x, y, zero, zero, scratch, false);
  std::vector<double> gx, gy;
  for (std::size_t f = 0; f < density.num_fields(); ++f) {
    density.energy_gradient(f, x, y, gx, gy);
    for (std::size_t i = 0; i < N; ++i)
      if (!n.instances[i].fixed) out.field_norm += std::abs(gx[i]) + std::abs(gy[i]);
  }
  double value = eta_w;
  if (out.field_norm > 0.0 && out.wl_norm > 0.0) value = eta_w * out.wl_norm / out.field_norm;
  else out.fallback = true;
  out.lambda.assign(density.num_fields(), value);
  return out;
}

double gamma_h_schedule(double overflow, double bin) {
  double const tau = std::clamp(overflow, 0.0, 1.0);
  return 8.0 * bin * std::pow(10.0, (tau - 0.1) * 20.0 / 9.0 - 1.0);
}

double gamma_s_schedule(double overflow, double gamma_lo, double gamma_hi, double lo, double hi) {
  double const t = std::clamp((hi - overflow) / (hi - lo), 0.0, 1.0);
  return gamma_lo * std::pow(gamma_hi / gamma_lo, t);
}

// ---------------------------------------------------------------------------

GpEngine::GpEngine(Netlist const &n, FabricLayout const &layout, GpConfig const &config)
    : n_(n), layout_(layout), config_(config) {
  config_.density.seed = config.seed;
  density_ = std::make_unique<DensityModel>(n, layout, config_.density);
  auto const &topo = layout.topology();
  sll_scale_ = config.sll_scale > 0.0 ? config.sll_scale : 0.5 * (topo.slr_width + topo.slr_height);
  std::size_t const M = density_->num_objects();
  std::size_t const N = n.instances.size();
  degree_.assign(M, 0.0);
  for (auto const &net : n.nets) {
    if (net.clock || net.pins.size() < 2) continue;
    for (auto const &p : net.pins) degree_[static_cast<std::size_t>(p.instance)] += net.weight;
  }
  auto const &fields = density_->fields();
  field_mass_.assign(fields.size(), std::vector<double>(M, 0.0));
  for (std::size_t f = 0; f < fields.size(); ++f)
    for (std::size_t i = 0; i < N; ++i) field_mass_[f][i] = n.instances[i].demand[index(fields[f].resource)];
  for (std::size_t o = N; o < M; ++o)
    field_mass_[static_cast<std::size_t>(density_->filler_field(o))][o] = density_->charge()[o];
}

WlParams GpEngine::wl_params(GpState const &st) const {
  return {st.gamma_h, st.gamma_s, st.psi * sll_scale_};
}

PlacementState GpEngine::instances(std::vector<double> const &x, std::vector<double> const &y) const {
  auto const N = static_cast<std::ptrdiff_t>(n_.instances.size());
  return {std::vector<double>(x.begin(), x.begin() + N), std::vector<double>(y.begin(), y.begin() + N)};
}

GpState GpEngine::initial_state() {
  GpState st;
  std::mt19937_64 rng(config_.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto const c = layout_.bounds().center();
  double const jx = config_.jitter * layout_.bin_width();
  double const jy = config_.jitter * layout_.bin_height();
  for (auto const &inst : n_.instances) {
    if (inst.position) {
      st.x.push_back(inst.position->x);
      st.y.push_back(inst.position->y);
      continue;
    }
    double const dx = unit(rng) * jx;
    double const dy = unit(rng) * jy;
    st.x.push_back(c.x + dx);
    st.y.push_back(c.y + dy);
  }
  density_->place_fillers(st.x, st.y);

  st.overflow = density_->overflow(st.x, st.y);
  st.gamma_h = gamma_h_schedule(st.overflow, 0.5 * (layout_.bin_width() + layout_.bin_height()));
  st.gamma_s = gamma_s_schedule(st.overflow, config_.gamma_s_lo, config_.gamma_s_hi, config_.band_lo, config_.band_hi);
  st.psi = layout_.topology().count() > 1 ? config_.psi0 : 0.0;
  st.wlw.step = config_.t_psi;

  auto const init = init_lambda(st.x, st.y, n_, layout_.topology(), wl_params(st), *density_,
                                config_.eta_w);
  st.lambda = init.lambda;
  st.w.assign(st.lambda.size(), 0.0);
  for (std::size_t f = 0; f < st.lambda.size(); ++f) {
    double const phi = density_->fields()[f].energy;
    st.w[f] = phi > 0.0 ? std::clamp(config_.quad_weight / phi, 1e-6, 1e3) : 1e3;
  }
  st.ux = st.x;
  st.uy = st.y;
  return st;
}

void GpEngine::evaluate(GpState const &st, std::vector<double> const &x, std::vector<double> const &y,
                        GpEval &out, bool want_grad) {
  std::size_t const N = n_.instances.size();
  std::size_t const M = density_->num_objects();
  auto const ps = instances(x, y);
  auto const wl = total_wl_objective(ps, n_, layout_.topology(), wl_params(st));
  density_->evaluate(x, y, st.lambda, st.w, out.dens, want_grad);
  out.wl = wl.value;
  out.density = out.dens.value;
  out.clock = 0.0;
  std::vector<double> cgx, cgy;
  bool const clocked = st.eta > 0.0 && !st.mapping.empty();
  if (clocked) {
    cgx.assign(N, 0.0);
    cgy.assign(N, 0.0);
    out.clock = clock_penalty(ps, n_, st.mapping, layout_, &cgx, &cgy);
  }
  out.value = out.wl + out.density + st.eta * out.clock;
  if (!want_grad) return;
  out.gx.assign(M, 0.0);
  out.gy.assign(M, 0.0);
  for (std::size_t o = 0; o < M; ++o) {
    if (!movable(o)) continue;
    out.gx[o] = out.dens.grad_x[o];
    out.gy[o] = out.dens.grad_y[o];
    if (o < N) {
      out.gx[o] += wl.grad_x[o];
      out.gy[o] += wl.grad_y[o];
      if (clocked) {
        out.gx[o] += st.eta * cgx[o];
        out.gy[o] += st.eta * cgy[o];
      }
    }
  }
}

std::vector<double> GpEngine::precondition(GpState const &st) const {
  std::vector<double> h = degree_;
  auto const &fields = density_->fields();
  for (std::size_t f = 0; f < field_mass_.size(); ++f) {
    double const k = st.lambda[f] * (1.0 + st.w[f] * fields[f].energy);
    for (std::size_t o = 0; o < h.size(); ++o) h[o] += k * field_mass_[f][o];
  }
  for (auto &v : h) v = 1.0 / std::max(1.0, v);
  return h;
}

namespace {

double dot(std::vector<double> const &a, std::vector<double> const &b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

void solve_subproblem_step(GpEngine &engine, GpState &st) {
  auto const &L = engine.layout();
  auto const &cfg = engine.config();
  std::size_t const M = engine.num_objects();
  double const W = L.width();
  double const H = L.height();
  double const bin = std::min(L.bin_width(), L.bin_height());

  for (int attempt = 0; attempt < 2; ++attempt) {
    GpEval ev;
    engine.evaluate(st, st.x, st.y, ev);
    if (!std::isfinite(ev.value)) {
      std::ostringstream os;
      os << "non-finite objective at iteration " << st.iteration << " (wl " << ev.wl << ", density "
         << ev.density << ", clock " << ev.clock << ", psi " << st.psi << ", eta " << st.eta << ")";
      throw std::runtime_error(os.str());
    }
    auto const P = engine.precondition(st);
    std::vector<double> dx(M), dy(M);
    double dmax = 0.0;
    for (std::size_t o = 0; o < M; ++o) {
      dx[o] = P[o] * ev.gx[o];
      dy[o] = P[o] * ev.gy[o];
      dmax = std::max({dmax, std::abs(dx[o]), std::abs(dy[o])});
    }
    ++st.iteration;
    if (dmax == 0.0) {
      st.last_step = 0.0;
      st.ux = st.x;
      st.uy = st.y;
      st.u_value = ev.value;
      st.u_epoch = st.epoch;
      return;
    }

    double alpha = 0.1 * bin / dmax;
    if (st.has_prev) {
      double ss = 0.0, yy = 0.0;
      for (std::size_t o = 0; o < M; ++o) {
        double const sx = st.x[o] - st.px[o];
        double const sy = st.y[o] - st.py[o];
        double const yx = dx[o] - st.pgx[o];
        double const yyv = dy[o] - st.pgy[o];
        ss += sx * sx + sy * sy;
        yy += yx * yx + yyv * yyv;
      }
      if (yy > 0.0 && ss > 0.0) alpha = std::sqrt(ss / yy);
    }
    alpha = std::min(alpha, 2.0 * std::max(L.bin_width(), L.bin_height()) / dmax);

    std::vector<double> nx(M), ny(M);
    double f_new = 0.0;
    GpEval trial;
    for (int bt = 0; bt < 30; ++bt) {
      double descent = 0.0;
      for (std::size_t o = 0; o < M; ++o) {
        nx[o] = std::clamp(st.x[o] - alpha * dx[o], 0.0, W);
        ny[o] = std::clamp(st.y[o] - alpha * dy[o], 0.0, H);
        descent += ev.gx[o] * (nx[o] - st.x[o]) + ev.gy[o] * (ny[o] - st.y[o]);
      }
      engine.evaluate(st, nx, ny, trial, false);
      f_new = trial.value;
      if (f_new <= ev.value + cfg.armijo * descent) break;
      alpha *= 0.5;
    }

    bool const comparable = st.u_epoch == st.epoch;
    if (attempt == 0 && comparable && f_new > st.u_value && st.a > 1.0) {
      // Momentum overshot: restart from the last major iterate.
      st.x = st.ux;
      st.y = st.uy;
      st.a = 1.0;
      st.has_prev = false;
      --st.iteration;
      continue;
    }
    double grad_restart = 0.0;
    for (std::size_t o = 0; o < M; ++o)
      grad_restart += ev.gx[o] * (nx[o] - st.ux[o]) + ev.gy[o] * (ny[o] - st.uy[o]);
    double coef = 0.0;
    if (grad_restart > 0.0 || attempt > 0) {
      st.a = 1.0;
    } else {
      double const a_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * st.a * st.a));
      coef = (st.a - 1.0) / a_next;
      st.a = a_next;
    }
    st.px = st.x;
    st.py = st.y;
    st.pgx = std::move(dx);
    st.pgy = std::move(dy);
    st.has_prev = true;
    for (std::size_t o = 0; o < M; ++o) {
      st.x[o] = std::clamp(nx[o] + coef * (nx[o] - st.ux[o]), 0.0, W);
      st.y[o] = std::clamp(ny[o] + coef * (ny[o] - st.uy[o]), 0.0, H);
    }
    st.ux = std::move(nx);
    st.uy = std::move(ny);
    st.u_value = f_new;
    st.u_epoch = st.epoch;
    st.alpha = alpha;
    st.last_step = alpha * dmax;
    return;
  }
}

// ---------------------------------------------------------------------------

void write_gp_record(GpRecord const &r, std::ostream &out) {
  nlohmann::json j;
  j["iteration"] = r.iteration;
  j["objective"] = r.objective;
  j["hpwl"] = r.hpwl;
  j["sll"] = r.sll;
  j["overflow"] = r.overflow;
  j["overflow_field"] = r.overflow_field;
  j["energy"] = r.energy;
  j["lambda"] = r.lambda;
  j["psi"] = r.psi;
  j["eta"] = r.eta;
  j["gamma_h"] = r.gamma_h;
  j["gamma_s"] = r.gamma_s;
  j["step"] = r.step;
  j["wlw_active"] = r.wlw_active;
  j["inflated"] = r.inflated;
  j["cnp_round"] = r.cnp_round;
  out << j.dump() << '\n';
}

void write_gp_report_jsonl(GpReport const &r, std::ostream &out) {
  for (auto const &rec : r.records) write_gp_record(rec, out);
}

namespace {

/// Area factor 1 + kappa * min(1, max(0, p/mean - 1)) from the pin count of
/// each instance's bin.
std::vector<double> pin_inflation(PlacementState const &ps, Netlist const &n, FabricLayout const &L, double kappa) {
  int const nx = L.bins_x();
  int const ny = L.bins_y();
  std::vector<double> pins(static_cast<std::size_t>(nx * ny), 0.0);
  std::vector<std::size_t> bin(n.instances.size());
  std::vector<double> deg(n.instances.size(), 0.0);
  for (auto const &net : n.nets) {
    if (net.clock) continue;
    for (auto const &p : net.pins) deg[static_cast<std::size_t>(p.instance)] += 1.0;
  }
  for (std::size_t i = 0; i < n.instances.size(); ++i) {
    int const bx = std::clamp(static_cast<int>(ps.x[i] / L.bin_width()), 0, nx - 1);
    int const by = std::clamp(static_cast<int>(ps.y[i] / L.bin_height()), 0, ny - 1);
    bin[i] = static_cast<std::size_t>(by * nx + bx);
    pins[bin[i]] += deg[i];
  }
  double total = 0.0;
  int occupied = 0;
  for (double p : pins)
    if (p > 0.0) {
      total += p;
      ++occupied;
    }
  std::vector<double> factor(n.instances.size(), 1.0);
  if (occupied == 0) return factor;
  double const mean = total / occupied;
  for (std::size_t i = 0; i < factor.size(); ++i)
    factor[i] = 1.0 + kappa * std::clamp(pins[bin[i]] / mean - 1.0, 0.0, 1.0);
  return factor;
}

double l2(std::vector<double> const &gx, std::vector<double> const &gy) { return std::sqrt(dot(gx, gx) + dot(gy, gy)); }

}  // namespace

GpResult run_global_placement(Netlist const &n, FabricLayout const &layout, GpConfig const &config) {
  GpEngine engine(n, layout, config);
  GpState st = engine.initial_state();
  GpResult result;
  auto &rep = result.report;
  auto &density = engine.density();
  for (auto const &f : density.fields()) rep.fields.emplace_back(resource_name(f.resource));

  auto const &topo = layout.topology();
  bool const multi = topo.count() > 1;
  bool const has_clocked = std::any_of(n.instances.begin(), n.instances.end(),
                                       [](Instance const &i) { return !i.fixed && !i.clocks.empty(); });
  double const bin = 0.5 * (layout.bin_width() + layout.bin_height());

  int window_sll = 0;
  int window_len = -1;
  bool inflated = false;
  int round = 0;
  int round_iters = 0;
  double best_overflow = 2.0;
  std::vector<double> best_x, best_y;

  for (int it = 0; it < config.max_iterations; ++it) {
    solve_subproblem_step(engine, st);
    auto const ps = engine.instances(st.ux, st.uy);
    double const tau = density.overflow(st.ux, st.uy);
    std::vector<double> tau_s;
    for (auto const &f : density.fields()) tau_s.push_back(f.overflow);
    st.overflow = tau;
    st.overflow_history.push_back(tau);
    int const sll = total_sll(ps, n, topo, false);

    GpRecord rec;
    rec.iteration = it;
    rec.objective = st.u_value;
    rec.hpwl = hpwl(ps, n);
    rec.sll = sll;
    rec.overflow = tau;
    rec.overflow_field = tau_s;
    for (auto const &f : density.fields()) rec.energy.push_back(f.energy);
    rec.lambda = st.lambda;
    rec.psi = st.psi;
    rec.eta = st.eta;
    rec.gamma_h = st.gamma_h;
    rec.gamma_s = st.gamma_s;
    rec.step = st.last_step;
    rec.inflated = inflated;
    rec.cnp_round = round;

    if (round == 0 && tau < best_overflow) {
      best_overflow = tau;
      best_x = st.ux;
      best_y = st.uy;
    }

    // L4: density multipliers.
    if (tau > config.target_overflow) update_lambda(st.lambda, tau_s, config.lambda_base, config.lambda_max_step);

    // L3: SLL weighting, only inside the overflow band.
    bool const in_band = tau > config.band_lo && tau < config.band_hi;
    if (config.wlw && multi && in_band) {
      rec.wlw_active = true;
      if (window_len < 0) {
        window_sll = sll;
        window_len = 0;
      } else if (++window_len >= std::max(1, config.wlw_period)) {
        st.psi = std::max(config.psi_floor ? config.psi0 : 0.0, wlw_update(st.wlw, static_cast<double>(sll - window_sll), st.psi));
        window_sll = sll;
        window_len = 0;
      }
    }
    rep.records.push_back(std::move(rec));

    st.gamma_h = gamma_h_schedule(tau, bin);
    st.gamma_s = gamma_s_schedule(tau, config.gamma_s_lo, config.gamma_s_hi, config.band_lo, config.band_hi);

    // L2: one inflation pass once overflow leaves the band.
    if (config.inflation && !inflated && tau < config.band_lo) {
      density.set_inflation(pin_inflation(ps, n, layout, config.kappa));
      inflated = true;
    }

    // L1: clock network planning.
    if (tau <= config.target_overflow) {
      if (!config.cnp || !has_clocked) {
        rep.converged = true;
        rep.reason = "overflow target reached";
        break;
      }
      double const outside = round > 0 ? outside_fraction(ps, st.mapping, layout) : 1.0;
      bool const settle = round > 0 && (outside <= config.outside_target || round_iters >= config.iterations_per_round);
      if (settle) {
        rep.outside_fraction = outside;
        auto const violations = check_constraints(clock_usage(ps, n, layout, config.cnp_config.mode), layout);
        if (violations.empty()) {
          rep.converged = true;
          rep.reason = "overflow target reached, clock constraints hold";
          break;
        }
        if (round >= config.cnp_rounds) {
          rep.reason = "clock constraints unresolved after " + std::to_string(round) + " planning rounds: " +
                       violations.front().describe();
          break;
        }
      }
      if (round == 0 || settle) {
        auto cnp = run_cnp(ps, n, layout, config.cnp_config);
        rep.last_cnp = cnp.solution;
        ++round;
        rep.cnp_rounds = round;
        round_iters = 0;
        if (!cnp.solution.feasible) {
          rep.reason = "clock network planning infeasible: " + cnp.solution.certificate;
          st.mapping = cnp.mapping;
          break;
        }
        if (!cnp.solution.optimal) rep.warnings.push_back("clock planning stopped early: " + cnp.solution.certificate);
        st.mapping = cnp.mapping;
        auto const wl = total_wl_objective(ps, n, topo, engine.wl_params(st));
        std::vector<double> cgx(ps.size(), 0.0), cgy(ps.size(), 0.0);
        clock_penalty(ps, n, st.mapping, layout, &cgx, &cgy);
        ClockPenaltyConfig cc = config.clock;
        st.eta = update_eta(l2(wl.grad_x, wl.grad_y), l2(cgx, cgy), cc);
      } else {
        ++round_iters;
        st.eta *= config.eta_growth;
      }
    }
    objective_changed(st);
  }

  if (!rep.converged && rep.reason.empty()) rep.reason = "iteration limit reached";
  if (!rep.converged && round == 0 && !best_x.empty()) {
    st.ux = best_x;
    st.uy = best_y;
  }
  result.placement = engine.instances(st.ux, st.uy);
  result.mapping = st.mapping;
  if (round > 0) rep.outside_fraction = outside_fraction(result.placement, st.mapping, layout);
  return result;
}

}  // namespace leaps
