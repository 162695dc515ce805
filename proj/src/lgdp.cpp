#include "leaps/lgdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "leaps/sll.hpp"
#include "leaps/wirelength.hpp"

namespace leaps {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool fits(ResourceVector const &used, ResourceVector const &demand, ResourceVector const &cap) {
  for (std::size_t r = 0; r < kNumResources; ++r)
    if (demand[r] > 0.0 && used[r] + demand[r] > cap[r] + 1e-9) return false;
  return true;
}

void add_demand(ResourceVector &used, ResourceVector const &demand, double sign = 1.0) {
  for (std::size_t r = 0; r < kNumResources; ++r) used[r] += sign * demand[r];
}

/// First resource the site cannot take, for failure messages.
Resource short_resource(ResourceVector const &demand) {
  Resource best = Resource::LUTL;
  for (std::size_t r = 0; r < kNumResources; ++r)
    if (demand[r] > demand[index(best)]) best = static_cast<Resource>(r);
  return best;
}

bool closed_meet(Box const &a, Box const &b) {
  return std::min(a.hx, b.hx) >= std::max(a.lx, b.lx) && std::min(a.hy, b.hy) >= std::max(a.ly, b.ly);
}

bool closed_contains(Box const &b, Point p) { return p.x >= b.lx && p.x <= b.hx && p.y >= b.ly && p.y <= b.hy; }

Point clamp_into(Point p, FabricLayout const &layout) {
  return {std::clamp(p.x, 0.0, std::nextafter(layout.width(), 0.0)),
          std::clamp(p.y, 0.0, std::nextafter(layout.height(), 0.0))};
}

std::string describe_region(FabricLayout const &layout, int rid) {
  if (rid < 0) return "layout";
  auto const &r = layout.regions()[static_cast<std::size_t>(rid)];
  std::ostringstream os;
  os << "region " << r.id << " (col " << r.col << ", row " << r.row << ", slr " << r.slr.zx << "," << r.slr.zy << ")";
  return os.str();
}

/// Inclusive site column/row range covering a box.
struct SiteRange {
  int c0 = 0, c1 = -1, r0 = 0, r1 = -1;
};

SiteRange site_range(Box const &b, FabricLayout const &layout) {
  SiteRange s;
  s.c0 = std::max(0, static_cast<int>(std::floor(b.lx / layout.site_width())));
  s.c1 = std::min(layout.site_cols() - 1, static_cast<int>(std::ceil(b.hx / layout.site_width())) - 1);
  s.r0 = std::max(0, static_cast<int>(std::floor(b.ly / layout.site_height())));
  s.r1 = std::min(layout.site_rows() - 1, static_cast<int>(std::ceil(b.hy / layout.site_height())) - 1);
  return s;
}

}  // namespace

double score(double clustering, double delta_hpwl, double delta_sll, double phi_w, double alpha_lg) {
  return clustering - phi_w * (delta_hpwl + alpha_lg * delta_sll);
}

double clustering_term(LgCluster const &c, Netlist const &n) {
  std::vector<int> nets;
  for (int m : c.members)
    for (int e : n.inst_nets[static_cast<std::size_t>(m)])
      if (!n.nets[static_cast<std::size_t>(e)].clock) nets.push_back(e);
  std::sort(nets.begin(), nets.end());
  nets.erase(std::unique(nets.begin(), nets.end()), nets.end());
  double total = 0.0;
  for (int e : nets) {
    auto const &net = n.nets[static_cast<std::size_t>(e)];
    if (net.pins.size() < 2) continue;
    std::size_t internal = 0;
    for (auto const &p : net.pins)
      if (std::find(c.members.begin(), c.members.end(), p.instance) != c.members.end()) ++internal;
    total += static_cast<double>(internal - 1) / static_cast<double>(net.pins.size() - 1);
  }
  return total;
}

// ---------------------------------------------------------------- NetState

NetState::NetState(Netlist const &n, SlrTopology const &topo, PlacementState s)
    : n_(n), topo_(topo), s_(std::move(s)) {
  net_hpwl_.assign(n.nets.size(), 0.0);
  net_sll_.assign(n.nets.size(), 0);
  for (auto const &net : n.nets) {
    if (net.clock) continue;
    auto const e = static_cast<std::size_t>(net.id);
    net_hpwl_[e] = eval_hpwl(net);
    net_sll_[e] = eval_sll(net);
    hpwl_ += net_hpwl_[e];
    sll_ += net_sll_[e];
  }
}

double NetState::eval_hpwl(Net const &net) const { return net.weight * leaps::net_hpwl(s_, net); }

int NetState::eval_sll(Net const &net) const {
  auto const &table = shared_sll_table(topo_);
  std::uint32_t mask = 0;
  for (auto const &p : net.pins) {
    auto const z = slr_index_clamped(s_.x[static_cast<std::size_t>(p.instance)],
                                     s_.y[static_cast<std::size_t>(p.instance)], topo_);
    mask |= 1u << flat(z, topo_);
  }
  return table.count_mask(mask);
}

NetState::Delta NetState::delta(int cell, Point to) const {
  return delta(std::vector<int>{cell}, std::vector<Point>{to});
}

NetState::Delta NetState::delta(std::vector<int> const &cells, std::vector<Point> const &to) const {
  auto &self = const_cast<NetState &>(*this);
  std::vector<Point> old(cells.size());
  std::vector<int> nets;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    old[i] = s_.at(cells[i]);
    for (int e : n_.inst_nets[static_cast<std::size_t>(cells[i])])
      if (!n_.nets[static_cast<std::size_t>(e)].clock) nets.push_back(e);
  }
  std::sort(nets.begin(), nets.end());
  nets.erase(std::unique(nets.begin(), nets.end()), nets.end());
  for (std::size_t i = 0; i < cells.size(); ++i) self.s_.set(cells[i], to[i]);
  Delta d;
  for (int e : nets) {
    auto const &net = n_.nets[static_cast<std::size_t>(e)];
    d.hpwl += eval_hpwl(net) - net_hpwl_[static_cast<std::size_t>(e)];
    d.sll += eval_sll(net) - net_sll_[static_cast<std::size_t>(e)];
  }
  for (std::size_t i = cells.size(); i-- > 0;) self.s_.set(cells[i], old[i]);
  return d;
}

void NetState::move(int cell, Point to) { move(std::vector<int>{cell}, std::vector<Point>{to}); }

void NetState::move(std::vector<int> const &cells, std::vector<Point> const &to) {
  std::vector<int> nets;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    s_.set(cells[i], to[i]);
    for (int e : n_.inst_nets[static_cast<std::size_t>(cells[i])])
      if (!n_.nets[static_cast<std::size_t>(e)].clock) nets.push_back(e);
  }
  std::sort(nets.begin(), nets.end());
  nets.erase(std::unique(nets.begin(), nets.end()), nets.end());
  for (int e : nets) {
    auto const &net = n_.nets[static_cast<std::size_t>(e)];
    auto const k = static_cast<std::size_t>(e);
    double const h = eval_hpwl(net);
    int const c = eval_sll(net);
    hpwl_ += h - net_hpwl_[k];
    sll_ += c - net_sll_[k];
    net_hpwl_[k] = h;
    net_sll_[k] = c;
  }
}

// ------------------------------------------------------------- ClockBudget

ClockBudget::ClockBudget(Netlist const &n, FabricLayout const &layout) : layout_(layout) {
  nslr_ = layout.topology().count();
  regions_on_.resize(static_cast<std::size_t>(nslr_));
  for (auto const &r : layout.regions())
    regions_on_[static_cast<std::size_t>(flat(r.slr, layout.topology()))].push_back(r.id);
  hc_clocks_.resize(static_cast<std::size_t>(layout.num_half_columns()));
  region_count_.assign(layout.regions().size(), 0);
  clock_slot_.assign(n.nets.size(), -1);
  for (int k : n.clock_nets) {
    clock_slot_[static_cast<std::size_t>(k)] = static_cast<int>(boxes_.size());
    boxes_.emplace_back(static_cast<std::size_t>(nslr_));
    counted_.emplace_back(layout.regions().size(), 0);
  }
}

void ClockBudget::regions_touched(Box const &b, int slr, std::vector<int> &out) const {
  out.clear();
  for (int rid : regions_on_[static_cast<std::size_t>(slr)])
    if (closed_meet(layout_.regions()[static_cast<std::size_t>(rid)].box, b)) out.push_back(rid);
}

bool ClockBudget::allows(std::vector<int> const &clocks, Point p, std::string *why) const {
  if (clocks.empty()) return true;
  Point const q = clamp_into(p, layout_);
  auto const hc = layout_.half_column_of(q.x, q.y).id;
  auto const &have = hc_clocks_[static_cast<std::size_t>(hc)];
  std::size_t fresh = 0;
  for (int k : clocks)
    if (!std::binary_search(have.begin(), have.end(), k)) ++fresh;
  int const hc_limit = layout_.clock_grid().max_clocks_per_hc;
  if (static_cast<int>(have.size() + fresh) > hc_limit) {
    if (why) *why = "half-column " + std::to_string(hc) + " clock budget";
    return false;
  }
  int const z = flat(layout_.clock_region_clamped(q.x, q.y).slr, layout_.topology());
  std::map<int, int> added;
  std::vector<int> touched;
  for (int k : clocks) {
    int const slot = clock_slot_[static_cast<std::size_t>(k)];
    auto const &bs = boxes_[static_cast<std::size_t>(slot)][static_cast<std::size_t>(z)];
    Box b = bs.any ? bs.box : Box{q.x, q.y, q.x, q.y};
    b.lx = std::min(b.lx, q.x);
    b.hx = std::max(b.hx, q.x);
    b.ly = std::min(b.ly, q.y);
    b.hy = std::max(b.hy, q.y);
    regions_touched(b, z, touched);
    for (int rid : touched)
      if (!counted_[static_cast<std::size_t>(slot)][static_cast<std::size_t>(rid)]) ++added[rid];
  }
  for (auto const &[rid, extra] : added) {
    if (region_count_[static_cast<std::size_t>(rid)] + extra > layout_.regions()[static_cast<std::size_t>(rid)].max_clocks) {
      if (why) *why = "clock region " + std::to_string(rid) + " clock budget";
      return false;
    }
  }
  return true;
}

void ClockBudget::add(std::vector<int> const &clocks, Point p) {
  if (clocks.empty()) return;
  Point const q = clamp_into(p, layout_);
  auto &have = hc_clocks_[static_cast<std::size_t>(layout_.half_column_of(q.x, q.y).id)];
  int const z = flat(layout_.clock_region_clamped(q.x, q.y).slr, layout_.topology());
  std::vector<int> touched;
  for (int k : clocks) {
    auto it = std::lower_bound(have.begin(), have.end(), k);
    if (it == have.end() || *it != k) have.insert(it, k);
    int const slot = clock_slot_[static_cast<std::size_t>(k)];
    auto &bs = boxes_[static_cast<std::size_t>(slot)][static_cast<std::size_t>(z)];
    if (!bs.any) {
      bs.any = true;
      bs.box = {q.x, q.y, q.x, q.y};
    }
    bs.box.lx = std::min(bs.box.lx, q.x);
    bs.box.hx = std::max(bs.box.hx, q.x);
    bs.box.ly = std::min(bs.box.ly, q.y);
    bs.box.hy = std::max(bs.box.hy, q.y);
    regions_touched(bs.box, z, touched);
    for (int rid : touched) {
      auto &c = counted_[static_cast<std::size_t>(slot)][static_cast<std::size_t>(rid)];
      if (!c) {
        c = 1;
        ++region_count_[static_cast<std::size_t>(rid)];
      }
    }
  }
}

// ------------------------------------------------------------ legalization

namespace {

struct LgContext {
  Netlist const &n;
  FabricLayout const &layout;
  LgdpConfig const &config;
  NetState state;
  std::vector<int> site_of;
  std::vector<ResourceVector> occupancy;
  ClockBudget budget;
};

/// Clustering term of `cell` joining the cells already in `site`.
double join_gain(LgContext const &ctx, int cell, int site) {
  double total = 0.0;
  for (int e : ctx.n.inst_nets[static_cast<std::size_t>(cell)]) {
    auto const &net = ctx.n.nets[static_cast<std::size_t>(e)];
    if (net.clock || net.pins.size() < 2) continue;
    std::size_t internal = 0;
    for (auto const &p : net.pins)
      if (p.instance == cell || ctx.site_of[static_cast<std::size_t>(p.instance)] == site) ++internal;
    total += static_cast<double>(internal - 1) / static_cast<double>(net.pins.size() - 1);
  }
  return total;
}

Box slr_box(int z, SlrTopology const &topo) {
  int const zx = z % topo.cols, zy = z / topo.cols;
  return {topo.ref.x + zx * topo.slr_width, topo.ref.y + zy * topo.slr_height, topo.ref.x + (zx + 1) * topo.slr_width,
          topo.ref.y + (zy + 1) * topo.slr_height};
}

/// When GP leaves more demand on an SLR than its sites hold, picks the cells
/// that leave at the lowest HPWL + alpha_lg * SLL cost and moves them into a
/// neighbouring SLR with room. Returns the SLR per unmapped movable cell.
std::vector<int> balance_slrs(LgContext &ctx, PlacementState const &gp, ClockMapping const &mapping) {
  auto const &n = ctx.n;
  auto const &layout = ctx.layout;
  auto const &topo = layout.topology();
  int const nz = topo.count();
  std::vector<int> slr(n.instances.size(), -1);
  std::vector<ResourceVector> cap(static_cast<std::size_t>(nz), ResourceVector{});
  std::vector<ResourceVector> load(static_cast<std::size_t>(nz), ResourceVector{});
  for (auto const &s : layout.sites()) {
    auto const z = flat(slr_index_clamped(s.center.x, s.center.y, topo), topo);
    add_demand(cap[static_cast<std::size_t>(z)], layout.site_capacity(s));
  }
  for (auto const &inst : n.instances) {
    int z = 0;
    int const region = mapping.of(inst.id);
    if (region >= 0) {
      z = flat(layout.regions()[static_cast<std::size_t>(region)].slr, topo);
    } else {
      Point const q = clamp_into(gp.at(inst.id), layout);
      z = flat(slr_index_clamped(q.x, q.y, topo), topo);
      if (!inst.fixed) slr[static_cast<std::size_t>(inst.id)] = z;
    }
    add_demand(load[static_cast<std::size_t>(z)], inst.demand);
  }
  if (nz < 2) return slr;

  auto const &config = ctx.config;
  auto over = [&](int z, std::size_t r) { return load[static_cast<std::size_t>(z)][r] > cap[static_cast<std::size_t>(z)][r] + 1e-9; };
  double const sw = layout.site_width(), sh = layout.site_height();
  for (int z = 0; z < nz; ++z) {
    for (std::size_t r = 0; r < kNumResources; ++r) {
      while (over(z, r)) {
        double best = kInf;
        int best_cell = -1, best_to = -1;
        Point best_point{};
        for (auto const &inst : n.instances) {
          if (slr[static_cast<std::size_t>(inst.id)] != z || inst.demand[r] <= 0.0) continue;
          Point const from = ctx.state.placement().at(inst.id);
          for (int t = 0; t < nz; ++t) {
            if (t == z || !fits(load[static_cast<std::size_t>(t)], inst.demand, cap[static_cast<std::size_t>(t)])) continue;
            Box const b = slr_box(t, topo);
            Point const to{std::clamp(from.x, b.lx + 0.5 * sw, b.hx - 0.5 * sw), std::clamp(from.y, b.ly + 0.5 * sh, b.hy - 0.5 * sh)};
            auto const d = ctx.state.delta(inst.id, to);
            double const cost = d.hpwl + config.alpha_lg * d.sll;
            if (cost < best) {
              best = cost;
              best_cell = inst.id;
              best_to = t;
              best_point = to;
            }
          }
        }
        if (best_cell < 0) break;
        auto const &demand = n.instances[static_cast<std::size_t>(best_cell)].demand;
        add_demand(load[static_cast<std::size_t>(z)], demand, -1.0);
        add_demand(load[static_cast<std::size_t>(best_to)], demand);
        slr[static_cast<std::size_t>(best_cell)] = best_to;
        ctx.state.move(best_cell, best_point);
      }
    }
  }
  return slr;
}

}  // namespace

LegalPlacement legalize(PlacementState const &gp, ClockMapping const &mapping, FabricLayout const &layout,
                        Netlist const &n, LgdpConfig const &config) {
  LgContext ctx{n, layout, config, NetState(n, layout.topology(), gp), std::vector<int>(n.instances.size(), -1),
                std::vector<ResourceVector>(layout.sites().size(), ResourceVector{}), ClockBudget(n, layout)};
  LegalPlacement out;
  auto const &sites = layout.sites();

  for (auto const &inst : n.instances) {
    if (!inst.fixed) continue;
    Point const p = gp.at(inst.id);
    auto const &site = layout.site_near(p.x, p.y);
    ctx.site_of[static_cast<std::size_t>(inst.id)] = site.id;
    add_demand(ctx.occupancy[static_cast<std::size_t>(site.id)], inst.demand);
    ctx.budget.add(inst.clocks, p);
  }

  std::vector<int> order;
  for (auto const &inst : n.instances)
    if (!inst.fixed) order.push_back(inst.id);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    double const ca = n.instances[static_cast<std::size_t>(a)].charge();
    double const cb = n.instances[static_cast<std::size_t>(b)].charge();
    if (ca != cb) return ca > cb;
    return a < b;
  });

  auto const full = site_range(layout.bounds(), layout);
  auto const &topo = layout.topology();
  auto const slr_of = balance_slrs(ctx, gp, mapping);
  for (int cell : order) {
    auto const &inst = n.instances[static_cast<std::size_t>(cell)];
    int const region = mapping.of(cell);
    Point const fip = ctx.state.placement().at(cell);
    auto usable = [&](Site const &s, bool audit) {
      if (region >= 0 && s.region != region) return false;
      if (!fits(ctx.occupancy[static_cast<std::size_t>(s.id)], inst.demand, layout.site_capacity(s))) return false;
      std::string why;
      if (!ctx.budget.allows(inst.clocks, s.center, audit ? &why : nullptr)) {
        if (audit) out.audit.push_back({cell, s.id, why});
        return false;
      }
      return true;
    };

    int chosen = -1;
    Point const q = clamp_into(fip, layout);
    auto const &home = layout.site_near(q.x, q.y);
    if (home.center.x == fip.x && home.center.y == fip.y && usable(home, true)) chosen = home.id;

    auto search = [&](SiteRange const &limit) {
      int found = -1;
      int const c0 = std::clamp(home.col, limit.c0, limit.c1);
      int const r0 = std::clamp(home.row, limit.r0, limit.r1);
      int radius = std::max(0, config.window / 2);
      int prev = -1;
      for (;;) {
        SiteRange w{std::max(limit.c0, c0 - radius), std::min(limit.c1, c0 + radius), std::max(limit.r0, r0 - radius),
                    std::min(limit.r1, r0 + radius)};
        double best = -kInf, best_disp = kInf;
        for (int row = w.r0; row <= w.r1; ++row) {
          for (int col = w.c0; col <= w.c1; ++col) {
            if (prev >= 0 && std::abs(col - c0) <= prev && std::abs(row - r0) <= prev) continue;
            auto const &s = layout.site_at(col, row);
            if (!usable(s, true)) continue;
            auto const d = ctx.state.delta(cell, s.center);
            double const sc = score(join_gain(ctx, cell, s.id), d.hpwl, d.sll, config.phi_w, config.alpha_lg);
            double const disp = std::abs(s.center.x - fip.x) + std::abs(s.center.y - fip.y);
            if (sc > best || (sc == best && (disp < best_disp || (disp == best_disp && s.id < found)))) {
              best = sc;
              best_disp = disp;
              found = s.id;
            }
          }
        }
        bool const covers = w.c0 == limit.c0 && w.c1 == limit.c1 && w.r0 == limit.r0 && w.r1 == limit.r1;
        if (found >= 0 || covers) return found;
        prev = radius;
        radius = 2 * radius + 1;
      }
    };

    if (chosen < 0) {
      if (region >= 0) {
        chosen = search(site_range(layout.regions()[static_cast<std::size_t>(region)].box, layout));
      } else {
        // Unmapped cells stay on their balanced SLR while it has room.
        chosen = search(site_range(slr_box(slr_of[static_cast<std::size_t>(cell)], topo), layout));
        if (chosen < 0) chosen = search(full);
      }
    }

    if (chosen < 0) {
      out.feasible = false;
      std::ostringstream os;
      os << "no legal site for instance " << inst.name << " (" << resource_name(short_resource(inst.demand))
         << ") in " << describe_region(layout, region);
      out.failure = os.str();
      break;
    }
    auto const &s = sites[static_cast<std::size_t>(chosen)];
    ctx.site_of[static_cast<std::size_t>(cell)] = chosen;
    add_demand(ctx.occupancy[static_cast<std::size_t>(chosen)], inst.demand);
    ctx.budget.add(inst.clocks, s.center);
    ctx.state.move(cell, s.center);
    Point const origin = gp.at(cell);
    out.displacement += std::abs(s.center.x - origin.x) + std::abs(s.center.y - origin.y);
  }

  out.site = std::move(ctx.site_of);
  out.placement = ctx.state.placement();
  out.occupancy = std::move(ctx.occupancy);
  return out;
}

// ----------------------------------------------------------------- Hungarian

std::vector<int> hungarian(std::vector<std::vector<double>> const &cost) {
  std::size_t const n = cost.size();
  if (n == 0) return {};
  std::size_t const m = cost[0].size();
  if (m < n) throw std::invalid_argument("hungarian: more rows than columns");
  double big = 1.0;
  for (auto const &row : cost)
    for (double c : row)
      if (std::isfinite(c)) big = std::max(big, std::abs(c));
  big *= 4.0 * static_cast<double>(n + 1);
  auto at = [&](std::size_t i, std::size_t j) {
    double const c = cost[i - 1][j - 1];
    return std::isfinite(c) ? c : big;
  };
  // Potentials method with 1-based rows/columns and a virtual column 0.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      std::size_t const i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        double const cur = at(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      std::size_t const j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> out(n, -1);
  for (std::size_t j = 1; j <= m; ++j)
    if (p[j]) out[p[j] - 1] = static_cast<int>(j - 1);
  return out;
}

// --------------------------------------------------------- detailed placement

namespace {

struct Signature {
  ResourceVector demand;
  std::vector<int> clocks;
  int region = -1;
  friend bool operator<(Signature const &a, Signature const &b) {
    return std::tie(a.demand, a.clocks, a.region) < std::tie(b.demand, b.clocks, b.region);
  }
};

double placement_cost(NetState const &s, double alpha) { return s.hpwl() + alpha * static_cast<double>(s.sll()); }

}  // namespace

LegalPlacement detailed_place(LegalPlacement const &lp, ClockMapping const &mapping, Netlist const &n,
                              FabricLayout const &layout, LgdpConfig const &config, DpStats *stats) {
  LegalPlacement out = lp;
  DpStats local;
  DpStats &st = stats ? *stats : local;
  st = DpStats{};
  if (!lp.feasible) return out;

  auto const &sites = layout.sites();
  auto const &topo = layout.topology();
  int const nslr = topo.count();
  NetState state(n, topo, lp.placement);
  st.cost_before = placement_cost(state, config.alpha_lg);
  double cost = st.cost_before;

  std::map<Signature, int> sig_ids;
  std::vector<int> sig(n.instances.size(), -1);
  for (auto const &inst : n.instances) {
    if (inst.fixed) continue;
    Signature s{inst.demand, inst.clocks, mapping.of(inst.id)};
    auto [it, inserted] = sig_ids.emplace(s, static_cast<int>(sig_ids.size()));
    sig[static_cast<std::size_t>(inst.id)] = it->second;
  }

  std::vector<std::vector<int>> members(sites.size());
  for (auto const &inst : n.instances) members[static_cast<std::size_t>(out.site[static_cast<std::size_t>(inst.id)])].push_back(inst.id);

  // Clock presence per half-column, counted by instance.
  std::vector<std::map<int, int>> hc_clock(static_cast<std::size_t>(layout.num_half_columns()));
  for (auto const &inst : n.instances) {
    auto const hc = static_cast<std::size_t>(sites[static_cast<std::size_t>(out.site[static_cast<std::size_t>(inst.id)])].half_column);
    for (int k : inst.clocks) ++hc_clock[hc][k];
  }

  std::vector<int> net_mark(n.nets.size(), -1);
  std::vector<int> used(n.instances.size(), -1);
  int const radius = std::max(1, config.set_radius);

  for (int pass = 0; pass < config.dp_passes; ++pass) {
    double const pass_start = cost;
    // Per-clock per-SLR bounding boxes at the start of the pass; slots stay inside them.
    std::vector<std::vector<std::pair<bool, Box>>> bbox(n.nets.size());
    for (int k : n.clock_nets) {
      auto &bk = bbox[static_cast<std::size_t>(k)];
      bk.assign(static_cast<std::size_t>(nslr), {false, Box{}});
      for (auto const &p : n.nets[static_cast<std::size_t>(k)].pins) {
        Point const q = state.placement().at(p.instance);
        auto &[any, b] = bk[static_cast<std::size_t>(flat(slr_index_clamped(q.x, q.y, topo), topo))];
        if (!any) b = {q.x, q.y, q.x, q.y};
        any = true;
        b = {std::min(b.lx, q.x), std::min(b.ly, q.y), std::max(b.hx, q.x), std::max(b.hy, q.y)};
      }
    }

    for (auto const &seed_inst : n.instances) {
      int const seed = seed_inst.id;
      if (seed_inst.fixed || used[static_cast<std::size_t>(seed)] == pass) continue;
      int const sg = sig[static_cast<std::size_t>(seed)];
      auto const &home = sites[static_cast<std::size_t>(out.site[static_cast<std::size_t>(seed)])];

      struct Cand {
        int dist, id;
      };
      std::vector<Cand> cands;
      std::vector<std::pair<int, int>> free_sites;  // (dist, site)
      for (int row = std::max(0, home.row - radius); row <= std::min(layout.site_rows() - 1, home.row + radius); ++row) {
        for (int col = std::max(0, home.col - radius); col <= std::min(layout.site_cols() - 1, home.col + radius); ++col) {
          auto const &s = layout.site_at(col, row);
          int const dist = std::abs(col - home.col) + std::abs(row - home.row);
          for (int m : members[static_cast<std::size_t>(s.id)])
            if (sig[static_cast<std::size_t>(m)] == sg && used[static_cast<std::size_t>(m)] != pass) cands.push_back({dist, m});
          if (fits(out.occupancy[static_cast<std::size_t>(s.id)], seed_inst.demand, layout.site_capacity(s)))
            free_sites.push_back({dist, s.id});
        }
      }
      std::sort(cands.begin(), cands.end(), [](Cand a, Cand b) { return std::tie(a.dist, a.id) < std::tie(b.dist, b.id); });

      std::vector<int> set{seed};
      int const stamp = seed;
      for (int e : n.inst_nets[static_cast<std::size_t>(seed)]) net_mark[static_cast<std::size_t>(e)] = stamp;
      for (auto const &c : cands) {
        if (static_cast<int>(set.size()) >= config.set_size) break;
        if (c.id == seed) continue;
        bool clash = false;
        for (int e : n.inst_nets[static_cast<std::size_t>(c.id)])
          if (!n.nets[static_cast<std::size_t>(e)].clock && net_mark[static_cast<std::size_t>(e)] == stamp) clash = true;
        if (clash) continue;
        for (int e : n.inst_nets[static_cast<std::size_t>(c.id)])
          if (!n.nets[static_cast<std::size_t>(e)].clock) net_mark[static_cast<std::size_t>(e)] = stamp;
        set.push_back(c.id);
      }
      for (int c : set) used[static_cast<std::size_t>(c)] = pass;

      // Empty slots that cannot change any clock count.
      std::sort(free_sites.begin(), free_sites.end());
      std::vector<Point> slots;
      std::vector<int> slot_site;
      for (int c : set) {
        slots.push_back(state.placement().at(c));
        slot_site.push_back(out.site[static_cast<std::size_t>(c)]);
      }
      int extra = 0;
      for (auto const &[dist, sid] : free_sites) {
        if (extra >= config.empty_slots) break;
        auto const &s = sites[static_cast<std::size_t>(sid)];
        int const region = mapping.of(seed);
        if (region >= 0 && s.region != region) continue;
        bool ok = true;
        int const z = flat(slr_index_clamped(s.center.x, s.center.y, topo), topo);
        for (int k : seed_inst.clocks) {
          auto const &hc = hc_clock[static_cast<std::size_t>(s.half_column)];
          auto it = hc.find(k);
          auto const &[any, b] = bbox[static_cast<std::size_t>(k)][static_cast<std::size_t>(z)];
          if (it == hc.end() || it->second <= 0 || !any || !closed_contains(b, s.center)) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        slots.push_back(s.center);
        slot_site.push_back(sid);
        ++extra;
      }
      if (slots.size() < 2) continue;
      ++st.sets;

      std::vector<std::vector<double>> cm(set.size(), std::vector<double>(slots.size(), 0.0));
      for (std::size_t i = 0; i < set.size(); ++i)
        for (std::size_t j = 0; j < slots.size(); ++j) {
          if (j == i) continue;
          auto const d = state.delta(set[i], slots[j]);
          cm[i][j] = d.hpwl + config.alpha_lg * d.sll;
        }
      auto const assign = hungarian(cm);
      double gain = 0.0;
      for (std::size_t i = 0; i < set.size(); ++i) gain += cm[i][static_cast<std::size_t>(assign[i])];
      if (!(gain < -1e-9 * std::max(1.0, std::abs(cost)))) continue;

      std::vector<Point> to;
      for (std::size_t i = 0; i < set.size(); ++i) to.push_back(slots[static_cast<std::size_t>(assign[i])]);
      double const before = placement_cost(state, config.alpha_lg);
      state.move(set, to);
      double const after = placement_cost(state, config.alpha_lg);
      if (!(after < before)) {
        std::vector<Point> back;
        for (std::size_t i = 0; i < set.size(); ++i) back.push_back(slots[i]);
        state.move(set, back);
        continue;
      }
      ++st.improved_sets;
      for (std::size_t i = 0; i < set.size(); ++i) {
        int const c = set[i];
        auto const &inst = n.instances[static_cast<std::size_t>(c)];
        int const from = out.site[static_cast<std::size_t>(c)];
        int const dest = slot_site[static_cast<std::size_t>(assign[i])];
        if (from == dest) continue;
        auto &fm = members[static_cast<std::size_t>(from)];
        fm.erase(std::find(fm.begin(), fm.end(), c));
        members[static_cast<std::size_t>(dest)].push_back(c);
        add_demand(out.occupancy[static_cast<std::size_t>(from)], inst.demand, -1.0);
        add_demand(out.occupancy[static_cast<std::size_t>(dest)], inst.demand);
        for (int k : inst.clocks) {
          --hc_clock[static_cast<std::size_t>(sites[static_cast<std::size_t>(from)].half_column)][k];
          ++hc_clock[static_cast<std::size_t>(sites[static_cast<std::size_t>(dest)].half_column)][k];
        }
        out.site[static_cast<std::size_t>(c)] = dest;
      }
      cost = after;
    }
    ++st.passes;
    st.pass_cost.push_back(cost);
    if (pass_start - cost < config.dp_min_gain * std::abs(pass_start)) break;
  }

  st.cost_after = cost;
  out.placement = state.placement();
  return out;
}

std::vector<OverlapViolation> check_overlap(std::vector<int> const &site, Netlist const &n, FabricLayout const &layout) {
  std::vector<ResourceVector> used(layout.sites().size(), ResourceVector{});
  for (auto const &inst : n.instances) {
    int const s = site[static_cast<std::size_t>(inst.id)];
    if (s >= 0) add_demand(used[static_cast<std::size_t>(s)], inst.demand);
  }
  std::vector<OverlapViolation> out;
  for (auto const &s : layout.sites()) {
    auto const &cap = layout.site_capacity(s);
    for (std::size_t r = 0; r < kNumResources; ++r)
      if (used[static_cast<std::size_t>(s.id)][r] > cap[r] + 1e-9)
        out.push_back({s.id, static_cast<Resource>(r), used[static_cast<std::size_t>(s.id)][r], cap[r]});
  }
  return out;
}

}  // namespace leaps
