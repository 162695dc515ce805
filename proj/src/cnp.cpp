#include "leaps/cnp.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "leaps/sll.hpp"

namespace leaps {

double distance_cost(Point p, Box const &box) { return box.distance(p.x, p.y); }

double sll_increase(std::span<int const> nodes, ClockRegion const &target, PlacementState const &s,
                    Netlist const &n, SlrTopology const &topo, CnpConfig const &config, SllIncreaseStats *stats) {
  auto const cz = slr_index_clamped(target.box.center().x, target.box.center().y, topo);
  std::uint32_t const cbit = 1u << flat(cz, topo);
  auto const &table = shared_sll_table(topo);
  double total = 0.0;
  for (int node : nodes) {
    auto const nz = slr_index_clamped(s.x[static_cast<std::size_t>(node)], s.y[static_cast<std::size_t>(node)], topo);
    if (nz == cz) continue;
    for (int e : n.inst_nets[static_cast<std::size_t>(node)]) {
      auto const &net = n.nets[static_cast<std::size_t>(e)];
      if (net.clock || static_cast<int>(net.pins.size()) > config.max_fanout) continue;
      std::uint32_t before = 0;
      std::uint32_t after = 0;
      for (auto const &p : net.pins) {
        auto const z = slr_index_clamped(s.x[static_cast<std::size_t>(p.instance)],
                                         s.y[static_cast<std::size_t>(p.instance)], topo);
        std::uint32_t const bit = 1u << flat(z, topo);
        before |= bit;
        after |= p.instance == node ? cbit : bit;
      }
      if (stats) stats->pin_visits += net.pins.size();
      if (std::popcount(before) < 2 && std::popcount(after) < 2) continue;
      if (stats) ++stats->nets_evaluated;
      double const delta = table.count_mask(after) - table.count_mask(before);
      total += config.signed_delta ? delta : std::abs(delta);
    }
  }
  return total;
}

namespace {

struct Bbox {
  double lx = 1e300, ly = 1e300, hx = -1e300, hy = -1e300;
  bool any = false;

  void add(Box const &b) {
    any = true;
    lx = std::min(lx, b.lx);
    ly = std::min(ly, b.ly);
    hx = std::max(hx, b.hx);
    hy = std::max(hy, b.hy);
  }
};

/// Incremental clock-budget and capacity state for the search.
class CoverageState {
 public:
  explicit CoverageState(CnpProblem const &p) : p_(p) {
    std::map<int, int> dense;
    for (auto const &it : p.items)
      for (int k : it.clocks) dense.emplace(k, 0);
    for (auto const &f : p.fixed) dense.emplace(f.clock, 0);
    int next = 0;
    for (auto &[k, d] : dense) d = next++;
    clock_index_ = dense;
    K_ = static_cast<std::size_t>(next);
    R_ = p.regions.size();
    int maxz = 0;
    for (auto const &r : p.regions) maxz = std::max(maxz, slr_key(r.slr));
    Z_ = static_cast<std::size_t>(maxz + 1);
    regions_on_.resize(Z_);
    for (std::size_t o = 0; o < R_; ++o)
      regions_on_[static_cast<std::size_t>(slr_key(p.regions[o].slr))].push_back(o);
    bbox_.assign(K_ * Z_, Bbox{});
    inside_.assign(K_ * R_, 0);
    used_flag_.assign(K_ * R_, 0);
    count_.assign(R_, 0);
    load_.assign(R_, ResourceVector{});
    for (auto const &f : p.fixed) {
      std::size_t const k = static_cast<std::size_t>(clock_index_.at(f.clock));
      auto const z = static_cast<std::size_t>(slr_key(p.regions[static_cast<std::size_t>(f.region)].slr));
      bbox_[k * Z_ + z].add({f.at.x, f.at.y, f.at.x, f.at.y});
      ++inside_[k * R_ + static_cast<std::size_t>(f.region)];
    }
    for (std::size_t k = 0; k < K_; ++k)
      for (std::size_t o = 0; o < R_; ++o)
        if (compute(k, o)) {
          used_flag_[k * R_ + o] = 1;
          ++count_[o];
        }
  }

  bool initially_ok() const {
    for (std::size_t o = 0; o < R_; ++o)
      if (count_[o] > p_.regions[o].max_clocks) return false;
    return true;
  }

  struct Frame {
    std::size_t item, region;
    std::vector<std::pair<std::size_t, Bbox>> saved;  // (k*Z+z, old)
    std::vector<std::size_t> flips;                   // k*R+o
  };

  /// Applies the assignment; returns false (and leaves the state unchanged) when
  /// a capacity or clock budget would break.
  bool assign(std::size_t i, std::size_t r) {
    auto const &item = p_.items[i];
    auto const &reg = p_.regions[r];
    for (std::size_t s = 0; s < kNumResources; ++s)
      if (item.demand[s] > 0 && load_[r][s] + item.demand[s] > reg.capacity[s] + 1e-9) return false;
    Frame f{i, r, {}, {}};
    bool ok = true;
    auto const z = static_cast<std::size_t>(slr_key(reg.slr));
    for (int clk : item.clocks) {
      std::size_t const k = static_cast<std::size_t>(clock_index_.at(clk));
      f.saved.emplace_back(k * Z_ + z, bbox_[k * Z_ + z]);
      bbox_[k * Z_ + z].add(reg.box);
      ++inside_[k * R_ + r];
      for (std::size_t o : regions_on_[z]) {
        std::size_t const key = k * R_ + o;
        if (used_flag_[key]) continue;
        if (compute(k, o)) {
          used_flag_[key] = 1;
          f.flips.push_back(key);
          if (++count_[o] > p_.regions[o].max_clocks) ok = false;
        }
      }
    }
    for (std::size_t s = 0; s < kNumResources; ++s) load_[r][s] += item.demand[s];
    frames_.push_back(std::move(f));
    if (!ok) {
      undo();
      return false;
    }
    return true;
  }

  void undo() {
    auto f = std::move(frames_.back());
    frames_.pop_back();
    auto const &item = p_.items[f.item];
    for (std::size_t s = 0; s < kNumResources; ++s) load_[f.region][s] -= item.demand[s];
    for (std::size_t key : f.flips) {
      used_flag_[key] = 0;
      --count_[key % R_];
    }
    for (int clk : item.clocks) --inside_[static_cast<std::size_t>(clock_index_.at(clk)) * R_ + f.region];
    for (auto it = f.saved.rbegin(); it != f.saved.rend(); ++it) bbox_[it->first] = it->second;
  }

 private:
  int slr_key(SlrIndex z) const { return z.zy * 8 + z.zx; }

  bool compute(std::size_t k, std::size_t o) const {
    auto const &reg = p_.regions[o];
    auto const &b = bbox_[k * Z_ + static_cast<std::size_t>(slr_key(reg.slr))];
    if (!b.any) return false;
    double const h = std::min(b.hx, reg.box.hx) - std::max(b.lx, reg.box.lx);
    double const v = std::min(b.hy, reg.box.hy) - std::max(b.ly, reg.box.ly);
    if (h > 0.0 && v > 0.0) return true;
    return p_.mode == PointClockMode::Inclusive && h >= 0.0 && v >= 0.0 && inside_[k * R_ + o] > 0;
  }

  CnpProblem const &p_;
  std::map<int, int> clock_index_;
  std::size_t K_ = 0, R_ = 0, Z_ = 0;
  std::vector<std::vector<std::size_t>> regions_on_;
  std::vector<Bbox> bbox_;
  std::vector<int> inside_;
  std::vector<char> used_flag_;
  std::vector<int> count_;
  std::vector<ResourceVector> load_;
  std::vector<Frame> frames_;
};

}  // namespace

bool capacity_ok(CnpProblem const &p, std::vector<int> const &assignment) {
  std::vector<ResourceVector> load(p.regions.size(), ResourceVector{});
  for (std::size_t i = 0; i < p.items.size(); ++i)
    for (std::size_t s = 0; s < kNumResources; ++s)
      load[static_cast<std::size_t>(assignment[i])][s] += p.items[i].demand[s];
  for (std::size_t r = 0; r < p.regions.size(); ++r)
    for (std::size_t s = 0; s < kNumResources; ++s)
      if (load[r][s] > p.regions[r].capacity[s] + 1e-9) return false;
  return true;
}

bool feasible_clock_routing(CnpProblem const &p, std::vector<int> const &assignment) {
  std::map<std::pair<int, int>, Bbox> bbox;  // (clock, slr key)
  std::map<std::pair<int, int>, bool> inside;  // (clock, region)
  auto key_of = [](SlrIndex z) { return z.zy * 8 + z.zx; };
  for (std::size_t i = 0; i < p.items.size(); ++i) {
    auto const &reg = p.regions[static_cast<std::size_t>(assignment[i])];
    for (int k : p.items[i].clocks) {
      bbox[{k, key_of(reg.slr)}].add(reg.box);
      inside[{k, assignment[i]}] = true;
    }
  }
  for (auto const &f : p.fixed) {
    auto const &reg = p.regions[static_cast<std::size_t>(f.region)];
    bbox[{f.clock, key_of(reg.slr)}].add({f.at.x, f.at.y, f.at.x, f.at.y});
    inside[{f.clock, f.region}] = true;
  }
  std::vector<int> count(p.regions.size(), 0);
  for (auto const &[key, b] : bbox) {
    for (std::size_t o = 0; o < p.regions.size(); ++o) {
      auto const &reg = p.regions[o];
      if (key_of(reg.slr) != key.second) continue;
      double const h = std::min(b.hx, reg.box.hx) - std::max(b.lx, reg.box.lx);
      double const v = std::min(b.hy, reg.box.hy) - std::max(b.ly, reg.box.ly);
      bool used = h > 0.0 && v > 0.0;
      if (!used && p.mode == PointClockMode::Inclusive) {
        auto it = inside.find({key.first, static_cast<int>(o)});
        used = h >= 0.0 && v >= 0.0 && it != inside.end();
      }
      count[o] += used;
    }
  }
  for (std::size_t o = 0; o < p.regions.size(); ++o)
    if (count[o] > p.regions[o].max_clocks) return false;
  return true;
}

double assignment_cost(CnpProblem const &p, std::vector<int> const &assignment) {
  double c = 0.0;
  for (std::size_t i = 0; i < p.items.size(); ++i) c += p.cost(i, static_cast<std::size_t>(assignment[i]));
  return c;
}

CnpSolution solve_mapping(CnpProblem const &p) {
  CnpSolution sol;
  std::size_t const n = p.items.size();
  std::size_t const R = p.regions.size();
  if (n == 0) {
    sol.feasible = true;
    sol.optimal = true;
    return sol;
  }
  if (R == 0) {
    sol.certificate = "no clock regions";
    return sol;
  }
  // Aggregate capacity is a necessary condition.
  ResourceVector demand{}, capacity{};
  for (auto const &it : p.items)
    for (std::size_t s = 0; s < kNumResources; ++s) demand[s] += it.demand[s];
  for (auto const &r : p.regions)
    for (std::size_t s = 0; s < kNumResources; ++s) capacity[s] += r.capacity[s];
  for (std::size_t s = 0; s < kNumResources; ++s) {
    if (demand[s] > capacity[s] + 1e-9) {
      std::ostringstream os;
      os << "field " << kResourceNames[s] << ": demand " << demand[s] << " exceeds total region capacity "
         << capacity[s];
      sol.certificate = os.str();
      return sol;
    }
  }
  CoverageState state(p);
  if (!state.initially_ok()) {
    sol.certificate = "fixed clocked instances alone exceed a clock-region budget";
    return sol;
  }

  std::vector<double> min_cost(n), spread(n);
  std::vector<std::vector<std::size_t>> region_order(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto &ord = region_order[i];
    ord.resize(R);
    std::iota(ord.begin(), ord.end(), 0);
    std::stable_sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return p.cost(i, a) < p.cost(i, b); });
    min_cost[i] = p.cost(i, ord.front());
    spread[i] = p.cost(i, ord.back()) - min_cost[i];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return spread[a] > spread[b]; });
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t d = n; d-- > 0;) suffix[d] = suffix[d + 1] + min_cost[order[d]];

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> current(n, -1), incumbent;
  bool truncated = false;
  auto const start = std::chrono::steady_clock::now();
  std::int64_t nodes = 0;

  auto out_of_budget = [&]() {
    if (nodes >= p.node_limit) return true;
    if (p.time_limit_s > 0.0 && (nodes & 1023) == 0) {
      double const el = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (el > p.time_limit_s) return true;
    }
    return false;
  };

  auto dfs = [&](auto &&self, std::size_t depth, double cost) -> void {
    if (truncated) return;
    if (depth == n) {
      if (cost < best) {
        best = cost;
        incumbent = current;
      }
      return;
    }
    std::size_t const i = order[depth];
    for (std::size_t r : region_order[i]) {
      double const c = cost + p.cost(i, r);
      double const tol = 1e-9 * std::max(1.0, std::abs(best));
      if (c + suffix[depth + 1] >= best - tol) break;  // regions are sorted by cost
      if (out_of_budget()) {
        truncated = true;
        return;
      }
      ++nodes;
      if (!state.assign(i, r)) continue;
      current[i] = static_cast<int>(r);
      self(self, depth + 1, c);
      current[i] = -1;
      state.undo();
      if (truncated) return;
    }
  };
  dfs(dfs, 0, 0.0);

  sol.nodes = nodes;
  sol.lower_bound = suffix[0];
  if (!incumbent.empty()) {
    sol.feasible = true;
    sol.assignment = incumbent;
    sol.objective = best;
    sol.optimal = !truncated;
    if (sol.optimal) sol.lower_bound = best;
    sol.gap = sol.objective - sol.lower_bound;
    if (truncated) sol.certificate = "search budget reached; best found reported with gap";
  } else {
    sol.certificate = truncated ? "search budget reached before any feasible assignment"
                                : "no assignment satisfies region capacities and clock budgets";
  }
  return sol;
}

CnpProblem build_cnp_problem(PlacementState const &s, Netlist const &n, FabricLayout const &layout,
                             CnpConfig const &config) {
  CnpProblem p;
  p.alpha = config.alpha;
  p.mode = config.mode;
  p.node_limit = config.node_limit;
  p.time_limit_s = config.time_limit_s;
  auto const &topo = layout.topology();

  for (auto const &r : layout.regions()) {
    CnpRegion cr;
    cr.id = r.id;
    cr.box = r.box;
    cr.slr = r.slr;
    cr.max_clocks = r.max_clocks;
    p.regions.push_back(cr);
  }
  for (auto const &site : layout.sites()) {
    auto const &cap = layout.site_capacity(site);
    for (std::size_t k = 0; k < kNumResources; ++k)
      p.regions[static_cast<std::size_t>(site.region)].capacity[k] += cap[k] * config.capacity_factor;
  }

  double const tile_w = layout.width() / layout.clock_grid().cols * config.tile_fraction;
  double const tile_h = layout.height() / layout.clock_grid().rows * config.tile_fraction;
  std::map<std::tuple<std::vector<int>, int, int, int, int>, std::vector<int>> groups;
  for (auto const &inst : n.instances) {
    if (inst.clocks.empty()) continue;
    double const x = s.x[static_cast<std::size_t>(inst.id)];
    double const y = s.y[static_cast<std::size_t>(inst.id)];
    if (inst.fixed) {
      auto const ref = layout.clock_region_clamped(x, y);
      for (int k : inst.clocks) p.fixed.push_back({k, {x, y}, ref.region});
      continue;
    }
    int const tx = static_cast<int>(std::floor(std::clamp(x, 0.0, layout.width() - 1e-9) / tile_w));
    int const ty = static_cast<int>(std::floor(std::clamp(y, 0.0, layout.height() - 1e-9) / tile_h));
    int const z = flat(slr_index_clamped(x, y, topo), topo);
    groups[{inst.clocks, static_cast<int>(index(inst.primary())), tx, ty, z}].push_back(inst.id);
  }
  for (auto &[key, members] : groups) {
    for (std::size_t start = 0; start < members.size(); start += static_cast<std::size_t>(config.max_cluster)) {
      CnpItem item;
      item.clocks = std::get<0>(key);
      auto const end = std::min(members.size(), start + static_cast<std::size_t>(config.max_cluster));
      item.members.assign(members.begin() + static_cast<std::ptrdiff_t>(start),
                          members.begin() + static_cast<std::ptrdiff_t>(end));
      for (int m : item.members)
        for (std::size_t k = 0; k < kNumResources; ++k) item.demand[k] += n.instances[static_cast<std::size_t>(m)].demand[k];
      p.items.push_back(std::move(item));
    }
  }

  // Algorithm 1 only depends on the target's SLR, so evaluate once per (member, SLR).
  std::vector<ClockRegion const *> slr_rep(static_cast<std::size_t>(topo.count()), nullptr);
  for (auto const &r : layout.regions()) {
    auto &rep = slr_rep[static_cast<std::size_t>(flat(r.slr, topo))];
    if (!rep) rep = &r;
  }
  std::size_t const R = p.regions.size();
  p.distance.assign(p.items.size(), std::vector<double>(R, 0.0));
  p.increase.assign(p.items.size(), std::vector<double>(R, 0.0));
  std::vector<double> per_slr(static_cast<std::size_t>(topo.count()));
  for (std::size_t i = 0; i < p.items.size(); ++i) {
    auto const &item = p.items[i];
    for (int z = 0; z < topo.count(); ++z)
      per_slr[static_cast<std::size_t>(z)] =
          slr_rep[static_cast<std::size_t>(z)]
              ? sll_increase(item.members, *slr_rep[static_cast<std::size_t>(z)], s, n, topo, config)
              : 0.0;
    for (std::size_t r = 0; r < R; ++r) {
      double d = 0.0;
      for (int m : item.members) d += distance_cost(s.at(m), p.regions[r].box);
      p.distance[i][r] = d;
      p.increase[i][r] = per_slr[static_cast<std::size_t>(flat(p.regions[r].slr, topo))];
    }
  }
  return p;
}

CnpResult run_cnp(PlacementState const &s, Netlist const &n, FabricLayout const &layout, CnpConfig const &config) {
  CnpResult res;
  auto const p = build_cnp_problem(s, n, layout, config);
  res.clusters = p.items.size();
  res.solution = solve_mapping(p);
  res.mapping.region.assign(n.instances.size(), -1);
  if (res.solution.feasible)
    for (std::size_t i = 0; i < p.items.size(); ++i)
      for (int m : p.items[i].members) res.mapping.region[static_cast<std::size_t>(m)] = res.solution.assignment[i];
  return res;
}

}  // namespace leaps
