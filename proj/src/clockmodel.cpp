#include "leaps/clockmodel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace leaps {

ClockUsage clock_usage(PlacementState const &s, Netlist const &n, FabricLayout const &layout, PointClockMode mode) {
  auto const &regions = layout.regions();
  auto const &topo = layout.topology();
  int const nslr = topo.count();
  ClockUsage u;
  u.region_count.assign(regions.size(), 0);
  u.hc_count.assign(static_cast<std::size_t>(layout.num_half_columns()), 0);

  std::vector<std::vector<int>> regions_on(static_cast<std::size_t>(nslr));
  for (auto const &r : regions) regions_on[static_cast<std::size_t>(flat(r.slr, topo))].push_back(r.id);

  struct Bounds {
    double lx = 1e300, hx = -1e300, ly = 1e300, hy = -1e300;
    bool any = false;
  };
  std::vector<Bounds> bounds(static_cast<std::size_t>(nslr));
  std::vector<char> occupied(regions.size(), 0);
  std::vector<char> hc_seen(u.hc_count.size(), 0);
  std::vector<int> touched_regions, touched_hcs;

  for (int k : n.clock_nets) {
    auto const &net = n.nets[static_cast<std::size_t>(k)];
    std::fill(bounds.begin(), bounds.end(), Bounds{});
    touched_regions.clear();
    touched_hcs.clear();
    for (auto const &p : net.pins) {
      double const x = s.x[static_cast<std::size_t>(p.instance)];
      double const y = s.y[static_cast<std::size_t>(p.instance)];
      auto const ref = layout.clock_region_clamped(x, y);
      auto &b = bounds[static_cast<std::size_t>(flat(ref.slr, topo))];
      b.any = true;
      b.lx = std::min(b.lx, x);
      b.hx = std::max(b.hx, x);
      b.ly = std::min(b.ly, y);
      b.hy = std::max(b.hy, y);
      if (!occupied[static_cast<std::size_t>(ref.region)]) {
        occupied[static_cast<std::size_t>(ref.region)] = 1;
        touched_regions.push_back(ref.region);
      }
      double const cx = std::clamp(x, 0.0, std::nextafter(layout.width(), 0.0));
      double const cy = std::clamp(y, 0.0, std::nextafter(layout.height(), 0.0));
      int const hc = layout.half_column_of(cx, cy).id;
      if (!hc_seen[static_cast<std::size_t>(hc)]) {
        hc_seen[static_cast<std::size_t>(hc)] = 1;
        touched_hcs.push_back(hc);
      }
    }
    for (int z = 0; z < nslr; ++z) {
      auto const &b = bounds[static_cast<std::size_t>(z)];
      if (!b.any) continue;
      for (int rid : regions_on[static_cast<std::size_t>(z)]) {
        auto const &box = regions[static_cast<std::size_t>(rid)].box;
        ClockUsageEntry e;
        e.clock = k;
        e.region = rid;
        e.h = std::min(b.hx, box.hx) - std::max(b.lx, box.lx);
        e.v = std::min(b.hy, box.hy) - std::max(b.ly, box.ly);
        e.used = e.h > 0.0 && e.v > 0.0;
        if (!e.used && mode == PointClockMode::Inclusive)
          e.used = e.h >= 0.0 && e.v >= 0.0 && occupied[static_cast<std::size_t>(rid)];
        if (e.used) ++u.region_count[static_cast<std::size_t>(rid)];
        u.entries.push_back(e);
      }
    }
    for (int rid : touched_regions) occupied[static_cast<std::size_t>(rid)] = 0;
    for (int hc : touched_hcs) {
      ++u.hc_count[static_cast<std::size_t>(hc)];
      hc_seen[static_cast<std::size_t>(hc)] = 0;
    }
  }
  return u;
}

std::string ClockViolation::describe() const {
  std::ostringstream os;
  os << (kind == Kind::Region ? "clock region " : "half-column ") << id << ": " << count << " clocks > limit "
     << limit;
  return os.str();
}

std::vector<ClockViolation> check_constraints(ClockUsage const &usage, FabricLayout const &layout) {
  std::vector<ClockViolation> out;
  auto const &regions = layout.regions();
  for (std::size_t r = 0; r < usage.region_count.size(); ++r)
    if (usage.region_count[r] > regions[r].max_clocks)
      out.push_back({ClockViolation::Kind::Region, static_cast<int>(r), usage.region_count[r], regions[r].max_clocks});
  int const hc_limit = layout.clock_grid().max_clocks_per_hc;
  for (std::size_t h = 0; h < usage.hc_count.size(); ++h)
    if (usage.hc_count[h] > hc_limit)
      out.push_back({ClockViolation::Kind::HalfColumn, static_cast<int>(h), usage.hc_count[h], hc_limit});
  return out;
}

double bowl(double v, double lo, double hi, double *derivative) {
  double d = 0.0;
  double value = 0.0;
  if (v < lo) {
    value = (v - lo) * (v - lo);
    d = 2.0 * (v - lo);
  } else if (v > hi) {
    value = (v - hi) * (v - hi);
    d = 2.0 * (v - hi);
  }
  if (derivative) *derivative = d;
  return value;
}

double clock_penalty(PlacementState const &s, Netlist const &n, ClockMapping const &mapping,
                     FabricLayout const &layout, std::vector<double> *grad_x, std::vector<double> *grad_y) {
  if (mapping.empty()) return 0.0;
  double total = 0.0;
  auto const &regions = layout.regions();
  for (std::size_t i = 0; i < n.instances.size(); ++i) {
    int const r = mapping.region[i];
    if (r < 0 || n.instances[i].fixed) continue;
    auto const &box = regions[static_cast<std::size_t>(r)].box;
    double dx = 0.0;
    double dy = 0.0;
    total += bowl(s.x[i], box.lx, box.hx, &dx) + bowl(s.y[i], box.ly, box.hy, &dy);
    if (grad_x) (*grad_x)[i] += dx;
    if (grad_y) (*grad_y)[i] += dy;
  }
  return total;
}

double update_eta(double wl_grad_norm, double clock_grad_norm, ClockPenaltyConfig const &config) {
  return config.iota * wl_grad_norm / (clock_grad_norm + config.epsilon);
}

double outside_fraction(PlacementState const &s, ClockMapping const &mapping, FabricLayout const &layout) {
  std::size_t mapped = 0;
  std::size_t outside = 0;
  for (std::size_t i = 0; i < mapping.region.size(); ++i) {
    int const r = mapping.region[i];
    if (r < 0) continue;
    ++mapped;
    if (!layout.regions()[static_cast<std::size_t>(r)].box.contains(s.x[i], s.y[i])) ++outside;
  }
  return mapped ? static_cast<double>(outside) / static_cast<double>(mapped) : 0.0;
}

}  // namespace leaps
