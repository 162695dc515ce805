#include "leaps/arch.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace leaps {

bool parse_resource(std::string_view name, Resource &out) {
  for (std::size_t i = 0; i < kNumResources; ++i) {
    if (kResourceNames[i] == name) {
      out = static_cast<Resource>(i);
      return true;
    }
  }
  if (name == "LUTM-AL" || name == "LUTM") {
    out = Resource::LUTM_AL;
    return true;
  }
  if (name == "LUT") {
    out = Resource::LUTL;
    return true;
  }
  return false;
}

double Box::distance(double x, double y) const {
  double dx = 0.0;
  double dy = 0.0;
  if (x < lx) dx = lx - x;
  else if (x > hx) dx = x - hx;
  if (y < ly) dy = ly - y;
  else if (y > hy) dy = y - hy;
  return dx + dy;
}

Box Box::intersect(Box const &o) const {
  return {std::max(lx, o.lx), std::max(ly, o.ly), std::min(hx, o.hx), std::min(hy, o.hy)};
}

namespace {

int floor_index(double offset, double pitch, int count) {
  auto i = static_cast<int>(std::floor(offset / pitch));
  return std::clamp(i, 0, count - 1);
}

bool is_whole(double v) { return std::abs(v - std::round(v)) < 1e-9; }

/// Checks that `total` splits into `parts` pieces on a unit lattice.
void require_divisible(double total, int parts, std::string const &field) {
  if (!is_whole(total) || std::llround(total) % parts != 0) {
    std::ostringstream os;
    os << total << " not divisible by " << parts << " at unit granularity";
    throw ConfigError(field, os.str());
  }
}

}  // namespace

SlrIndex slr_index_clamped(double x, double y, SlrTopology const &topo) {
  return {floor_index(std::abs(x - topo.ref.x), topo.slr_width, topo.cols),
          floor_index(std::abs(y - topo.ref.y), topo.slr_height, topo.rows)};
}

SlrIndex slr_index_of(double x, double y, SlrTopology const &topo) {
  double const w = topo.cols * topo.slr_width;
  double const h = topo.rows * topo.slr_height;
  double const ox = x - topo.ref.x;
  double const oy = y - topo.ref.y;
  if (!(ox >= 0.0 && ox <= w && oy >= 0.0 && oy <= h)) {
    std::ostringstream os;
    os << "point (" << x << ", " << y << ") outside layout";
    throw OutOfBounds(os.str());
  }
  return slr_index_clamped(x, y, topo);
}

std::map<char, ResourceVector> ArchConfig::default_site_types() {
  std::map<char, ResourceVector> types;
  ResourceVector clb{};
  clb[index(Resource::LUTL)] = 8;
  clb[index(Resource::FF)] = 16;
  clb[index(Resource::CARRY)] = 1;
  types['C'] = clb;
  ResourceVector clbm = clb;
  clbm[index(Resource::LUTM_AL)] = 8;
  types['M'] = clbm;
  ResourceVector dsp{};
  dsp[index(Resource::DSP)] = 1;
  types['D'] = dsp;
  ResourceVector bram{};
  bram[index(Resource::BRAM)] = 1;
  types['B'] = bram;
  return types;
}

FabricLayout build_layout(ArchConfig const &config) {
  FabricLayout L;
  L.config_ = config;
  auto &topo = L.topo_;
  if (config.slr_cols < 1 || config.slr_cols > 5) throw ConfigError("slr_cols", "must be in [1, 5]");
  if (config.slr_rows < 1 || config.slr_rows > 5) throw ConfigError("slr_rows", "must be in [1, 5]");
  topo.cols = config.slr_cols;
  topo.rows = config.slr_rows;
  topo.ref = config.ref;

  auto resolve = [](std::optional<double> total, std::optional<double> per, int parts,
                    char const *total_name, char const *per_name, double &out_total, double &out_per) {
    if (total && per) {
      if (std::abs(*total - *per * parts) > 1e-9)
        throw ConfigError(total_name, "disagrees with " + std::string(per_name) + " x count");
      out_total = *total;
      out_per = *per;
    } else if (total) {
      require_divisible(*total, parts, total_name);
      out_total = *total;
      out_per = *total / parts;
    } else if (per) {
      out_per = *per;
      out_total = *per * parts;
    } else {
      throw ConfigError(total_name, "missing (give " + std::string(total_name) + " or " + per_name + ")");
    }
    if (!(out_per > 0.0)) throw ConfigError(per_name, "must be positive");
  };
  resolve(config.width, config.slr_width, topo.cols, "width", "slr_width", L.width_, topo.slr_width);
  resolve(config.height, config.slr_height, topo.rows, "height", "slr_height", L.height_,
          topo.slr_height);

  auto const &cg = config.clock;
  if (cg.cols < 1) throw ConfigError("cr_cols", "must be >= 1");
  if (cg.rows < 1) throw ConfigError("cr_rows", "must be >= 1");
  if (cg.max_clocks_per_cr < 0) throw ConfigError("cr_max_clocks", "must be >= 0");
  if (cg.max_clocks_per_hc < 0) throw ConfigError("hc_max_clocks", "must be >= 0");
  if (cg.hc_columns < 1) throw ConfigError("hc_columns", "must be >= 1");
  require_divisible(L.width_, cg.cols, "cr_cols");
  require_divisible(L.height_, cg.rows, "cr_rows");
  L.clock_ = cg;

  // Clock regions, clipped per SLR.
  double const crw = L.width_ / cg.cols;
  double const crh = L.height_ / cg.rows;
  int const nslr = topo.count();
  L.region_of_cell_.assign(static_cast<std::size_t>(cg.cols * cg.rows * nslr), -1);
  for (int row = 0; row < cg.rows; ++row) {
    for (int col = 0; col < cg.cols; ++col) {
      Box cell{col * crw, row * crh, (col + 1) * crw, (row + 1) * crh};
      for (int zy = 0; zy < topo.rows; ++zy) {
        for (int zx = 0; zx < topo.cols; ++zx) {
          Box slr{topo.ref.x + zx * topo.slr_width, topo.ref.y + zy * topo.slr_height,
                  topo.ref.x + (zx + 1) * topo.slr_width, topo.ref.y + (zy + 1) * topo.slr_height};
          Box piece = cell.intersect(slr);
          if (piece.empty()) continue;
          ClockRegion r;
          r.id = static_cast<int>(L.regions_.size());
          r.col = col;
          r.row = row;
          r.slr = {zx, zy};
          r.box = piece;
          r.max_clocks = cg.max_clocks_per_cr;
          L.region_of_cell_[static_cast<std::size_t>((row * cg.cols + col) * nslr + zy * topo.cols + zx)] =
              r.id;
          L.regions_.push_back(r);
        }
      }
    }
  }

  // Bin grid and site lattice.
  if (config.bins_x < 2) throw ConfigError("bins_x", "need at least 2 bins per axis");
  if (config.bins_y < 2) throw ConfigError("bins_y", "need at least 2 bins per axis");
  L.bins_x_ = config.bins_x;
  L.bins_y_ = config.bins_y;
  if (!(config.site_width > 0.0)) throw ConfigError("site_width", "must be positive");
  if (!(config.site_height > 0.0)) throw ConfigError("site_height", "must be positive");
  double const scols = L.width_ / config.site_width;
  double const srows = L.height_ / config.site_height;
  if (!is_whole(scols)) throw ConfigError("site_width", "does not divide the layout width");
  if (!is_whole(srows)) throw ConfigError("site_height", "does not divide the layout height");
  L.site_cols_ = static_cast<int>(std::llround(scols));
  L.site_rows_ = static_cast<int>(std::llround(srows));

  auto types = config.site_types.empty() ? ArchConfig::default_site_types() : config.site_types;
  std::map<char, int> type_index;
  for (auto const &[code, cap] : types) {
    for (double c : cap)
      if (c < 0.0) throw ConfigError("site_capacity", std::string("negative capacity for site ") + code);
    type_index[code] = static_cast<int>(L.site_types_.size());
    L.site_types_.push_back({code, cap});
  }
  std::string pattern = config.column_pattern;
  if (pattern.empty()) pattern.assign(static_cast<std::size_t>(L.site_cols_), 'C');
  if (static_cast<int>(pattern.size()) != L.site_cols_)
    throw ConfigError("site_columns", "pattern length " + std::to_string(pattern.size()) +
                                          " != site column count " + std::to_string(L.site_cols_));
  for (char c : pattern)
    if (!type_index.count(c)) throw ConfigError("site_columns", std::string("unknown site type '") + c + "'");

  for (auto &m : L.capacity_) m.assign(static_cast<std::size_t>(L.bins_x_ * L.bins_y_), 0.0);
  double const bw = L.bin_width();
  double const bh = L.bin_height();
  L.sites_.reserve(static_cast<std::size_t>(L.site_cols_ * L.site_rows_));
  for (int row = 0; row < L.site_rows_; ++row) {
    for (int col = 0; col < L.site_cols_; ++col) {
      Site s;
      s.id = static_cast<int>(L.sites_.size());
      s.col = col;
      s.row = row;
      s.type = type_index[pattern[static_cast<std::size_t>(col)]];
      s.center = {(col + 0.5) * config.site_width, (row + 0.5) * config.site_height};
      s.region = L.clock_region_of(s.center.x, s.center.y).region;
      s.half_column = L.half_column_of(s.center.x, s.center.y).id;
      L.sites_.push_back(s);

      // Spread the site's capacity over the bins it overlaps.
      Box sb{col * config.site_width, row * config.site_height, (col + 1) * config.site_width,
             (row + 1) * config.site_height};
      double const inv_area = 1.0 / sb.area();
      int const bx0 = floor_index(sb.lx, bw, L.bins_x_);
      int const bx1 = floor_index(std::nextafter(sb.hx, sb.lx), bw, L.bins_x_);
      int const by0 = floor_index(sb.ly, bh, L.bins_y_);
      int const by1 = floor_index(std::nextafter(sb.hy, sb.ly), bh, L.bins_y_);
      auto const &cap = L.site_types_[static_cast<std::size_t>(s.type)].capacity;
      for (int by = by0; by <= by1; ++by) {
        double const oy = std::min(sb.hy, (by + 1) * bh) - std::max(sb.ly, by * bh);
        if (oy <= 0) continue;
        for (int bx = bx0; bx <= bx1; ++bx) {
          double const ox = std::min(sb.hx, (bx + 1) * bw) - std::max(sb.lx, bx * bw);
          if (ox <= 0) continue;
          double const frac = ox * oy * inv_area;
          for (std::size_t r = 0; r < kNumResources; ++r)
            if (cap[r] > 0) L.capacity_[r][static_cast<std::size_t>(by * L.bins_x_ + bx)] += cap[r] * frac;
        }
      }
    }
  }
  return L;
}

int FabricLayout::region_lookup(int col, int row, SlrIndex z) const {
  return region_of_cell_[static_cast<std::size_t>((row * clock_.cols + col) * topo_.count() + flat(z, topo_))];
}

ClockRegionRef FabricLayout::clock_region_clamped(double x, double y) const {
  int const col = floor_index(x, width_ / clock_.cols, clock_.cols);
  int const row = floor_index(y, height_ / clock_.rows, clock_.rows);
  SlrIndex const z = slr_index_clamped(x, y, topo_);
  int id = region_lookup(col, row, z);
  if (id < 0) {
    // Only reachable through clamping at a shared corner; fall back to any piece of the cell.
    for (auto const &r : regions_)
      if (r.col == col && r.row == row) {
        id = r.id;
        break;
      }
  }
  return {id, col, row, regions_[static_cast<std::size_t>(id)].slr};
}

ClockRegionRef FabricLayout::clock_region_of(double x, double y) const {
  if (!(x >= 0.0 && x <= width_ && y >= 0.0 && y <= height_)) {
    std::ostringstream os;
    os << "point (" << x << ", " << y << ") outside layout";
    throw OutOfBounds(os.str());
  }
  return clock_region_clamped(x, y);
}

HalfColumnRef FabricLayout::half_column_of(double x, double y) const {
  auto const ref = clock_region_of(x, y);
  auto const &box = regions_[static_cast<std::size_t>(ref.region)].box;
  HalfColumnRef hc;
  hc.region = ref.region;
  hc.column = floor_index(x - box.lx, box.width() / clock_.hc_columns, clock_.hc_columns);
  hc.upper = y >= 0.5 * (box.ly + box.hy);
  hc.id = (ref.region * clock_.hc_columns + hc.column) * 2 + (hc.upper ? 1 : 0);
  return hc;
}

Box FabricLayout::half_column_box(int hc) const {
  int const upper = hc % 2;
  int const column = (hc / 2) % clock_.hc_columns;
  int const region = hc / (2 * clock_.hc_columns);
  auto const &box = regions_[static_cast<std::size_t>(region)].box;
  double const cw = box.width() / clock_.hc_columns;
  double const mid = 0.5 * (box.ly + box.hy);
  return {box.lx + column * cw, upper ? mid : box.ly, box.lx + (column + 1) * cw, upper ? box.hy : mid};
}

ResourceVector FabricLayout::total_capacity() const {
  ResourceVector total{};
  for (std::size_t r = 0; r < kNumResources; ++r)
    for (double c : capacity_[r]) total[r] += c;
  return total;
}

Site const &FabricLayout::site_near(double x, double y) const {
  int const col = floor_index(x, config_.site_width, site_cols_);
  int const row = floor_index(y, config_.site_height, site_rows_);
  return site_at(col, row);
}

}  // namespace leaps
