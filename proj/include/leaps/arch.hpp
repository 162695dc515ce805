#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "leaps/types.hpp"

namespace leaps {

/// m x n arrangement of super logic regions (dies).
struct SlrTopology {
  int cols = 1;
  int rows = 1;
  double slr_width = 1.0;
  double slr_height = 1.0;
  Point ref{};

  int count() const { return cols * rows; }
};

/// Two-dimensional SLR index (column, row).
struct SlrIndex {
  int zx = 0;
  int zy = 0;

  friend bool operator==(SlrIndex const &, SlrIndex const &) = default;
  friend auto operator<=>(SlrIndex const &, SlrIndex const &) = default;
};

inline int flat(SlrIndex z, SlrTopology const &topo) { return z.zy * topo.cols + z.zx; }

/// floor(|x - x_ref| / slr_width), floor(|y - y_ref| / slr_height); points on
/// the outer top/right edge clamp to the last index. Throws OutOfBounds.
SlrIndex slr_index_of(double x, double y, SlrTopology const &topo);

/// Same as slr_index_of but clamps out-of-layout points instead of throwing.
SlrIndex slr_index_clamped(double x, double y, SlrTopology const &topo);

struct ClockGridConfig {
  int cols = 5;
  int rows = 8;
  int max_clocks_per_cr = 24;
  int max_clocks_per_hc = 12;
  int hc_columns = 4;  ///< half-column pairs per clock region
};

/// A clock region restricted to one SLR. When the clock-region grid is aligned
/// with the SLR grid each grid cell yields exactly one of these.
struct ClockRegion {
  int id = 0;
  int col = 0;  ///< grid column o_x
  int row = 0;  ///< grid row o_y
  SlrIndex slr;
  Box box;
  int max_clocks = 24;
};

struct ClockRegionRef {
  int region = 0;  ///< ClockRegion::id
  int col = 0;
  int row = 0;
  SlrIndex slr;
};

struct HalfColumnRef {
  int region = 0;
  int column = 0;
  bool upper = false;
  int id = 0;  ///< flat id, dense in [0, num_half_columns)
};

struct SiteType {
  char code = 'C';
  ResourceVector capacity{};
};

struct Site {
  int id = 0;
  int col = 0;
  int row = 0;
  int type = 0;  ///< index into FabricLayout::site_types()
  Point center;
  int region = 0;
  int half_column = 0;
};

/// Architecture description as read from an architecture file. Either the
/// total width/height or the per-SLR size may be given.
struct ArchConfig {
  std::optional<double> width;
  std::optional<double> height;
  std::optional<double> slr_width;
  std::optional<double> slr_height;
  int slr_cols = 1;
  int slr_rows = 1;
  Point ref{};
  ClockGridConfig clock;
  int bins_x = 128;
  int bins_y = 128;
  double site_width = 1.0;
  double site_height = 1.0;
  /// One character per site column; empty means all 'C'.
  std::string column_pattern;
  std::map<char, ResourceVector> site_types;

  static std::map<char, ResourceVector> default_site_types();
};

/// Immutable physical fabric.
class FabricLayout {
 public:
  double width() const { return width_; }
  double height() const { return height_; }
  Box bounds() const { return {0.0, 0.0, width_, height_}; }
  SlrTopology const &topology() const { return topo_; }
  ClockGridConfig const &clock_grid() const { return clock_; }
  ArchConfig const &config() const { return config_; }

  std::vector<ClockRegion> const &regions() const { return regions_; }
  int num_half_columns() const { return static_cast<int>(regions_.size()) * 2 * clock_.hc_columns; }

  ClockRegionRef clock_region_of(double x, double y) const;
  ClockRegionRef clock_region_clamped(double x, double y) const;
  HalfColumnRef half_column_of(double x, double y) const;
  /// Box of the given half-column.
  Box half_column_box(int hc) const;

  // Bin grid used by the density model.
  int bins_x() const { return bins_x_; }
  int bins_y() const { return bins_y_; }
  double bin_width() const { return width_ / bins_x_; }
  double bin_height() const { return height_ / bins_y_; }
  /// Per-bin capacity of resource r, row-major with x fastest (index = by * bins_x + bx).
  std::vector<double> const &capacity_map(Resource r) const { return capacity_[index(r)]; }
  ResourceVector total_capacity() const;

  // Site lattice used by legalization and detailed placement.
  int site_cols() const { return site_cols_; }
  int site_rows() const { return site_rows_; }
  double site_width() const { return config_.site_width; }
  double site_height() const { return config_.site_height; }
  std::vector<SiteType> const &site_types() const { return site_types_; }
  std::vector<Site> const &sites() const { return sites_; }
  Site const &site_at(int col, int row) const { return sites_[row * site_cols_ + col]; }
  ResourceVector const &site_capacity(Site const &s) const { return site_types_[s.type].capacity; }
  /// Site whose footprint contains (x, y), clamped into the lattice.
  Site const &site_near(double x, double y) const;

  friend FabricLayout build_layout(ArchConfig const &config);

 private:
  int region_lookup(int col, int row, SlrIndex z) const;

  ArchConfig config_;
  double width_ = 0.0;
  double height_ = 0.0;
  SlrTopology topo_;
  ClockGridConfig clock_;
  std::vector<ClockRegion> regions_;
  std::vector<int> region_of_cell_;  // (row * cols + col) * nslr + flat(slr) -> id or -1
  int bins_x_ = 0;
  int bins_y_ = 0;
  std::array<std::vector<double>, kNumResources> capacity_;
  int site_cols_ = 0;
  int site_rows_ = 0;
  std::vector<SiteType> site_types_;
  std::vector<Site> sites_;
};

/// Validates `config` and builds the fabric. Throws ConfigError naming the
/// first inconsistent field.
FabricLayout build_layout(ArchConfig const &config);

}  // namespace leaps
