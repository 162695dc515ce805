#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "leaps/clockmodel.hpp"
#include "leaps/placement.hpp"

namespace leaps {

/// Architecture text format: one `key value...` line per setting, `#` comments.
ArchConfig parse_arch(std::istream &in);
ArchConfig parse_arch_file(std::string const &path);
void write_arch(ArchConfig const &a, std::ostream &out);

/// Placement file contents. `site` is empty when no slice assignment exists.
struct PlacementFile {
  std::string design;
  std::string config_hash;
  PlacementState placement;
  std::vector<int> site;
};

/// `id x y slr_zx slr_zy slice_id` per instance (slice `-` when unassigned),
/// ordered by id, coordinates with 17 significant digits.
void write_placement(PlacementFile const &p, SlrTopology const &topo, std::ostream &out);
PlacementFile parse_placement(std::istream &in, std::size_t expected_instances);
PlacementFile parse_placement_file(std::string const &path, std::size_t expected_instances);

/// 64-bit FNV-1a of `text`, as 16 hex digits.
std::string fnv1a_hex(std::string const &text);

/// Printf-style %.17g.
std::string fmt17(double v);

/// Writes `content` to `path`, creating parent directories.
void write_text_file(std::string const &path, std::string const &content);
std::string read_text_file(std::string const &path);

}  // namespace leaps
