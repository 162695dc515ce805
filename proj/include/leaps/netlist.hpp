#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "leaps/arch.hpp"
#include "leaps/types.hpp"

namespace leaps {

struct Instance {
  int id = 0;
  std::string name;
  ResourceVector demand{};
  bool fixed = false;
  std::optional<Point> position;
  std::vector<int> clocks;  ///< ids of the clock nets this instance sits on (sorted)

  /// Total demand over all fields; the electrostatic charge of the instance.
  double charge() const;
  /// Field with the largest demand (ties: lowest index).
  Resource primary() const;
};

struct Pin {
  int instance = 0;
  double dx = 0.0;
  double dy = 0.0;

  friend bool operator==(Pin const &, Pin const &) = default;
};

struct Net {
  int id = 0;
  double weight = 1.0;
  bool clock = false;
  std::vector<Pin> pins;
};

/// Hypergraph of instances and nets. Call finalize() after any mutation to
/// rebuild the instance -> net incidence and the clock attachments.
struct Netlist {
  std::string name = "design";
  std::vector<Instance> instances;
  std::vector<Net> nets;
  std::vector<int> clock_nets;               ///< ids of nets with clock == true (sorted)
  std::vector<std::vector<int>> inst_nets;   ///< distinct nets per instance, ascending

  void finalize();
  std::size_t num_pins() const;
  std::vector<int> movable() const;
};

/// Structural equality (names, demands, positions, pins, weights, clocks).
bool same_structure(Netlist const &a, Netlist const &b);

/// Parses the text netlist format. Throws ParseError with the offending line.
Netlist parse_netlist(std::istream &in);
Netlist parse_netlist_file(std::string const &path);

void write_netlist(Netlist const &n, std::ostream &out);
std::string write_netlist(Netlist const &n);

/// Percent-encoding used for names in all text formats.
std::string escape_name(std::string const &raw);
std::string unescape_name(std::string const &enc);

struct Diagnostic {
  enum class Severity { Warning, Error } severity = Severity::Error;
  std::string message;
};

/// Empty iff the netlist is consistent and fits the fabric capacity.
std::vector<Diagnostic> validate(Netlist const &n, FabricLayout const &layout);

struct GeneratorParams {
  int instances = 1000;
  int nets = 1000;
  double mean_pins = 3.5;   ///< mean pins per (non-clock) net
  int max_pins = 64;
  int clocks = 8;
  double lut_frac = 0.55;
  double ff_frac = 0.41;
  double dsp_frac = 0.02;
  double bram_frac = 0.02;
  int cluster_size = 40;    ///< mean instances per locality cluster
  std::uint64_t seed = 1;
  std::string name = "synthetic";
};

/// Seeded synthetic design: clustered locality seeds, preferential-attachment
/// drivers, shifted-geometric fanout. Throws ConfigError on infeasible params.
Netlist generate_synthetic(GeneratorParams const &p);

/// Architecture sized for `n`: unit sites, `lut_util` target LUT utilization,
/// width a multiple of 10 and height a multiple of 8 so 1x4, 2x2 and the 5x8
/// clock grid all divide evenly.
ArchConfig suggest_architecture(Netlist const &n, int slr_cols, int slr_rows, double lut_util = 0.7);

}  // namespace leaps
