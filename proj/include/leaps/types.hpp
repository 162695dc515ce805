#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace leaps {

/// Resource (field) types. Every instance demands some amount of one or more
/// of these, and every site offers capacity for some of them.
enum class Resource : std::uint8_t { LUTL = 0, LUTM_AL, FF, CARRY, DSP, BRAM };

inline constexpr std::size_t kNumResources = 6;

using ResourceVector = std::array<double, kNumResources>;

inline constexpr std::array<std::string_view, kNumResources> kResourceNames = {
    "LUTL", "LUTM_AL", "FF", "CARRY", "DSP", "BRAM"};

inline constexpr std::size_t index(Resource r) { return static_cast<std::size_t>(r); }

inline std::string_view resource_name(Resource r) { return kResourceNames[index(r)]; }

/// Returns false if `name` is not a known resource.
bool parse_resource(std::string_view name, Resource &out);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Axis-aligned box, half-open membership [lx, hx) x [ly, hy).
struct Box {
  double lx = 0.0;
  double ly = 0.0;
  double hx = 0.0;
  double hy = 0.0;

  double width() const { return hx - lx; }
  double height() const { return hy - ly; }
  double area() const { return width() * height(); }
  bool empty() const { return !(hx > lx && hy > ly); }
  bool contains(double x, double y) const { return x >= lx && x < hx && y >= ly && y < hy; }
  Point center() const { return {0.5 * (lx + hx), 0.5 * (ly + hy)}; }
  /// Manhattan distance from (x, y) to the nearest point of the closed box.
  double distance(double x, double y) const;
  Box intersect(Box const &o) const;
};

/// Thrown for inconsistent architecture or run configuration. `field` names
/// the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, std::string const &what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  std::string const &field() const { return field_; }

 private:
  std::string field_;
};

/// Thrown by the text parsers; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::string const &what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class OutOfBounds : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace leaps
