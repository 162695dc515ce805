#include "leaps/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "leaps/sll.hpp"

namespace leaps {

namespace {

std::vector<std::string> tokens(std::string const &line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string t;
  while (is >> t) {
    if (t[0] == '#') break;
    out.push_back(t);
  }
  return out;
}

bool to_double(std::string const &s, double &v) {
  auto const *end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  return ec == std::errc() && p == end && std::isfinite(v);
}

bool to_int(std::string const &s, int &v) {
  auto const *end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  return ec == std::errc() && p == end;
}

}  // namespace

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fnv1a_hex(std::string const &text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_text_file(std::string const &path, std::string const &content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string read_text_file(std::string const &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// ------------------------------------------------------------- architecture

ArchConfig parse_arch(std::istream &in) {
  ArchConfig a;
  a.site_types.clear();
  std::string line;
  std::size_t lineno = 0;
  auto num = [&](std::vector<std::string> const &t, std::size_t i) {
    double v = 0;
    if (i >= t.size() || !to_double(t[i], v)) throw ParseError(lineno, "'" + t[0] + "' needs a number");
    return v;
  };
  auto integer = [&](std::vector<std::string> const &t, std::size_t i) {
    int v = 0;
    if (i >= t.size() || !to_int(t[i], v)) throw ParseError(lineno, "'" + t[0] + "' needs an integer");
    return v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto t = tokens(line);
    if (t.empty()) continue;
    auto const &k = t[0];
    auto arity = [&](std::size_t n) {
      if (t.size() != n + 1) throw ParseError(lineno, "'" + k + "' takes " + std::to_string(n) + " value(s)");
    };
    if (k == "width") { arity(1); a.width = num(t, 1); }
    else if (k == "height") { arity(1); a.height = num(t, 1); }
    else if (k == "slr_width") { arity(1); a.slr_width = num(t, 1); }
    else if (k == "slr_height") { arity(1); a.slr_height = num(t, 1); }
    else if (k == "slr_grid") { arity(2); a.slr_cols = integer(t, 1); a.slr_rows = integer(t, 2); }
    else if (k == "ref") { arity(2); a.ref = {num(t, 1), num(t, 2)}; }
    else if (k == "cr_grid") { arity(2); a.clock.cols = integer(t, 1); a.clock.rows = integer(t, 2); }
    else if (k == "cr_max_clocks") { arity(1); a.clock.max_clocks_per_cr = integer(t, 1); }
    else if (k == "hc_max_clocks") { arity(1); a.clock.max_clocks_per_hc = integer(t, 1); }
    else if (k == "hc_columns") { arity(1); a.clock.hc_columns = integer(t, 1); }
    else if (k == "bins") { arity(2); a.bins_x = integer(t, 1); a.bins_y = integer(t, 2); }
    else if (k == "site_size") { arity(2); a.site_width = num(t, 1); a.site_height = num(t, 2); }
    else if (k == "columns") { arity(1); a.column_pattern = t[1]; }
    else if (k == "site") {
      if (t.size() < 2 || t[1].size() != 1) throw ParseError(lineno, "site needs a one-character code");
      ResourceVector cap{};
      for (std::size_t i = 2; i < t.size(); ++i) {
        auto eq = t[i].find('=');
        Resource r;
        double v = 0;
        if (eq == std::string::npos || !parse_resource(t[i].substr(0, eq), r) || !to_double(t[i].substr(eq + 1), v))
          throw ParseError(lineno, "bad capacity '" + t[i] + "' (want RESOURCE=amount)");
        cap[index(r)] = v;
      }
      if (a.site_types.count(t[1][0])) throw ParseError(lineno, "duplicate site type " + t[1]);
      a.site_types[t[1][0]] = cap;
    } else {
      throw ParseError(lineno, "unknown key '" + k + "'");
    }
  }
  return a;
}

ArchConfig parse_arch_file(std::string const &path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path);
  return parse_arch(in);
}

void write_arch(ArchConfig const &a, std::ostream &out) {
  out << "# leaps architecture v1\n";
  if (a.width) out << "width " << fmt17(*a.width) << '\n';
  if (a.height) out << "height " << fmt17(*a.height) << '\n';
  if (a.slr_width) out << "slr_width " << fmt17(*a.slr_width) << '\n';
  if (a.slr_height) out << "slr_height " << fmt17(*a.slr_height) << '\n';
  out << "slr_grid " << a.slr_cols << ' ' << a.slr_rows << '\n';
  out << "ref " << fmt17(a.ref.x) << ' ' << fmt17(a.ref.y) << '\n';
  out << "cr_grid " << a.clock.cols << ' ' << a.clock.rows << '\n';
  out << "cr_max_clocks " << a.clock.max_clocks_per_cr << '\n';
  out << "hc_max_clocks " << a.clock.max_clocks_per_hc << '\n';
  out << "hc_columns " << a.clock.hc_columns << '\n';
  out << "bins " << a.bins_x << ' ' << a.bins_y << '\n';
  out << "site_size " << fmt17(a.site_width) << ' ' << fmt17(a.site_height) << '\n';
  if (!a.column_pattern.empty()) out << "columns " << a.column_pattern << '\n';
  auto const types = a.site_types.empty() ? ArchConfig::default_site_types() : a.site_types;
  for (auto const &[code, cap] : types) {
    out << "site " << code;
    for (std::size_t r = 0; r < kNumResources; ++r)
      if (cap[r] != 0.0) out << ' ' << kResourceNames[r] << '=' << fmt17(cap[r]);
    out << '\n';
  }
}

// ---------------------------------------------------------------- placement

void write_placement(PlacementFile const &p, SlrTopology const &topo, std::ostream &out) {
  out << "# leaps placement v1\n";
  out << "# design " << p.design << '\n';
  out << "# config " << p.config_hash << '\n';
  out << "# instances " << p.placement.size() << '\n';
  for (std::size_t i = 0; i < p.placement.size(); ++i) {
    auto const z = slr_index_clamped(p.placement.x[i], p.placement.y[i], topo);
    out << i << ' ' << fmt17(p.placement.x[i]) << ' ' << fmt17(p.placement.y[i]) << ' ' << z.zx << ' ' << z.zy << ' ';
    if (p.site.empty() || p.site[i] < 0)
      out << '-';
    else
      out << p.site[i];
    out << '\n';
  }
}

PlacementFile parse_placement(std::istream &in, std::size_t expected_instances) {
  PlacementFile p;
  p.placement.x.assign(expected_instances, 0.0);
  p.placement.y.assign(expected_instances, 0.0);
  p.site.assign(expected_instances, -1);
  std::vector<char> seen(expected_instances, 0);
  std::string line;
  std::size_t lineno = 0;
  bool any_site = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.rfind("# design ", 0) == 0) p.design = line.substr(9);
    if (line.rfind("# config ", 0) == 0) p.config_hash = line.substr(9);
    auto t = tokens(line);
    if (t.empty()) continue;
    if (t.size() != 6) throw ParseError(lineno, "expected: id x y slr_zx slr_zy slice_id");
    int id = 0, zx = 0, zy = 0;
    double x = 0, y = 0;
    if (!to_int(t[0], id) || id < 0 || static_cast<std::size_t>(id) >= expected_instances)
      throw ParseError(lineno, "bad instance id '" + t[0] + "'");
    if (!to_double(t[1], x) || !to_double(t[2], y)) throw ParseError(lineno, "bad coordinate");
    if (!to_int(t[3], zx) || !to_int(t[4], zy)) throw ParseError(lineno, "bad SLR index");
    if (seen[static_cast<std::size_t>(id)]++) throw ParseError(lineno, "duplicate instance id " + t[0]);
    p.placement.x[static_cast<std::size_t>(id)] = x;
    p.placement.y[static_cast<std::size_t>(id)] = y;
    if (t[5] != "-") {
      int s = 0;
      if (!to_int(t[5], s) || s < 0) throw ParseError(lineno, "bad slice id '" + t[5] + "'");
      p.site[static_cast<std::size_t>(id)] = s;
      any_site = true;
    }
  }
  for (std::size_t i = 0; i < expected_instances; ++i)
    if (!seen[i]) throw ParseError(lineno, "missing instance " + std::to_string(i));
  if (!any_site) p.site.clear();
  return p;
}

PlacementFile parse_placement_file(std::string const &path, std::size_t expected_instances) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path);
  return parse_placement(in, expected_instances);
}

}  // namespace leaps
