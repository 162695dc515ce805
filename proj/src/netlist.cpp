#include "leaps/netlist.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace leaps {

double Instance::charge() const { return std::accumulate(demand.begin(), demand.end(), 0.0); }

Resource Instance::primary() const {
  std::size_t best = 0;
  for (std::size_t r = 1; r < kNumResources; ++r)
    if (demand[r] > demand[best]) best = r;
  return static_cast<Resource>(best);
}

void Netlist::finalize() {
  inst_nets.assign(instances.size(), {});
  clock_nets.clear();
  for (auto &inst : instances) inst.clocks.clear();
  for (auto const &net : nets) {
    for (auto const &p : net.pins) {
      auto &list = inst_nets[static_cast<std::size_t>(p.instance)];
      if (list.empty() || list.back() != net.id) list.push_back(net.id);
    }
    if (net.clock) clock_nets.push_back(net.id);
  }
  for (auto &list : inst_nets) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  for (int k : clock_nets) {
    for (auto const &p : nets[static_cast<std::size_t>(k)].pins) {
      auto &c = instances[static_cast<std::size_t>(p.instance)].clocks;
      if (c.empty() || c.back() != k) c.push_back(k);
    }
  }
  for (auto &inst : instances) {
    std::sort(inst.clocks.begin(), inst.clocks.end());
    inst.clocks.erase(std::unique(inst.clocks.begin(), inst.clocks.end()), inst.clocks.end());
  }
}

std::size_t Netlist::num_pins() const {
  std::size_t n = 0;
  for (auto const &net : nets) n += net.pins.size();
  return n;
}

std::vector<int> Netlist::movable() const {
  std::vector<int> out;
  for (auto const &inst : instances)
    if (!inst.fixed) out.push_back(inst.id);
  return out;
}

bool same_structure(Netlist const &a, Netlist const &b) {
  if (a.name != b.name || a.instances.size() != b.instances.size() || a.nets.size() != b.nets.size())
    return false;
  for (std::size_t i = 0; i < a.instances.size(); ++i) {
    auto const &x = a.instances[i];
    auto const &y = b.instances[i];
    if (x.id != y.id || x.name != y.name || x.demand != y.demand || x.fixed != y.fixed ||
        x.clocks != y.clocks || x.position.has_value() != y.position.has_value())
      return false;
    if (x.position && (x.position->x != y.position->x || x.position->y != y.position->y)) return false;
  }
  for (std::size_t i = 0; i < a.nets.size(); ++i) {
    auto const &x = a.nets[i];
    auto const &y = b.nets[i];
    if (x.id != y.id || x.weight != y.weight || x.clock != y.clock || x.pins != y.pins) return false;
  }
  return a.clock_nets == b.clock_nets;
}

// ---------------------------------------------------------------------------
// Text format

std::string escape_name(std::string const &raw) {
  static char const *hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : raw) {
    if (c > 0x20 && c < 0x7F && c != '%' && c != '#') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xF]);
    }
  }
  return out;
}

std::string unescape_name(std::string const &enc) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
  };
  std::string out;
  for (std::size_t i = 0; i < enc.size(); ++i) {
    if (enc[i] == '%') {
      if (i + 2 >= enc.size()) throw std::invalid_argument("truncated escape");
      int hi = nibble(enc[i + 1]);
      int lo = nibble(enc[i + 2]);
      if (hi < 0 || lo < 0) throw std::invalid_argument("bad escape");
      out.push_back(static_cast<char>(hi * 16 + lo));
      i += 2;
    } else {
      out.push_back(enc[i]);
    }
  }
  return out;
}

namespace {

std::vector<std::string> tokenize(std::string const &line) {
  std::vector<std::string> toks;
  std::istringstream is(line);
  std::string t;
  while (is >> t) toks.push_back(t);
  return toks;
}

bool parse_int(std::string const &s, long long &out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stoll(s, &pos);
  } catch (...) {
    return false;
  }
  return pos == s.size();
}

bool parse_double(std::string const &s, double &out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stod(s, &pos);
  } catch (...) {
    return false;
  }
  return pos == s.size() && std::isfinite(out);
}

std::string format_demand(ResourceVector const &d) {
  std::string out;
  for (std::size_t r = 0; r < kNumResources; ++r) {
    if (d[r] == 0.0) continue;
    if (!out.empty()) out += '+';
    out += kResourceNames[r];
    if (d[r] != 1.0) {
      std::ostringstream os;
      os << std::setprecision(17) << d[r];
      out += ':' + os.str();
    }
  }
  return out.empty() ? "NONE" : out;
}

}  // namespace

Netlist parse_netlist(std::istream &in) {
  enum class Section { None, Instances, Nets, Clocks } section = Section::None;
  Netlist n;
  std::map<int, Instance> insts;
  std::map<int, std::size_t> inst_line;
  std::map<int, std::vector<int>> declared_clocks;
  std::map<int, Net> nets;
  std::set<int> clock_ids;
  std::vector<std::pair<int, std::size_t>> pending_pins;  // (instance id, line)
  std::vector<std::pair<int, std::size_t>> pending_clocks;
  std::string line;
  std::size_t lineno = 0;
  bool saw_header = false;

  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    auto const &head = toks[0];
    if (head == "NETLIST") {
      if (toks.size() != 2) throw ParseError(lineno, "NETLIST takes exactly one name");
      n.name = unescape_name(toks[1]);
      saw_header = true;
      continue;
    }
    if (head == "INSTANCES" && toks.size() == 1) {
      section = Section::Instances;
      continue;
    }
    if (head == "NETS" && toks.size() == 1) {
      section = Section::Nets;
      continue;
    }
    if (head == "CLOCKS" && toks.size() == 1) {
      section = Section::Clocks;
      continue;
    }
    switch (section) {
      case Section::None:
        throw ParseError(lineno, "content before any section header: '" + head + "'");
      case Section::Instances: {
        if (toks.size() < 3) throw ParseError(lineno, "instance needs: id name type");
        long long id = 0;
        if (!parse_int(toks[0], id) || id < 0) throw ParseError(lineno, "bad instance id '" + toks[0] + "'");
        if (insts.count(static_cast<int>(id)))
          throw ParseError(lineno, "duplicate instance id " + std::to_string(id));
        Instance inst;
        inst.id = static_cast<int>(id);
        try {
          inst.name = unescape_name(toks[1]);
        } catch (std::exception const &e) {
          throw ParseError(lineno, std::string("bad name: ") + e.what());
        }
        // demand spec: TYPE[:amount](+TYPE[:amount])*
        std::string spec = toks[2];
        if (spec != "NONE") {
          std::size_t start = 0;
          while (start <= spec.size()) {
            auto plus = spec.find('+', start);
            auto part = spec.substr(start, plus == std::string::npos ? std::string::npos : plus - start);
            auto colon = part.find(':');
            Resource r{};
            if (!parse_resource(part.substr(0, colon), r))
              throw ParseError(lineno, "unknown resource type '" + part.substr(0, colon) + "'");
            double amount = 1.0;
            if (colon != std::string::npos && (!parse_double(part.substr(colon + 1), amount) || amount < 0))
              throw ParseError(lineno, "bad demand amount in '" + part + "'");
            inst.demand[index(r)] += amount;
            if (plus == std::string::npos) break;
            start = plus + 1;
          }
        }
        std::size_t t = 3;
        if (t < toks.size()) {
          double x = 0;
          double y = 0;
          if (parse_double(toks[t], x)) {
            if (t + 1 >= toks.size() || !parse_double(toks[t + 1], y))
              throw ParseError(lineno, "position needs both x and y");
            inst.position = Point{x, y};
            t += 2;
          }
        }
        bool has_clk = false;
        std::vector<int> clks;
        for (; t < toks.size(); ++t) {
          if (toks[t] == "FIXED") {
            inst.fixed = true;
          } else if (toks[t] == "CLK") {
            has_clk = true;
          } else if (has_clk) {
            long long k = 0;
            if (!parse_int(toks[t], k) || k < 0) throw ParseError(lineno, "bad clock id '" + toks[t] + "'");
            clks.push_back(static_cast<int>(k));
          } else {
            throw ParseError(lineno, "unexpected token '" + toks[t] + "'");
          }
        }
        if (inst.fixed && !inst.position) throw ParseError(lineno, "FIXED instance needs a position");
        if (has_clk) {
          std::sort(clks.begin(), clks.end());
          clks.erase(std::unique(clks.begin(), clks.end()), clks.end());
          declared_clocks[inst.id] = clks;
        }
        inst_line[inst.id] = lineno;
        insts.emplace(inst.id, std::move(inst));
        break;
      }
      case Section::Nets: {
        if (toks.size() < 3) throw ParseError(lineno, "net needs: id weight pin...");
        long long id = 0;
        if (!parse_int(toks[0], id) || id < 0) throw ParseError(lineno, "bad net id '" + toks[0] + "'");
        if (nets.count(static_cast<int>(id))) throw ParseError(lineno, "duplicate net id " + std::to_string(id));
        Net net;
        net.id = static_cast<int>(id);
        if (!parse_double(toks[1], net.weight) || net.weight < 0)
          throw ParseError(lineno, "bad net weight '" + toks[1] + "'");
        for (std::size_t t = 2; t < toks.size(); ++t) {
          auto const &tok = toks[t];
          auto at = tok.find('@');
          long long inst = 0;
          if (!parse_int(tok.substr(0, at), inst) || inst < 0)
            throw ParseError(lineno, "bad pin '" + tok + "'");
          Pin p;
          p.instance = static_cast<int>(inst);
          if (at != std::string::npos) {
            auto off = tok.substr(at + 1);
            auto comma = off.find(',');
            if (comma == std::string::npos || !parse_double(off.substr(0, comma), p.dx) ||
                !parse_double(off.substr(comma + 1), p.dy))
              throw ParseError(lineno, "bad pin offset '" + tok + "'");
          }
          net.pins.push_back(p);
          pending_pins.emplace_back(p.instance, lineno);
        }
        nets.emplace(net.id, std::move(net));
        break;
      }
      case Section::Clocks: {
        for (auto const &tok : toks) {
          long long k = 0;
          if (!parse_int(tok, k) || k < 0) throw ParseError(lineno, "bad clock net id '" + tok + "'");
          if (!clock_ids.insert(static_cast<int>(k)).second)
            throw ParseError(lineno, "duplicate clock net " + tok);
          pending_clocks.emplace_back(static_cast<int>(k), lineno);
        }
        break;
      }
    }
  }
  (void)saw_header;

  // Dense ids.
  int expect = 0;
  for (auto &[id, inst] : insts) {
    if (id != expect) throw ParseError(inst_line[id], "instance ids not dense: missing " + std::to_string(expect));
    ++expect;
    n.instances.push_back(std::move(inst));
  }
  for (auto const &[inst, l] : pending_pins)
    if (inst >= static_cast<int>(n.instances.size()))
      throw ParseError(l, "pin references undefined instance " + std::to_string(inst));
  expect = 0;
  for (auto &[id, net] : nets) {
    if (id != expect) throw ParseError(lineno, "net ids not dense: missing " + std::to_string(expect));
    ++expect;
    n.nets.push_back(std::move(net));
  }
  for (auto const &[k, l] : pending_clocks) {
    if (k >= static_cast<int>(n.nets.size()))
      throw ParseError(l, "clock references undefined net " + std::to_string(k));
    n.nets[static_cast<std::size_t>(k)].clock = true;
  }
  n.finalize();
  for (auto const &[id, clks] : declared_clocks) {
    if (n.instances[static_cast<std::size_t>(id)].clocks != clks)
      throw ParseError(inst_line[id], "CLK list disagrees with the clock nets on instance " + std::to_string(id));
  }
  return n;
}

Netlist parse_netlist_file(std::string const &path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path);
  return parse_netlist(in);
}

void write_netlist(Netlist const &n, std::ostream &out) {
  out << std::setprecision(17);
  out << "# leaps netlist v1\n";
  out << "NETLIST " << escape_name(n.name) << "\n";
  out << "INSTANCES\n";
  for (auto const &inst : n.instances) {
    out << inst.id << ' ' << escape_name(inst.name) << ' ' << format_demand(inst.demand);
    if (inst.position) out << ' ' << inst.position->x << ' ' << inst.position->y;
    if (inst.fixed) out << " FIXED";
    if (!inst.clocks.empty()) {
      out << " CLK";
      for (int k : inst.clocks) out << ' ' << k;
    }
    out << '\n';
  }
  out << "NETS\n";
  for (auto const &net : n.nets) {
    out << net.id << ' ' << net.weight;
    for (auto const &p : net.pins) {
      out << ' ' << p.instance;
      if (p.dx != 0.0 || p.dy != 0.0) out << '@' << p.dx << ',' << p.dy;
    }
    out << '\n';
  }
  out << "CLOCKS\n";
  for (std::size_t i = 0; i < n.clock_nets.size(); ++i) {
    out << n.clock_nets[i] << (i + 1 == n.clock_nets.size() || (i + 1) % 16 == 0 ? '\n' : ' ');
  }
}

std::string write_netlist(Netlist const &n) {
  std::ostringstream os;
  write_netlist(n, os);
  return os.str();
}

std::vector<Diagnostic> validate(Netlist const &n, FabricLayout const &layout) {
  using S = Diagnostic::Severity;
  std::vector<Diagnostic> out;
  ResourceVector demand{};
  for (auto const &inst : n.instances) {
    for (std::size_t r = 0; r < kNumResources; ++r) demand[r] += inst.demand[r];
    if (!inst.fixed && inst.charge() <= 0.0)
      out.push_back({S::Error, "movable instance " + std::to_string(inst.id) + " has no resource demand"});
    if (inst.position && !layout.bounds().contains(inst.position->x, inst.position->y) &&
        !(inst.position->x == layout.width() || inst.position->y == layout.height()))
      out.push_back({S::Error, "instance " + std::to_string(inst.id) + " positioned outside the layout"});
  }
  auto const cap = layout.total_capacity();
  for (std::size_t r = 0; r < kNumResources; ++r) {
    if (demand[r] > cap[r] + 1e-9) {
      std::ostringstream os;
      os << "capacity: " << kResourceNames[r] << " demand " << demand[r] << " exceeds capacity " << cap[r];
      out.push_back({S::Error, os.str()});
    }
  }
  for (auto const &net : n.nets) {
    if (net.pins.size() < 2)
      out.push_back({S::Warning, "net " + std::to_string(net.id) + " has fewer than 2 pins"});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic generator

Netlist generate_synthetic(GeneratorParams const &p) {
  if (p.instances < 2) throw ConfigError("instances", "need at least 2 instances");
  if (p.nets < 1) throw ConfigError("nets", "need at least 1 net");
  if (p.clocks < 0) throw ConfigError("clocks", "must be >= 0");
  if (p.mean_pins < 2.0) throw ConfigError("mean_pins", "must be >= 2");
  if (p.max_pins < 2) throw ConfigError("max_pins", "must be >= 2");
  double const fsum = p.lut_frac + p.ff_frac + p.dsp_frac + p.bram_frac;
  if (!(fsum > 0.0)) throw ConfigError("mix", "resource fractions sum to zero");

  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Netlist n;
  n.name = p.name;
  int const N = p.instances;

  // Exact type counts by largest remainder.
  std::array<double, 4> frac = {p.lut_frac / fsum, p.ff_frac / fsum, p.dsp_frac / fsum, p.bram_frac / fsum};
  std::array<Resource, 4> kinds = {Resource::LUTL, Resource::FF, Resource::DSP, Resource::BRAM};
  std::array<int, 4> counts{};
  int assigned = 0;
  for (int k = 0; k < 4; ++k) {
    counts[k] = static_cast<int>(std::floor(frac[k] * N));
    assigned += counts[k];
  }
  for (int k = 0; assigned < N; k = (k + 1) % 4) {
    if (frac[k] > 0) {
      ++counts[k];
      ++assigned;
    }
  }
  std::vector<Resource> types;
  for (int k = 0; k < 4; ++k) types.insert(types.end(), counts[k], kinds[k]);
  std::shuffle(types.begin(), types.end(), rng);

  int const sequential = counts[1] + counts[2] + counts[3];
  if (p.clocks > 0 && p.clocks * 2 > sequential)
    throw ConfigError("clocks", "more clocks than sequential instances can support (" + std::to_string(p.clocks) +
                                    " clocks, " + std::to_string(sequential) + " sequential instances)");

  // Locality clusters in a hidden unit square.
  int const nclusters = std::max(1, N / std::max(1, p.cluster_size));
  std::vector<Point> centers(static_cast<std::size_t>(nclusters));
  for (auto &c : centers) c = {unit(rng), unit(rng)};
  std::vector<int> cluster_of(static_cast<std::size_t>(N));
  std::vector<std::vector<int>> members(static_cast<std::size_t>(nclusters));
  for (int i = 0; i < N; ++i) {
    int c = i < nclusters ? i : static_cast<int>(rng() % static_cast<std::uint64_t>(nclusters));
    cluster_of[static_cast<std::size_t>(i)] = c;
    members[static_cast<std::size_t>(c)].push_back(i);
  }
  // Four nearest neighbor clusters.
  std::vector<std::vector<int>> near(static_cast<std::size_t>(nclusters));
  for (int c = 0; c < nclusters; ++c) {
    std::vector<std::pair<double, int>> d;
    for (int o = 0; o < nclusters; ++o) {
      if (o == c) continue;
      double dx = centers[c].x - centers[o].x;
      double dy = centers[c].y - centers[o].y;
      d.emplace_back(dx * dx + dy * dy, o);
    }
    std::sort(d.begin(), d.end());
    for (std::size_t k = 0; k < std::min<std::size_t>(4, d.size()); ++k) near[c].push_back(d[k].second);
  }

  n.instances.resize(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    auto &inst = n.instances[static_cast<std::size_t>(i)];
    inst.id = i;
    inst.name = "inst" + std::to_string(i);
    inst.demand[index(types[static_cast<std::size_t>(i)])] = 1.0;
  }

  // Nets: preferential-attachment driver, local sinks.
  double const p_geo = 1.0 / (p.mean_pins - 1.0);
  std::geometric_distribution<int> extra(std::min(1.0, p_geo));
  std::vector<double> degree(static_cast<std::size_t>(N), 0.0);
  std::vector<int> pool(static_cast<std::size_t>(N));
  std::iota(pool.begin(), pool.end(), 0);
  // Driver selection with probability proportional to (1 + degree): sample a
  // uniform instance or an existing pin endpoint.
  std::vector<int> endpoints;
  int const ncap = std::min(p.max_pins, N);
  for (int e = 0; e < p.nets; ++e) {
    int const deg = std::min(ncap, 2 + extra(rng));
    int driver = 0;
    if (!endpoints.empty() && unit(rng) < 0.3)
      driver = endpoints[rng() % endpoints.size()];
    else
      driver = static_cast<int>(rng() % static_cast<std::uint64_t>(N));
    Net net;
    net.id = e;
    net.pins.push_back({driver});
    std::set<int> used{driver};
    int const home = cluster_of[static_cast<std::size_t>(driver)];
    int guard = 0;
    while (static_cast<int>(net.pins.size()) < deg && guard++ < deg * 20) {
      double const u = unit(rng);
      int c = home;
      if (u > 0.97)
        c = static_cast<int>(rng() % static_cast<std::uint64_t>(nclusters));
      else if (u > 0.80 && !near[home].empty())
        c = near[home][rng() % near[home].size()];
      auto const &m = members[static_cast<std::size_t>(c)];
      int const sink = m[rng() % m.size()];
      if (used.insert(sink).second) net.pins.push_back({sink});
    }
    while (static_cast<int>(net.pins.size()) < 2) {
      int sink = static_cast<int>(rng() % static_cast<std::uint64_t>(N));
      if (used.insert(sink).second) net.pins.push_back({sink});
    }
    for (auto const &pin : net.pins) {
      degree[static_cast<std::size_t>(pin.instance)] += 1;
      endpoints.push_back(pin.instance);
    }
    n.nets.push_back(std::move(net));
  }
  // Attach isolated instances to a net of their cluster.
  for (int i = 0; i < N; ++i) {
    if (degree[static_cast<std::size_t>(i)] > 0) continue;
    auto const &m = members[static_cast<std::size_t>(cluster_of[static_cast<std::size_t>(i)])];
    int mate = m[rng() % m.size()];
    if (mate == i) mate = (i + 1) % N;
    // Find a net of the mate, else any net.
    Net *target = nullptr;
    for (auto &net : n.nets) {
      bool has_mate = false;
      for (auto const &pin : net.pins) has_mate |= pin.instance == mate;
      if (has_mate && static_cast<int>(net.pins.size()) < ncap) {
        target = &net;
        break;
      }
    }
    if (!target) target = &n.nets[rng() % n.nets.size()];
    target->pins.push_back({i});
    degree[static_cast<std::size_t>(i)] += 1;
  }

  // Clock domains: Voronoi over clusters, sequential instances join their domain clock.
  if (p.clocks > 0) {
    std::vector<Point> dom(static_cast<std::size_t>(p.clocks));
    for (auto &d : dom) d = {unit(rng), unit(rng)};
    std::vector<int> dom_of(static_cast<std::size_t>(nclusters));
    std::vector<int> dom_count(static_cast<std::size_t>(p.clocks), 0);
    auto nearest = [&](Point a) {
      int best = 0;
      double bd = 1e300;
      for (int k = 0; k < p.clocks; ++k) {
        double dx = a.x - dom[k].x;
        double dy = a.y - dom[k].y;
        double d = dx * dx + dy * dy;
        if (d < bd) {
          bd = d;
          best = k;
        }
      }
      return best;
    };
    std::vector<std::vector<int>> seq_of_dom(static_cast<std::size_t>(p.clocks));
    for (int c = 0; c < nclusters; ++c) dom_of[c] = nearest(centers[c]);
    auto rebuild = [&]() {
      for (auto &s : seq_of_dom) s.clear();
      for (int i = 0; i < N; ++i) {
        if (types[static_cast<std::size_t>(i)] == Resource::LUTL) continue;
        seq_of_dom[static_cast<std::size_t>(dom_of[cluster_of[static_cast<std::size_t>(i)]])].push_back(i);
      }
    };
    rebuild();
    // Every domain needs at least two sequential instances: give starving domains
    // a cluster from the largest domain.
    for (int round = 0; round < 4 * p.clocks; ++round) {
      int starving = -1;
      for (int k = 0; k < p.clocks; ++k)
        if (seq_of_dom[k].size() < 2) {
          starving = k;
          break;
        }
      if (starving < 0) break;
      int largest = static_cast<int>(std::max_element(seq_of_dom.begin(), seq_of_dom.end(),
                                                      [](auto const &a, auto const &b) { return a.size() < b.size(); }) -
                                     seq_of_dom.begin());
      int best_c = -1;
      double bd = 1e300;
      int donors = 0;
      for (int c = 0; c < nclusters; ++c)
        if (dom_of[c] == largest) ++donors;
      for (int c = 0; c < nclusters && donors > 1; ++c) {
        if (dom_of[c] != largest) continue;
        double dx = centers[c].x - dom[starving].x;
        double dy = centers[c].y - dom[starving].y;
        if (dx * dx + dy * dy < bd) {
          bd = dx * dx + dy * dy;
          best_c = c;
        }
      }
      if (best_c < 0) break;
      dom_of[best_c] = starving;
      rebuild();
    }
    for (int k = 0; k < p.clocks; ++k) {
      if (seq_of_dom[k].size() < 2) throw ConfigError("clocks", "cannot give every clock two sequential instances");
      Net clk;
      clk.id = static_cast<int>(n.nets.size());
      clk.clock = true;
      for (int i : seq_of_dom[k]) clk.pins.push_back({i});
      n.nets.push_back(std::move(clk));
      (void)dom_count;
    }
  }
  n.finalize();
  return n;
}

ArchConfig suggest_architecture(Netlist const &n, int slr_cols, int slr_rows, double lut_util) {
  ResourceVector demand{};
  for (auto const &inst : n.instances)
    for (std::size_t r = 0; r < kNumResources; ++r) demand[r] += inst.demand[r];
  auto const types = ArchConfig::default_site_types();
  auto const &clb = types.at('C');
  double clb_sites = std::max({demand[index(Resource::LUTL)] / clb[index(Resource::LUTL)],
                               demand[index(Resource::FF)] / clb[index(Resource::FF)],
                               demand[index(Resource::CARRY)] / clb[index(Resource::CARRY)], 1.0}) /
                     lut_util;
  double const dsp_sites = demand[index(Resource::DSP)] / lut_util;
  double const bram_sites = demand[index(Resource::BRAM)] / lut_util;
  double const total = clb_sites + dsp_sites + bram_sites;

  int height = std::max(16, static_cast<int>(std::lround(std::sqrt(total) / 8.0)) * 8);
  int const dsp_cols = dsp_sites > 0 ? static_cast<int>(std::ceil(dsp_sites / height)) : 0;
  int const bram_cols = bram_sites > 0 ? static_cast<int>(std::ceil(bram_sites / height)) : 0;
  int const clb_cols = static_cast<int>(std::ceil(clb_sites / height));
  int width = clb_cols + dsp_cols + bram_cols;
  width = std::max(10, ((width + 9) / 10) * 10);

  std::string pattern(static_cast<std::size_t>(width), 'C');
  for (int c = 1; c < width; c += 2) pattern[static_cast<std::size_t>(c)] = 'M';
  int const special = dsp_cols + bram_cols;
  for (int k = 0; k < special; ++k) {
    int col = static_cast<int>((k + 0.5) * width / special);
    pattern[static_cast<std::size_t>(col)] = k % 2 == 0 ? (k / 2 < dsp_cols ? 'D' : 'B') : (k / 2 < bram_cols ? 'B' : 'D');
  }
  // Make the D/B split exact.
  int have_d = 0;
  for (char c : pattern) have_d += c == 'D';
  for (std::size_t i = 0; i < pattern.size() && have_d != dsp_cols; ++i) {
    if (have_d > dsp_cols && pattern[i] == 'D') {
      pattern[i] = 'B';
      --have_d;
    } else if (have_d < dsp_cols && pattern[i] == 'B') {
      pattern[i] = 'D';
      ++have_d;
    }
  }

  ArchConfig cfg;
  cfg.width = width;
  cfg.height = height;
  cfg.slr_cols = slr_cols;
  cfg.slr_rows = slr_rows;
  cfg.column_pattern = pattern;
  cfg.site_types = types;
  int bins = 16;
  while (bins < std::max(width, height) && bins < 128) bins *= 2;
  cfg.bins_x = bins;
  cfg.bins_y = bins;
  return cfg;
}

}  // namespace leaps
