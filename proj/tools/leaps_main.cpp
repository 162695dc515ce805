// leaps: gen, place, check and plot subcommands.
//
// Exit codes: 0 clean, 1 check violations, 2 input errors, 3 non-convergence.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "leaps/flow.hpp"
#include "leaps/plot.hpp"

namespace {

using namespace leaps;

constexpr int kOk = 0;
constexpr int kViolations = 1;
constexpr int kInputError = 2;

struct Topology {
  int cols = 0;
  int rows = 0;
};

Topology parse_topology(std::string const &text) {
  Topology t;
  if (text.empty()) return t;
  char x = 0;
  std::istringstream is(text);
  if (!(is >> t.cols >> x >> t.rows) || x != 'x' || !is.eof() || t.cols < 1 || t.rows < 1)
    throw ConfigError("topology", "expected COLSxROWS, got '" + text + "'");
  return t;
}

struct Inputs {
  Netlist netlist;
  FabricLayout layout;
};

Inputs load(std::string const &netlist_path, std::string const &arch_path, Topology topo) {
  Inputs in{parse_netlist_file(netlist_path), {}};
  in.layout = build_layout(apply_topology(parse_arch_file(arch_path), topo.cols, topo.rows));
  return in;
}

bool report_diagnostics(Netlist const &n, FabricLayout const &layout) {
  bool ok = true;
  for (auto const &d : validate(n, layout)) {
    bool const err = d.severity == Diagnostic::Severity::Error;
    std::cerr << (err ? "error: " : "warning: ") << d.message << '\n';
    ok = ok && !err;
  }
  return ok;
}

std::string placement_text(PlacementFile const &p, SlrTopology const &topo) {
  std::ostringstream o;
  write_placement(p, topo, o);
  return o.str();
}

// ---------------------------------------------------------------------- gen

struct GenOptions {
  std::uint64_t seed = 1;
  int instances = 3000;
  int nets = 0;
  int clocks = 8;
  double mean_pins = 3.5;
  int cluster_size = 40;
  double lut_util = 0.7;
  std::string topology = "1x4";
  std::string name = "synthetic";
  std::string suite;
  std::string out = ".";
};

void write_design(GeneratorParams const &p, Topology topo, double lut_util, std::string const &dir) {
  Netlist const n = generate_synthetic(p);
  ArchConfig const arch = suggest_architecture(n, topo.cols, topo.rows, lut_util);
  build_layout(arch);
  std::ostringstream a;
  write_arch(arch, a);
  write_text_file(dir + "/" + p.name + ".netlist", write_netlist(n));
  write_text_file(dir + "/" + p.name + ".arch", a.str());
  std::cout << dir << "/" << p.name << ".netlist (" << n.instances.size() << " instances, " << n.nets.size()
            << " nets, " << n.clock_nets.size() << " clocks)\n";
}

int cmd_gen(GenOptions const &o) {
  Topology const topo = parse_topology(o.topology);
  if (!o.suite.empty()) {
    if (o.suite != "small20") throw ConfigError("suite", "unknown preset '" + o.suite + "' (small20)");
    for (auto const &p : suite_small20()) write_design(p, topo, o.lut_util, o.out);
    return kOk;
  }
  GeneratorParams p;
  p.instances = o.instances;
  p.nets = o.nets > 0 ? o.nets : o.instances + o.instances / 10;
  p.clocks = o.clocks;
  p.mean_pins = o.mean_pins;
  p.cluster_size = o.cluster_size;
  p.seed = o.seed;
  p.name = o.name;
  write_design(p, topo, o.lut_util, o.out);
  return kOk;
}

// -------------------------------------------------------------------- place

struct PlaceOptions {
  std::string netlist;
  std::string arch;
  std::string out = "out";
  std::string topology;
  std::string stages = "gp,cnp,lg,dp";
  std::uint64_t seed = 0;
  bool no_wlw = false;
  bool plots = false;
  int threads = 1;
  int max_iterations = 0;
  double psi0 = -1.0;
  double t_psi = -1.0;
  int wlw_period = 0;
  bool psi_free = false;
  double cnp_alpha = -1.0;
};

int cmd_place(PlaceOptions const &o) {
  Topology const topo = parse_topology(o.topology);
  RunConfig cfg;
  cfg.netlist_path = o.netlist;
  cfg.arch_path = o.arch;
  cfg.out_dir = o.out;
  cfg.topology_cols = topo.cols;
  cfg.topology_rows = topo.rows;
  cfg.seed = o.seed;
  cfg.stages = parse_stages(o.stages);
  cfg.threads = o.threads;
  cfg.gp.wlw = !o.no_wlw;
  if (o.max_iterations > 0) cfg.gp.max_iterations = o.max_iterations;
  if (o.psi0 >= 0.0) cfg.gp.psi0 = o.psi0;
  if (o.t_psi >= 0.0) cfg.gp.t_psi = o.t_psi;
  if (o.wlw_period > 0) cfg.gp.wlw_period = o.wlw_period;
  if (o.psi_free) cfg.gp.psi_floor = false;
  if (o.cnp_alpha >= 0.0) cfg.gp.cnp_config.alpha = o.cnp_alpha;
  if (cfg.threads < 1) throw ConfigError("threads", "must be >= 1");

  Inputs in = load(o.netlist, o.arch, topo);
  if (!report_diagnostics(in.netlist, in.layout)) return kInputError;

  FlowResult r = run_flow(in.netlist, in.layout, cfg);
  auto const &topology = in.layout.topology();
  std::string const dir = o.out + "/";
  write_text_file(dir + "placement.txt", placement_text(r.placement, topology));
  write_text_file(dir + "report.json", metrics_json(r.report));
  write_text_file(dir + "timing.json", timing_json(r.report.timing));
  std::ostringstream log;
  write_gp_report_jsonl(r.gp, log);
  write_text_file(dir + "gp.jsonl", log.str());
  if (!r.mapping.empty()) write_text_file(dir + "mapping.json", mapping_json(r.mapping, in.layout));
  if (cfg.stages.lg) write_text_file(dir + "lg_audit.json", audit_json(r.legal.audit));
  if (o.plots) {
    write_text_file(dir + "placement.svg", placement_svg(r.placement.placement, in.netlist, in.layout));
    write_text_file(dir + "density.svg", density_svg(r.placement.placement, in.netlist, in.layout));
    std::vector<double> psi;
    for (auto const &rec : r.gp.records) psi.push_back(rec.psi);
    write_text_file(dir + "trace.svg", trace_svg({{"overflow", r.report.overflow_trace}, {"psi", psi}}, "convergence"));
  }

  std::printf("%s: hpwl %.6g sll %d overlaps %zu clock violations %zu%s\n", in.netlist.name.c_str(), r.report.hpwl,
              r.report.sll, r.report.overlaps, r.report.clock_violations.size(),
              r.report.converged ? "" : (" (not converged: " + r.report.reason + ")").c_str());
  return r.exit_code;
}

// -------------------------------------------------------------------- check

struct CheckOptions {
  std::string placement;
  std::string netlist;
  std::string arch;
  std::string topology;
  std::string out;
};

int cmd_check(CheckOptions const &o) {
  Inputs in = load(o.netlist, o.arch, parse_topology(o.topology));
  PlacementFile const p = parse_placement_file(o.placement, in.netlist.instances.size());
  CheckResult const c = check_placement(p, in.netlist, in.layout);
  if (!o.out.empty()) write_text_file(o.out, check_json(c));
  for (auto const &i : c.issues) std::cout << i.kind << ": " << i.message << '\n';
  std::printf("hpwl %s sll %d violations %zu\n", fmt17(c.hpwl).c_str(), c.sll, c.issues.size());
  return c.clean() ? kOk : kViolations;
}

// --------------------------------------------------------------------- plot

struct PlotOptions {
  std::string report;
  std::string log;
  std::string placement;
  std::string netlist;
  std::string arch;
  std::string topology;
  std::string out = ".";
};

std::vector<TraceSeries> log_series(std::string const &path) {
  std::istringstream in(read_text_file(path));
  TraceSeries overflow{"overflow", {}}, psi{"psi", {}}, hpwl{"hpwl", {}};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      auto const j = nlohmann::json::parse(line);
      overflow.values.push_back(j.at("overflow").get<double>());
      psi.values.push_back(j.at("psi").get<double>());
      hpwl.values.push_back(j.at("hpwl").get<double>());
    } catch (nlohmann::json::exception const &e) {
      throw ParseError(lineno, e.what());
    }
  }
  return {overflow, psi, hpwl};
}

int cmd_plot(PlotOptions const &o) {
  bool any = false;
  std::string const dir = o.out + "/";
  if (!o.report.empty()) {
    MetricsReport const r = parse_metrics_json(read_text_file(o.report));
    write_text_file(dir + "report_trace.svg", trace_svg({{"overflow", r.overflow_trace}}, r.design + " overflow"));
    any = true;
  }
  if (!o.log.empty()) {
    write_text_file(dir + "gp_trace.svg", trace_svg(log_series(o.log), "global placement"));
    any = true;
  }
  if (!o.placement.empty()) {
    if (o.netlist.empty() || o.arch.empty()) throw ConfigError("placement", "needs --netlist and --arch");
    Inputs in = load(o.netlist, o.arch, parse_topology(o.topology));
    PlacementFile const p = parse_placement_file(o.placement, in.netlist.instances.size());
    write_text_file(dir + "placement.svg", placement_svg(p.placement, in.netlist, in.layout));
    write_text_file(dir + "density.svg", density_svg(p.placement, in.netlist, in.layout));
    any = true;
  }
  if (!any) throw ConfigError("plot", "nothing to plot (give --report, --log or --placement)");
  return kOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"multi-die FPGA placer"};
  app.require_subcommand(1);

  GenOptions gen;
  auto *g = app.add_subcommand("gen", "generate a synthetic netlist and architecture");
  g->add_option("--seed", gen.seed)->envname("LEAPS_SEED");
  g->add_option("--instances", gen.instances);
  g->add_option("--nets", gen.nets, "default: 1.1 x instances");
  g->add_option("--clocks", gen.clocks);
  g->add_option("--mean-pins", gen.mean_pins);
  g->add_option("--cluster-size", gen.cluster_size);
  g->add_option("--lut-util", gen.lut_util);
  g->add_option("--topology", gen.topology, "SLR grid COLSxROWS")->envname("LEAPS_TOPOLOGY");
  g->add_option("--name", gen.name);
  g->add_option("--suite", gen.suite, "preset: small20");
  g->add_option("--out", gen.out)->envname("LEAPS_OUT");

  PlaceOptions place;
  auto *p = app.add_subcommand("place", "run the placement flow");
  p->add_option("--netlist", place.netlist)->required();
  p->add_option("--arch", place.arch)->required();
  p->add_option("--out", place.out)->envname("LEAPS_OUT");
  p->add_option("--seed", place.seed)->required()->envname("LEAPS_SEED");
  p->add_option("--stages", place.stages, "comma list of gp,cnp,lg,dp");
  p->add_flag("--no-wlw", place.no_wlw, "hold the SLL weight at its initial value");
  p->add_option("--threads", place.threads)->envname("LEAPS_THREADS");
  p->add_option("--topology", place.topology, "override the SLR grid, COLSxROWS")->envname("LEAPS_TOPOLOGY");
  p->add_option("--max-iterations", place.max_iterations);
  p->add_option("--psi0", place.psi0, "initial SLL weight");
  p->add_option("--t-psi", place.t_psi, "SLL weight step size");
  p->add_option("--wlw-period", place.wlw_period, "iterations between SLL weight updates");
  p->add_flag("--psi-free", place.psi_free, "let the SLL weight fall below its initial value");
  p->add_option("--cnp-alpha", place.cnp_alpha, "SLL weight in clock network planning");
  p->add_flag("--plots", place.plots, "also write SVG plots");

  CheckOptions check;
  auto *c = app.add_subcommand("check", "verify a placement from scratch");
  c->add_option("--placement", check.placement)->required();
  c->add_option("--netlist", check.netlist)->required();
  c->add_option("--arch", check.arch)->required();
  c->add_option("--topology", check.topology)->envname("LEAPS_TOPOLOGY");
  c->add_option("--out", check.out, "write the violations report here");

  PlotOptions plot;
  auto *pl = app.add_subcommand("plot", "render SVG plots");
  pl->add_option("--report", plot.report);
  pl->add_option("--log", plot.log, "per-iteration JSON-lines log");
  pl->add_option("--placement", plot.placement);
  pl->add_option("--netlist", plot.netlist);
  pl->add_option("--arch", plot.arch);
  pl->add_option("--topology", plot.topology)->envname("LEAPS_TOPOLOGY");
  pl->add_option("--out", plot.out)->envname("LEAPS_OUT");

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const &e) {
    int const code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*p) return cmd_place(place);
    if (*c) return cmd_check(check);
    if (*pl) return cmd_plot(plot);
  } catch (std::exception const &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
