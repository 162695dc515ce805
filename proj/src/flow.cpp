#include "leaps/flow.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "leaps/sll.hpp"

namespace leaps {

using ojson = nlohmann::ordered_json;

namespace {

constexpr int kReportSchema = 1;

std::string topo_string(SlrTopology const &t) { return std::to_string(t.cols) + "x" + std::to_string(t.rows); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

char const *kind_name(ClockViolation::Kind k) { return k == ClockViolation::Kind::Region ? "region" : "half_column"; }

ojson violation_json(ClockViolation const &v) {
  return ojson{{"kind", kind_name(v.kind)}, {"id", v.id}, {"count", v.count}, {"limit", v.limit}};
}

}  // namespace

// ------------------------------------------------------------------- stages

StageSet parse_stages(std::string const &text) {
  StageSet s{false, false, false, false};
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "gp") s.gp = true;
    else if (item == "cnp") s.cnp = true;
    else if (item == "lg") s.lg = true;
    else if (item == "dp") s.dp = true;
    else if (!item.empty()) throw ConfigError("stages", "unknown stage '" + item + "' (gp, cnp, lg, dp)");
  }
  if (!s.any()) throw ConfigError("stages", "no stage selected");
  if (s.cnp && !s.gp) throw ConfigError("stages", "cnp runs inside gp");
  if (s.dp && !s.lg) throw ConfigError("stages", "dp needs lg");
  return s;
}

std::string stage_string(StageSet s) {
  std::string out;
  auto add = [&](bool on, char const *name) {
    if (!on) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  add(s.gp, "gp");
  add(s.cnp, "cnp");
  add(s.lg, "lg");
  add(s.dp, "dp");
  return out;
}

GpConfig RunConfig::effective_gp() const {
  GpConfig g = gp;
  g.seed = seed;
  g.cnp = stages.cnp;
  g.density.threads = threads;
  return g;
}

std::string RunConfig::canonical() const {
  std::ostringstream o;
  auto kv = [&](char const *k, auto v) {
    o << k << ' ';
    if constexpr (std::is_floating_point_v<decltype(v)>)
      o << fmt17(v);
    else
      o << v;
    o << '\n';
  };
  GpConfig const g = effective_gp();
  kv("seed", seed);
  kv("stages", stage_string(stages));
  kv("topology", std::to_string(topology_cols) + "x" + std::to_string(topology_rows));
  kv("gp.max_iterations", g.max_iterations);
  kv("gp.target_overflow", g.target_overflow);
  kv("gp.band_lo", g.band_lo);
  kv("gp.band_hi", g.band_hi);
  kv("gp.wlw", g.wlw);
  kv("gp.psi0", g.psi0);
  kv("gp.t_psi", g.t_psi);
  kv("gp.wlw_period", g.wlw_period);
  kv("gp.psi_floor", g.psi_floor);
  kv("gp.sll_scale", g.sll_scale);
  kv("gp.eta_w", g.eta_w);
  kv("gp.lambda_base", g.lambda_base);
  kv("gp.lambda_max_step", g.lambda_max_step);
  kv("gp.quad_weight", g.quad_weight);
  kv("gp.gamma_s_lo", g.gamma_s_lo);
  kv("gp.gamma_s_hi", g.gamma_s_hi);
  kv("gp.inflation", g.inflation);
  kv("gp.kappa", g.kappa);
  kv("gp.cnp_rounds", g.cnp_rounds);
  kv("gp.iterations_per_round", g.iterations_per_round);
  kv("gp.outside_target", g.outside_target);
  kv("gp.eta_growth", g.eta_growth);
  kv("gp.jitter", g.jitter);
  kv("gp.armijo", g.armijo);
  kv("gp.clock.iota", g.clock.iota);
  kv("gp.clock.epsilon", g.clock.epsilon);
  kv("gp.density.fillers", g.density.fillers);
  kv("gp.density.stretch", g.density.stretch);
  auto const &c = g.cnp_config;
  kv("cnp.alpha", c.alpha);
  kv("cnp.signed_delta", c.signed_delta);
  kv("cnp.max_fanout", c.max_fanout);
  kv("cnp.node_limit", c.node_limit);
  kv("cnp.time_limit_s", c.time_limit_s);
  kv("cnp.tile_fraction", c.tile_fraction);
  kv("cnp.max_cluster", c.max_cluster);
  kv("cnp.capacity_factor", c.capacity_factor);
  kv("cnp.mode", static_cast<int>(c.mode));
  kv("lg.phi_w", lgdp.phi_w);
  kv("lg.alpha_lg", lgdp.alpha_lg);
  kv("lg.window", lgdp.window);
  kv("dp.passes", lgdp.dp_passes);
  kv("dp.min_gain", lgdp.dp_min_gain);
  kv("dp.set_size", lgdp.set_size);
  kv("dp.set_radius", lgdp.set_radius);
  kv("dp.empty_slots", lgdp.empty_slots);
  kv("lg.mode", static_cast<int>(lgdp.mode));
  return o.str();
}

ArchConfig apply_topology(ArchConfig arch, int cols, int rows) {
  if (cols <= 0 && rows <= 0) return arch;
  if (cols <= 0 || rows <= 0) throw ConfigError("topology", "give both columns and rows");
  double const w = arch.width ? *arch.width : arch.slr_width.value_or(0.0) * arch.slr_cols;
  double const h = arch.height ? *arch.height : arch.slr_height.value_or(0.0) * arch.slr_rows;
  arch.width = w;
  arch.height = h;
  arch.slr_width.reset();
  arch.slr_height.reset();
  arch.slr_cols = cols;
  arch.slr_rows = rows;
  return arch;
}

// -------------------------------------------------------------------- check

CheckResult check_placement(PlacementFile const &p, Netlist const &n, FabricLayout const &layout) {
  CheckResult c;
  std::size_t const count = n.instances.size();
  auto const &pl = p.placement;
  if (pl.size() != count) {
    c.issues.push_back({"bounds", "placement has " + std::to_string(pl.size()) + " instances, netlist has " +
                                      std::to_string(count)});
    return c;
  }
  std::vector<int> site(count, -1);
  bool placeable = true;
  for (std::size_t i = 0; i < count; ++i) {
    double const x = pl.x[i], y = pl.y[i];
    auto const &inst = n.instances[i];
    if (!(x >= 0.0 && x <= layout.width() && y >= 0.0 && y <= layout.height())) {
      c.issues.push_back({"bounds", inst.name + " at (" + fmt17(x) + ", " + fmt17(y) + ") is outside the layout"});
      placeable = false;
      continue;
    }
    if (inst.fixed && inst.position && (inst.position->x != x || inst.position->y != y))
      c.issues.push_back({"fixed", inst.name + " is fixed but was moved"});
    if (p.site.empty() || p.site[i] < 0) {
      site[i] = layout.site_near(x, y).id;
      continue;
    }
    int const s = p.site[i];
    if (static_cast<std::size_t>(s) >= layout.sites().size()) {
      c.issues.push_back({"site", inst.name + " names slice " + std::to_string(s) + " beyond the lattice"});
      placeable = false;
      continue;
    }
    site[i] = s;
    auto const ctr = layout.sites()[static_cast<std::size_t>(s)].center;
    if (!inst.fixed && (std::abs(ctr.x - x) > 1e-9 || std::abs(ctr.y - y) > 1e-9))
      c.issues.push_back({"site", inst.name + " is not at the centre of slice " + std::to_string(s)});
  }
  if (!placeable) return c;

  auto const &topo = layout.topology();
  c.hpwl = hpwl(pl, n);
  c.sll = total_sll(pl, n, topo, false);
  c.overlaps = check_overlap(site, n, layout);
  for (auto const &o : c.overlaps)
    c.issues.push_back({"overlap", "slice " + std::to_string(o.site) + " " + std::string(resource_name(o.resource)) +
                                       " uses " + fmt17(o.used) + " of " + fmt17(o.capacity)});
  c.clock = check_constraints(clock_usage(pl, n, layout), layout);
  for (auto const &v : c.clock) c.issues.push_back({"clock", v.describe()});
  return c;
}

std::string check_json(CheckResult const &c) {
  ojson j;
  j["schema"] = kReportSchema;
  j["clean"] = c.clean();
  j["hpwl"] = c.hpwl;
  j["sll"] = c.sll;
  j["overlaps"] = c.overlaps.size();
  auto clocks = ojson::array();
  for (auto const &v : c.clock) clocks.push_back(violation_json(v));
  j["clock_violations"] = clocks;
  auto issues = ojson::array();
  for (auto const &i : c.issues) issues.push_back(ojson{{"kind", i.kind}, {"message", i.message}});
  j["issues"] = issues;
  return j.dump(2) + "\n";
}

std::string mapping_json(ClockMapping const &m, FabricLayout const &layout) {
  ojson j;
  j["schema"] = kReportSchema;
  auto regions = ojson::array();
  for (auto const &r : layout.regions())
    regions.push_back(ojson{{"id", r.id}, {"col", r.col}, {"row", r.row}, {"slr", {r.slr.zx, r.slr.zy}}});
  j["regions"] = regions;
  j["assignment"] = m.region;
  return j.dump(2) + "\n";
}

std::string audit_json(std::vector<LgRejection> const &audit) {
  auto a = ojson::array();
  for (auto const &r : audit) a.push_back(ojson{{"cell", r.cell}, {"site", r.site}, {"reason", r.reason}});
  ojson j;
  j["schema"] = kReportSchema;
  j["rejections"] = a;
  return j.dump(2) + "\n";
}

std::vector<GeneratorParams> suite_small20() {
  std::vector<GeneratorParams> out;
  for (int i = 0; i < 20; ++i) {
    GeneratorParams p;
    p.instances = 2000 + 300 * i;
    p.nets = p.instances + p.instances / 10;
    p.clocks = i % 4 == 3 ? 28 + 2 * (i / 4) : 8 + (i % 4) * 4;
    p.seed = 1000 + static_cast<std::uint64_t>(i);
    char name[16];
    std::snprintf(name, sizeof name, "s20_%02d", i);
    p.name = name;
    out.push_back(p);
  }
  return out;
}

// ------------------------------------------------------------------ reports

std::string metrics_json(MetricsReport const &r) {
  ojson j;
  j["schema"] = kReportSchema;
  j["design"] = r.design;
  j["seed"] = r.seed;
  j["config_hash"] = r.config_hash;
  j["topology"] = r.topology;
  j["stages"] = r.stages;
  j["instances"] = r.instances;
  j["hpwl"] = r.hpwl;
  j["sll"] = r.sll;
  auto st = ojson::array();
  for (auto const &s : r.per_stage)
    st.push_back(ojson{{"stage", s.stage},
                       {"hpwl", s.hpwl},
                       {"sll", s.sll},
                       {"delta_hpwl", s.delta_hpwl},
                       {"delta_sll", s.delta_sll}});
  j["per_stage"] = st;
  auto cv = ojson::array();
  for (auto const &v : r.clock_violations) cv.push_back(violation_json(v));
  j["clock_violations"] = cv;
  j["overlaps"] = r.overlaps;
  j["overflow_trace"] = r.overflow_trace;
  j["final_overflow"] = r.final_overflow;
  j["converged"] = r.converged;
  j["reason"] = r.reason;
  j["warnings"] = r.warnings;
  j["gp"] = ojson{{"iterations", r.gp_iterations}, {"cnp_rounds", r.cnp_rounds}, {"outside_fraction", r.outside_fraction}};
  j["lg"] = ojson{{"displacement", r.lg_displacement}, {"rejections", r.lg_rejections}};
  j["dp"] = ojson{{"passes", r.dp_passes}, {"improved_sets", r.dp_improved_sets}};
  return j.dump(2) + "\n";
}

MetricsReport parse_metrics_json(std::string const &text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (nlohmann::json::parse_error const &e) {
    throw ParseError(0, std::string("report: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(0, "report: not a JSON object");
  MetricsReport r;
  try {
    if (j.value("schema", 0) != kReportSchema) throw ParseError(0, "report: unsupported schema");
    r.design = j.value("design", std::string());
    r.seed = j.value("seed", std::uint64_t{0});
    r.config_hash = j.value("config_hash", std::string());
    r.topology = j.value("topology", std::string());
    r.stages = j.value("stages", std::string());
    r.instances = j.value("instances", std::size_t{0});
    r.hpwl = j.value("hpwl", 0.0);
    r.sll = j.value("sll", 0);
    if (j.contains("per_stage"))
      for (auto const &s : j["per_stage"])
        r.per_stage.push_back({s.at("stage").get<std::string>(), s.at("hpwl").get<double>(), s.at("sll").get<int>(),
                               s.at("delta_hpwl").get<double>(), s.at("delta_sll").get<int>()});
    if (j.contains("clock_violations"))
      for (auto const &v : j["clock_violations"]) {
        ClockViolation cv;
        cv.kind = v.at("kind").get<std::string>() == "region" ? ClockViolation::Kind::Region
                                                               : ClockViolation::Kind::HalfColumn;
        cv.id = v.at("id").get<int>();
        cv.count = v.at("count").get<int>();
        cv.limit = v.at("limit").get<int>();
        r.clock_violations.push_back(cv);
      }
    r.overlaps = j.value("overlaps", std::size_t{0});
    if (j.contains("overflow_trace")) r.overflow_trace = j["overflow_trace"].get<std::vector<double>>();
    r.final_overflow = j.value("final_overflow", 0.0);
    r.converged = j.value("converged", true);
    r.reason = j.value("reason", std::string());
    if (j.contains("warnings")) r.warnings = j["warnings"].get<std::vector<std::string>>();
    if (j.contains("gp")) {
      r.gp_iterations = j["gp"].value("iterations", 0);
      r.cnp_rounds = j["gp"].value("cnp_rounds", 0);
      r.outside_fraction = j["gp"].value("outside_fraction", 0.0);
    }
    if (j.contains("lg")) {
      r.lg_displacement = j["lg"].value("displacement", 0.0);
      r.lg_rejections = j["lg"].value("rejections", std::size_t{0});
    }
    if (j.contains("dp")) {
      r.dp_passes = j["dp"].value("passes", 0);
      r.dp_improved_sets = j["dp"].value("improved_sets", 0);
    }
  } catch (nlohmann::json::exception const &e) {
    throw ParseError(0, std::string("report: ") + e.what());
  }
  return r;
}

std::string timing_json(std::vector<StageTiming> const &t) {
  ojson j = ojson::object();
  double total = 0.0;
  for (auto const &s : t) {
    j[s.stage] = s.seconds;
    total += s.seconds;
  }
  j["total"] = total;
  return j.dump(2) + "\n";
}

// --------------------------------------------------------------------- flow

FlowResult run_flow(Netlist const &n, FabricLayout const &layout, RunConfig const &config) {
  if (!config.stages.any()) throw ConfigError("stages", "no stage selected");
  if (config.stages.dp && !config.stages.lg) throw ConfigError("stages", "dp needs lg");
  if (config.stages.cnp && !config.stages.gp) throw ConfigError("stages", "cnp runs inside gp");

  FlowResult r;
  auto &rep = r.report;
  auto const &topo = layout.topology();
  rep.design = n.name;
  rep.seed = config.seed;
  rep.config_hash = config.hash();
  rep.topology = topo_string(topo);
  rep.stages = stage_string(config.stages);
  rep.instances = n.instances.size();

  auto record = [&](char const *stage, PlacementState const &s) {
    StageMetrics m{stage, hpwl(s, n), total_sll(s, n, topo, false), 0.0, 0};
    if (!rep.per_stage.empty()) {
      m.delta_hpwl = m.hpwl - rep.per_stage.back().hpwl;
      m.delta_sll = m.sll - rep.per_stage.back().sll;
    }
    rep.per_stage.push_back(m);
  };

  PlacementState current;
  if (config.stages.gp) {
    auto t0 = std::chrono::steady_clock::now();
    GpResult g = run_global_placement(n, layout, config.effective_gp());
    rep.timing.push_back({"gp", seconds_since(t0)});
    current = std::move(g.placement);
    r.mapping = std::move(g.mapping);
    r.gp = std::move(g.report);
    for (auto const &rec : r.gp.records) rep.overflow_trace.push_back(rec.overflow);
    rep.final_overflow = r.gp.records.empty() ? 0.0 : r.gp.records.back().overflow;
    rep.converged = r.gp.converged;
    rep.reason = r.gp.reason;
    rep.gp_iterations = static_cast<int>(r.gp.records.size());
    rep.cnp_rounds = r.gp.cnp_rounds;
    rep.outside_fraction = r.gp.outside_fraction;
    rep.warnings = r.gp.warnings;
    record("gp", current);
  } else {
    current = initial_state(n, layout);
    rep.reason = "gp disabled";
    record("initial", current);
  }

  std::vector<int> site;
  if (config.stages.lg) {
    auto t0 = std::chrono::steady_clock::now();
    r.legal = legalize(current, r.mapping, layout, n, config.lgdp);
    rep.timing.push_back({"lg", seconds_since(t0)});
    rep.lg_displacement = r.legal.displacement;
    rep.lg_rejections = r.legal.audit.size();
    if (!r.legal.feasible) {
      rep.converged = false;
      rep.reason = "legalization failed: " + r.legal.failure;
      rep.warnings.push_back(rep.reason);
    } else {
      record("lg", r.legal.placement);
      if (config.stages.dp) {
        t0 = std::chrono::steady_clock::now();
        r.legal = detailed_place(r.legal, r.mapping, n, layout, config.lgdp, &r.dp);
        rep.timing.push_back({"dp", seconds_since(t0)});
        rep.dp_passes = r.dp.passes;
        rep.dp_improved_sets = r.dp.improved_sets;
        record("dp", r.legal.placement);
      }
      current = r.legal.placement;
      site = r.legal.site;
    }
  }

  r.placement.design = n.name;
  r.placement.config_hash = rep.config_hash;
  r.placement.placement = std::move(current);
  r.placement.site = std::move(site);

  CheckResult const chk = check_placement(r.placement, n, layout);
  rep.hpwl = chk.hpwl;
  rep.sll = chk.sll;
  rep.clock_violations = chk.clock;
  rep.overlaps = chk.overlaps.size();
  r.exit_code = rep.converged ? 0 : 3;
  return r;
}

}  // namespace leaps
