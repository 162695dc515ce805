#include <gtest/gtest.h>

#include <sstream>

#include "leaps/netlist.hpp"

using namespace leaps;

TEST(Netlist, ParsesSmallFile) {
  std::istringstream in(R"(NETLIST tiny
INSTANCES
0 a LUTL
1 b FF 2.5 3 FIXED CLK 1
NETS
0 1 0 1@0.5,-0.25
1 1 1   # clock net
CLOCKS
1
)");
  auto n = parse_netlist(in);
  ASSERT_EQ(n.instances.size(), 2u);
  ASSERT_EQ(n.nets.size(), 2u);
  EXPECT_TRUE(n.instances[1].fixed);
  EXPECT_DOUBLE_EQ(n.instances[1].position->x, 2.5);
  EXPECT_EQ(n.instances[1].clocks, std::vector<int>{1});
  EXPECT_DOUBLE_EQ(n.nets[0].pins[1].dx, 0.5);
  EXPECT_EQ(n.clock_nets, std::vector<int>{1});
  EXPECT_EQ(n.inst_nets[1], (std::vector<int>{0, 1}));
}

TEST(Netlist, DanglingReferenceReportsLine) {
  std::istringstream in("INSTANCES\n0 a LUTL\n1 b FF\nNETS\n0 1 0 1\n1 1 0 7\n");
  try {
    parse_netlist(in);
    FAIL();
  } catch (ParseError const &e) {
    EXPECT_EQ(e.line(), 6u);
  }
}

TEST(Netlist, DuplicateIdRejected) {
  std::istringstream in("INSTANCES\n0 a LUTL\n0 b FF\n");
  try {
    parse_netlist(in);
    FAIL();
  } catch (ParseError const &e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Netlist, EmptyNetsSection) {
  std::istringstream in("INSTANCES\n0 a LUTL\nNETS\n");
  auto n = parse_netlist(in);
  EXPECT_EQ(n.nets.size(), 0u);
}

TEST(Netlist, ClkListMustAgree) {
  std::istringstream in("INSTANCES\n0 a FF CLK 0\n1 b FF\nNETS\n0 1 0 1\n");
  EXPECT_THROW(parse_netlist(in), ParseError);
}

TEST(Netlist, UnknownTypeRejected) {
  std::istringstream in("INSTANCES\n0 a URAM\n");
  EXPECT_THROW(parse_netlist(in), ParseError);
}

TEST(Netlist, RoundTripGenerated) {
  GeneratorParams p;
  p.instances = 500;
  p.nets = 520;
  p.seed = 11;
  auto n = generate_synthetic(p);
  std::istringstream in(write_netlist(n));
  auto m = parse_netlist(in);
  EXPECT_TRUE(same_structure(n, m));
  EXPECT_EQ(write_netlist(m), write_netlist(n));
}

TEST(Netlist, RoundTripEmpty) {
  Netlist n;
  n.name = "empty";
  n.finalize();
  std::istringstream in(write_netlist(n));
  EXPECT_TRUE(same_structure(n, parse_netlist(in)));
}

TEST(Netlist, UnicodeNamesRoundTrip) {
  Netlist n;
  n.name = "d\xC3\xA9sign #1";
  Instance a;
  a.id = 0;
  a.name = "\xE2\x9C\x93 cell%";
  a.demand[index(Resource::LUTL)] = 1;
  a.position = Point{1.25, 3.0 / 7.0};
  n.instances.push_back(a);
  n.finalize();
  auto text = write_netlist(n);
  std::istringstream in(text);
  auto m = parse_netlist(in);
  EXPECT_TRUE(same_structure(n, m));
  EXPECT_EQ(m.instances[0].name, a.name);
}

TEST(Netlist, MultiDemandRoundTrip) {
  std::istringstream in("INSTANCES\n0 a LUTL:1+FF:2\n1 b DSP\nNETS\n0 0.5 0 1\n");
  auto n = parse_netlist(in);
  EXPECT_DOUBLE_EQ(n.instances[0].charge(), 3.0);
  EXPECT_EQ(n.instances[0].primary(), Resource::FF);
  std::istringstream again(write_netlist(n));
  EXPECT_TRUE(same_structure(n, parse_netlist(again)));
}

TEST(Netlist, GeneratorDeterministic) {
  GeneratorParams p;
  p.seed = 1;
  EXPECT_EQ(write_netlist(generate_synthetic(p)), write_netlist(generate_synthetic(p)));
  p.seed = 2;
  GeneratorParams q;
  EXPECT_NE(write_netlist(generate_synthetic(p)), write_netlist(generate_synthetic(q)));
}

TEST(Netlist, GeneratorFanoutMean) {
  GeneratorParams p;
  p.instances = 5000;
  p.nets = 10000;
  p.mean_pins = 3.5;
  p.clocks = 0;
  p.seed = 5;
  auto n = generate_synthetic(p);
  std::size_t pins = 0;
  for (auto const &net : n.nets) pins += net.pins.size();
  double mean = static_cast<double>(pins) / n.nets.size();
  EXPECT_NEAR(mean, 3.5, 0.05 * 3.5);
}

TEST(Netlist, GeneratorClocks) {
  GeneratorParams p;
  p.instances = 3000;
  p.nets = 3000;
  p.clocks = 30;
  auto n = generate_synthetic(p);
  EXPECT_EQ(n.clock_nets.size(), 30u);
  for (auto const &inst : n.instances) {
    EXPECT_LE(inst.clocks.size(), 1u);
    bool seq = inst.demand[index(Resource::LUTL)] == 0;
    EXPECT_EQ(inst.clocks.size(), seq ? 1u : 0u);
  }
}

TEST(Netlist, GeneratorRejectsTooManyClocks) {
  GeneratorParams p;
  p.instances = 10;
  p.nets = 10;
  p.clocks = 50;
  EXPECT_THROW(generate_synthetic(p), ConfigError);
}

TEST(Netlist, ValidateCapacity) {
  GeneratorParams p;
  p.instances = 400;
  p.nets = 400;
  p.clocks = 2;
  auto n = generate_synthetic(p);
  auto cfg = suggest_architecture(n, 1, 4);
  auto L = build_layout(cfg);
  auto diags = validate(n, L);
  EXPECT_TRUE(diags.empty()) << diags.front().message;

  ArchConfig tiny;
  tiny.width = 10;
  tiny.height = 8;
  tiny.bins_x = 2;
  tiny.bins_y = 2;
  tiny.column_pattern = "CCCCCCCCCD";
  // Plenty of LUT, but FF demand 16*90+1 exceeds FF capacity.
  Netlist m;
  for (int i = 0; i < 2; ++i) {
    Instance inst;
    inst.id = i;
    inst.name = "x" + std::to_string(i);
    inst.demand[index(Resource::FF)] = i == 0 ? 16 * 72 : 1;
    m.instances.push_back(inst);
  }
  m.nets.push_back({0, 1.0, false, {{0}, {1}}});
  m.finalize();
  auto d = validate(m, build_layout(tiny));
  ASSERT_EQ(d.size(), 1u);
  EXPECT_NE(d[0].message.find("capacity"), std::string::npos);
}

TEST(Netlist, ValidateWarnsSinglePinNet) {
  ArchConfig tiny;
  tiny.width = 10;
  tiny.height = 8;
  tiny.bins_x = 2;
  tiny.bins_y = 2;
  Netlist m;
  Instance inst;
  inst.name = "a";
  inst.demand[index(Resource::LUTL)] = 1;
  m.instances.push_back(inst);
  m.nets.push_back({0, 1.0, false, {{0}}});
  m.finalize();
  auto d = validate(m, build_layout(tiny));
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].severity, Diagnostic::Severity::Warning);
}
