#include <gtest/gtest.h>

#include <random>

#include "leaps/arch.hpp"

using namespace leaps;

namespace {

ArchConfig slr_config(int cols, int rows, double sw, double sh) {
  ArchConfig c;
  c.slr_cols = cols;
  c.slr_rows = rows;
  c.slr_width = sw;
  c.slr_height = sh;
  c.bins_x = 8;
  c.bins_y = 8;
  return c;
}

}  // namespace

TEST(Arch, StackedTopologyDimensions) {
  auto L = build_layout(slr_config(1, 4, 100, 50));
  EXPECT_DOUBLE_EQ(L.width(), 100);
  EXPECT_DOUBLE_EQ(L.height(), 200);
  EXPECT_EQ(L.topology().count(), 4);
}

TEST(Arch, SquareTopologyDimensions) {
  auto c = slr_config(2, 2, 50, 50);
  c.clock.rows = 4;
  auto L = build_layout(c);
  EXPECT_DOUBLE_EQ(L.width(), 100);
  EXPECT_DOUBLE_EQ(L.height(), 100);
}

TEST(Arch, IndivisibleWidthNamesField) {
  ArchConfig c;
  c.slr_cols = 3;
  c.width = 100;
  c.height = 80;
  try {
    build_layout(c);
    FAIL() << "expected ConfigError";
  } catch (ConfigError const &e) {
    EXPECT_EQ(e.field(), "width");
    EXPECT_NE(std::string(e.what()).find("not divisible by 3"), std::string::npos);
  }
}

TEST(Arch, TooManySlrColumns) {
  auto c = slr_config(6, 1, 10, 40);
  EXPECT_THROW(build_layout(c), ConfigError);
}

TEST(Arch, SlrIndexExamples) {
  SlrTopology t{2, 2, 50, 50, {}};
  EXPECT_EQ(slr_index_of(60, 10, t), (SlrIndex{1, 0}));
  EXPECT_EQ(slr_index_of(100, 100, t), (SlrIndex{1, 1}));
  SlrTopology s{1, 4, 100, 50, {}};
  EXPECT_EQ(slr_index_of(10, 160, s), (SlrIndex{0, 3}));
  EXPECT_THROW(slr_index_of(-1, 0, t), OutOfBounds);
  EXPECT_THROW(slr_index_of(0, 100.5, t), OutOfBounds);
}

TEST(Arch, ClockRegionExamples) {
  ArchConfig c;
  c.width = 100;
  c.height = 160;
  c.bins_x = 4;
  c.bins_y = 4;
  auto L = build_layout(c);
  ASSERT_EQ(L.regions().size(), 40u);
  auto a = L.clock_region_of(0, 0);
  EXPECT_EQ(a.col, 0);
  EXPECT_EQ(a.row, 0);
  auto b = L.clock_region_of(99.9, 159.9);
  EXPECT_EQ(b.col, 4);
  EXPECT_EQ(b.row, 7);
  auto d = L.clock_region_of(20, 20);
  EXPECT_EQ(d.col, 1);
  EXPECT_EQ(d.row, 1);
  EXPECT_THROW(L.clock_region_of(101, 0), OutOfBounds);
}

TEST(Arch, HalfColumnVerticalHalves) {
  ArchConfig c;
  c.width = 100;
  c.height = 160;
  c.bins_x = 4;
  c.bins_y = 4;
  auto L = build_layout(c);
  // Region (0,0) spans y in [0,20).
  EXPECT_FALSE(L.half_column_of(5, 0).upper);
  EXPECT_TRUE(L.half_column_of(5, 19.999).upper);
  EXPECT_TRUE(L.half_column_of(5, 10).upper);
  EXPECT_FALSE(L.half_column_of(5, 9.999).upper);
  auto hc = L.half_column_of(5, 10);
  auto box = L.half_column_box(hc.id);
  EXPECT_TRUE(box.contains(5, 10));
}

TEST(Arch, PartitionProperty) {
  for (auto [cols, rows] : {std::pair{1, 4}, std::pair{2, 2}, std::pair{3, 1}}) {
    ArchConfig c;
    c.slr_cols = cols;
    c.slr_rows = rows;
    c.width = 60;
    c.height = 80;
    c.bins_x = 4;
    c.bins_y = 4;
    auto L = build_layout(c);
    double area = 0;
    for (auto const &r : L.regions()) area += r.box.area();
    EXPECT_NEAR(area, L.width() * L.height(), 1e-9);
    for (double x = 0.25; x < L.width(); x += 0.5) {
      for (double y = 0.25; y < L.height(); y += 0.5) {
        int hits = 0;
        for (auto const &r : L.regions()) hits += r.box.contains(x, y);
        ASSERT_EQ(hits, 1);
        auto ref = L.clock_region_of(x, y);
        ASSERT_TRUE(L.regions()[ref.region].box.contains(x, y));
        int hc_hits = 0;
        for (int h = 0; h < L.num_half_columns(); ++h) hc_hits += L.half_column_box(h).contains(x, y);
        ASSERT_EQ(hc_hits, 1);
        ASSERT_TRUE(L.half_column_box(L.half_column_of(x, y).id).contains(x, y));
      }
    }
  }
}

TEST(Arch, SlrAgreesWithClockRegion) {
  auto c = slr_config(2, 2, 50, 40);
  auto L = build_layout(c);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(0, L.width()), uy(0, L.height());
  for (int i = 0; i < 10000; ++i) {
    double x = ux(rng), y = uy(rng);
    ASSERT_EQ(slr_index_of(x, y, L.topology()), L.clock_region_of(x, y).slr);
  }
}

TEST(Arch, CapacityConservedOverBins) {
  ArchConfig c;
  c.width = 30;
  c.height = 16;
  c.bins_x = 8;  // bins do not align with sites
  c.bins_y = 4;
  c.column_pattern = std::string(10, 'C') + "D" + std::string(9, 'M') + "B" + std::string(9, 'C');
  auto L = build_layout(c);
  auto total = L.total_capacity();
  EXPECT_NEAR(total[index(Resource::LUTL)], 28 * 16 * 8, 1e-9);
  EXPECT_NEAR(total[index(Resource::LUTM_AL)], 9 * 16 * 8, 1e-9);
  EXPECT_NEAR(total[index(Resource::DSP)], 16, 1e-9);
  EXPECT_NEAR(total[index(Resource::BRAM)], 16, 1e-9);
}

TEST(Arch, BadPatternRejected) {
  ArchConfig c;
  c.width = 10;
  c.height = 8;
  c.column_pattern = "CCCCCCCCCX";
  try {
    build_layout(c);
    FAIL();
  } catch (ConfigError const &e) {
    EXPECT_EQ(e.field(), "site_columns");
  }
}
