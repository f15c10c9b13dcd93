#include <gtest/gtest.h>

#include <cmath>
#include <regex>

#include <graphmask/error.hpp>
#include <graphmask/experiment.hpp>
#include <graphmask/report.hpp>

using namespace graphmask;

namespace {

SweepSpec small_sweep(int threads) {
  SweepSpec s;
  s.axis = SweepAxis::Coverability;
  s.values = {0.8, 1.0};
  s.methods = {Method::MlReduced, Method::GlInformed};
  s.repetitions = 3;
  s.base.n = 12;
  s.base.k_signals = 20;
  s.seed = 9;
  s.threads = threads;
  return s;
}

SweepTable two_point_table() {
  SweepTable t;
  t.axis = "coverability";
  t.metrics = {"f_score"};
  t.rows = {{0.5, "ml", {0.2}, 1, 0}, {1.0, "ml", {0.8}, 1, 0}};
  return t;
}

}  // namespace

TEST(Methods, NamesRoundTrip) {
  for (Method m : all_methods()) EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_THROW(parse_method("gl-unknown"), ValidationError);
  EXPECT_EQ(parse_axis("snr"), SweepAxis::Snr);
}

TEST(ScheduledGamma, Breakpoints) {
  EXPECT_EQ(scheduled_gamma(0.5), 100.0);
  EXPECT_EQ(scheduled_gamma(0.75), 100.0);
  EXPECT_EQ(scheduled_gamma(0.8), 1e4);
  EXPECT_EQ(scheduled_gamma(0.85), 1e5);
  EXPECT_EQ(scheduled_gamma(0.9), 1e5);
  EXPECT_EQ(scheduled_gamma(1.0), 1e6);
}

TEST(Sweep, DeterministicAcrossRunsAndThreads) {
  const SweepTable a = run_sweep(small_sweep(1));
  const SweepTable b = run_sweep(small_sweep(1));
  const SweepTable c = run_sweep(small_sweep(4));
  EXPECT_EQ(sweep_table_text(a), sweep_table_text(b));
  EXPECT_EQ(sweep_table_json(a), sweep_table_json(c));
  EXPECT_EQ(sweep_table_tsv(a), sweep_table_tsv(c));
  ASSERT_EQ(a.rows.size(), 4u);
  EXPECT_EQ(a.rows.front().trials, 3);
  EXPECT_NE(a.find(1.0, "ml-reduced"), nullptr);
  EXPECT_GE(a.metric_index("mse"), 0);
}

TEST(Sweep, JsonRoundTrip) {
  SweepTable t = two_point_table();
  t.rows[0].metrics[0] = std::nan("");
  const SweepTable back = sweep_table_from_json(sweep_table_json(t));
  EXPECT_EQ(back.axis, "coverability");
  EXPECT_TRUE(std::isnan(back.rows[0].metrics[0]));
  EXPECT_DOUBLE_EQ(back.rows[1].metrics[0], 0.8);
  EXPECT_THROW(sweep_table_from_json("[1, 2"), ParseError);
}

TEST(Sweep, RejectsEmptyGrid) {
  SweepSpec s = small_sweep(1);
  s.values.clear();
  EXPECT_THROW(run_sweep(s), ValidationError);
}

TEST(Plot, TwoPointCoordinates) {
  const std::string svg = sweep_svg(two_point_table(), "f_score");
  // Plot area x in [70, 490], y in [30, 350]; the extremes land on the corners.
  EXPECT_NE(svg.find("points=\"70.00,350.00 490.00,30.00\""), std::string::npos) << svg;
  EXPECT_NE(svg.find("data-method=\"ml\""), std::string::npos);
  EXPECT_THROW(sweep_svg(two_point_table(), "nope"), ValidationError);
}

TEST(Report, AlignedTable) {
  const std::string t = aligned_table({"a", "long"}, {{"xyz", "1"}, {"b", "22"}});
  EXPECT_EQ(t, "a    long\n---  ----\nxyz  1\nb    22\n");
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(std::nan("")), "nan");
}
