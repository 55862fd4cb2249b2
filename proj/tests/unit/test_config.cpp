#include <gtest/gtest.h>

#include "cesr/config.hpp"
#include "cesr/csv.hpp"
#include "cesr/experiment.hpp"

using namespace cesr;

namespace {

ConfigError config_error(std::string_view text)
{
  try {
    parse_run_config(text, "t.cfg");
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "expected ConfigError for:\n" << text;
  return ConfigError("", "");
}

ConfigError plan_error(std::string_view text)
{
  try {
    parse_plan(text, "t.plan");
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "expected ConfigError for:\n" << text;
  return ConfigError("", "");
}

constexpr std::string_view kPlan = "name = p\n"
                                   "axis = cbr_rate\n"
                                   "values = 500, 3000\n"
                                   "areas = 60x20, 100x50\n"
                                   "class_a = 1, 4\n"
                                   "nodes = 20\n"
                                   "runs = 2\n";

} // namespace

TEST(RunConfig, Defaults)
{
  auto c = parse_run_config("");
  EXPECT_EQ(c.label, "run");
  EXPECT_EQ(c.sim.duration, 100);
  EXPECT_EQ(c.sim.runs, 10u);
  EXPECT_EQ(c.sim.beacon_period, 5);
  EXPECT_EQ(c.sim.table_timeout, 15);
  EXPECT_EQ(c.sim.packet_size, 1024u);
  EXPECT_EQ(c.sim.tx_range, 20);
  EXPECT_FALSE(c.sim.mobility);
  EXPECT_TRUE(c.has(Mode::Benchmark));
  EXPECT_TRUE(c.has(Mode::Cooperative));
}

TEST(RunConfig, ParsesValues)
{
  auto c = parse_run_config("# comment\n"
                            "label = dense\n"
                            "modes = cooperative\n"
                            "duration = 50   # s\n"
                            "cbr_rate = 1500\n"
                            "class_a_generates = false\n"
                            "lr_power_tx = 3\n"
                            "mobility.mean_speed = 2\n"
                            "mobility.alpha = 0.25\n");
  EXPECT_EQ(c.label, "dense");
  EXPECT_FALSE(c.has(Mode::Benchmark));
  EXPECT_EQ(c.sim.duration, 50);
  EXPECT_EQ(c.sim.cbr_rate, 1500);
  EXPECT_FALSE(c.sim.class_a_generates);
  EXPECT_EQ(c.sim.power.long_range.tx_w, 3);
  ASSERT_TRUE(c.sim.mobility);
  EXPECT_EQ(c.sim.mobility->mean_speed, 2);
  EXPECT_EQ(c.sim.mobility->alpha, 0.25);
  EXPECT_EQ(c.sim.mobility->speed_stddev, 1.0);
}

TEST(RunConfig, ErrorsNameLineAndField)
{
  auto e = config_error("duration = 10\nbogus = 1\n");
  EXPECT_EQ(e.line(), 2);
  EXPECT_EQ(e.field(), "bogus");
  EXPECT_EQ(e.source(), "t.cfg");

  e = config_error("runs = 3\ncbr_rate = fast\n");
  EXPECT_EQ(e.line(), 2);
  EXPECT_EQ(e.field(), "cbr_rate");

  e = config_error("runs = 3\n\nduration = 0\n");
  EXPECT_EQ(e.line(), 3);
  EXPECT_EQ(e.field(), "duration");

  e = config_error("runs = 3\nruns = 4\n");
  EXPECT_EQ(e.line(), 2);

  e = config_error("packet_size =\n");
  EXPECT_EQ(e.line(), 1);

  e = config_error("no equals sign\n");
  EXPECT_EQ(e.line(), 1);

  e = config_error("modes = benchmark, sideways\n");
  EXPECT_EQ(e.field(), "modes");
  EXPECT_EQ(e.line(), 1);

  e = config_error("mobility.alpha = 0.5\n");
  EXPECT_EQ(e.field(), "mobility.mean_speed");

  e = config_error("mobility.mean_speed = 1\nmobility.alpha = 2\n");
  EXPECT_EQ(e.field(), "mobility.alpha");
  EXPECT_EQ(e.line(), 2);
}

TEST(RunConfig, ShippedExampleParses)
{
  auto c = read_run_config(CESR_SOURCE_DIR "/configs/default.cfg");
  EXPECT_EQ(c.label, "default");
  EXPECT_EQ(c.sim.cbr_rate, 3000);
}

TEST(Plan, ParseAndExpand)
{
  auto plan = parse_plan(kPlan);
  EXPECT_EQ(plan.name, "p");
  EXPECT_EQ(plan.axis, Axis::CbrRate);
  EXPECT_EQ(plan.base.sim.runs, 2u);
  auto points = expand(plan);
  ASSERT_EQ(points.size(), 8u);
  EXPECT_EQ(format_area(points[0].area), "60x20");
  EXPECT_EQ(points[0].n_class_a, 1u);
  EXPECT_EQ(points[0].axis_value, 500);
  EXPECT_EQ(points[1].axis_value, 3000);
  EXPECT_EQ(points[2].n_class_a, 4u);
  EXPECT_EQ(format_area(points[4].area), "100x50");
  EXPECT_EQ(config_for(plan, points[1]).cbr_rate, 3000);
}

TEST(Plan, ScenarioSeedsIgnoreRateAndSpeed)
{
  auto plan = parse_plan(kPlan);
  auto points = expand(plan);
  EXPECT_EQ(scenario_seed_for(plan, points[0], 3), scenario_seed_for(plan, points[1], 3));
  EXPECT_NE(scenario_seed_for(plan, points[0], 3), scenario_seed_for(plan, points[0], 4));
  EXPECT_NE(scenario_seed_for(plan, points[0], 3), scenario_seed_for(plan, points[4], 3));
}

TEST(Plan, NodeCountAxis)
{
  auto plan = parse_plan("name = n\naxis = node_count\nvalues = 10, 20\nareas = 60x20\nclass_a = 2\n");
  auto points = expand(plan);
  ASSERT_EQ(points.size(), 2u);
  EXPECT_EQ(points[1].n_total, 20u);
}

TEST(Plan, MeanSpeedAxisEnablesMobility)
{
  auto plan = parse_plan("name = m\naxis = mean_speed\nvalues = 0, 3\nareas = 60x20\nclass_a = 2\nnodes = 10\n");
  auto cfg = config_for(plan, expand(plan)[1]);
  ASSERT_TRUE(cfg.mobility);
  EXPECT_EQ(cfg.mobility->mean_speed, 3);
}

TEST(Plan, Errors)
{
  auto e = plan_error("name = p\naxis = sideways\nvalues = 1\nareas = 60x20\nclass_a = 1\n");
  EXPECT_EQ(e.field(), "axis");
  EXPECT_EQ(e.line(), 2);

  e = plan_error("name = p\naxis = cbr_rate\nvalues = 1\nareas = 60by20\nclass_a = 1\n");
  EXPECT_EQ(e.field(), "areas");
  EXPECT_EQ(e.line(), 4);

  e = plan_error("name = p\naxis = cbr_rate\nvalues = 1\nareas = 60x20\nclass_a = 30\n");
  EXPECT_EQ(e.field(), "class_a");

  e = plan_error("name = p\nlabel = x\naxis = cbr_rate\nvalues = 1\nareas = 60x20\nclass_a = 1\n");
  EXPECT_EQ(e.field(), "label");
  EXPECT_EQ(e.line(), 2);

  e = plan_error("name = ../p\naxis = cbr_rate\nvalues = 1\nareas = 60x20\nclass_a = 1\n");
  EXPECT_EQ(e.field(), "name");

  e = plan_error("axis = cbr_rate\nvalues = 1\nareas = 60x20\nclass_a = 1\n");
  EXPECT_EQ(e.field(), "name");

  e = plan_error("name = p\naxis = node_count\nvalues = 10, 2.5\nareas = 60x20\nclass_a = 1\n");
  EXPECT_EQ(e.field(), "values");
}

TEST(Plan, ShippedPlansParse)
{
  for (const char* name : {"node_count", "traffic", "mobility"}) {
    auto plan = read_plan(std::string(CESR_SOURCE_DIR "/plans/") + name + ".plan");
    EXPECT_EQ(plan.name, name);
    EXPECT_EQ(plan.base.sim.runs, 10u);
    EXPECT_EQ(plan.base.sim.duration, 100);
  }
}

TEST(Csv, QuoteRoundTrip)
{
  for (std::string s : {"plain", "a,b", "say \"hi\"", ""}) {
    auto rec = csv::parse_record(csv::quote(s) + "," + csv::quote("x"));
    ASSERT_EQ(rec.size(), 2u);
    EXPECT_EQ(rec[0], s);
    EXPECT_EQ(rec[1], "x");
  }
  EXPECT_THROW(csv::parse_record("\"open"), SchemaError);
}

TEST(SweepCsv, RoundTripThroughReport)
{
  SweepResult s;
  s.plan = parse_plan(kPlan);
  auto points = expand(s.plan);
  const double gains[] = {-0.1, 0.2, 0.05, 0.31, 0.0, 0.1, 0.15, 0.12};
  for (std::size_t i = 0; i < points.size(); ++i) {
    PointResult r;
    r.point = points[i];
    r.gain.benchmark.runs = r.gain.cooperative.runs = 2;
    r.gain.benchmark.eb_per_mb = 1.0;
    r.gain.cooperative.eb_per_mb = 1.0 - gains[i];
    r.gain.gain = gains[i];
    s.points.push_back(r);
  }
  auto rows = parse_sweep_csv(sweep_rows(s));
  ASSERT_EQ(rows.size(), points.size());
  EXPECT_EQ(rows[3].gain, 0.31);
  EXPECT_EQ(rows[3].n_class_a, 4u);

  auto rep = build_report(rows);
  ASSERT_TRUE(rep.best);
  EXPECT_EQ(rep.best->gain, 0.31);
  EXPECT_NE(rep.summary.find("max gain 0.3100 (plan p, area 60x20, class_a 4, cbr_rate 3000)"), std::string::npos);
  ASSERT_EQ(rep.series.size(), 4u);
  EXPECT_EQ(rep.series[0].file_name, "p_60x20_a1_n20.dat");
  EXPECT_EQ(plot_data(rep.series[0]), "# p 60x20 class_a 1, nodes 20\n500 -0.1\n3000 0.2\n");
}

TEST(SweepCsv, SchemaErrors)
{
  EXPECT_THROW(parse_sweep_csv(""), SchemaError);
  EXPECT_THROW(parse_sweep_csv("a,b,c\n1,2,3\n"), SchemaError);
  const std::string header = std::string(kSweepHeader) + "\n";
  EXPECT_THROW(parse_sweep_csv(header), SchemaError);
  EXPECT_THROW(parse_sweep_csv(header + "p,cbr_rate,60x20,20,4,500\n"), SchemaError);
  EXPECT_THROW(parse_sweep_csv(header + "p,cbr_rate,60x20,20,4,500,2,1,1,1,1,1,1,abc\n"), SchemaError);
  EXPECT_THROW(parse_sweep_csv(header + "p,warp,60x20,20,4,500,2,1,1,1,1,1,1,0\n"), SchemaError);
  EXPECT_NO_THROW(parse_sweep_csv(header + "p,cbr_rate,60x20,20,4,500,2,1,1,1,1,1,1,0\n"));
}
