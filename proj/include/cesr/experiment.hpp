#ifndef CESR_EXPERIMENT_HPP
#define CESR_EXPERIMENT_HPP

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdio>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include "cesr/config.hpp"
#include "cesr/csv.hpp"
#include "cesr/error.hpp"
#include "cesr/metrics.hpp"
#include "cesr/rng.hpp"
#include "cesr/scenario.hpp"
#include "cesr/sim.hpp"
#include "cesr/text.hpp"

namespace cesr {

enum class Axis { NodeCount, CbrRate, MeanSpeed };

inline std::string_view to_string(Axis a)
{
  switch (a) {
    case Axis::NodeCount: return "node_count";
    case Axis::CbrRate: return "cbr_rate";
    case Axis::MeanSpeed: return "mean_speed";
  }
  return "?";
}

inline std::optional<Axis> parse_axis(std::string_view s)
{
  if (s == "node_count")
    return Axis::NodeCount;
  if (s == "cbr_rate")
    return Axis::CbrRate;
  if (s == "mean_speed")
    return Axis::MeanSpeed;
  return std::nullopt;
}

inline std::string format_area(const Area& a)
{
  return text::format_double(a.width) + "x" + text::format_double(a.height);
}

inline std::optional<Area> parse_area(std::string_view s)
{
  auto parts = text::split(s, 'x');
  if (parts.size() != 2)
    return std::nullopt;
  auto w = text::parse_double(parts[0]);
  auto h = text::parse_double(parts[1]);
  if (!w || !h || !(*w > 0) || !(*h > 0) || !std::isfinite(*w) || !std::isfinite(*h))
    return std::nullopt;
  return Area{*w, *h};
}

// Plan files use the run config syntax. Plan keys:
//
//   name          = traffic
//   axis          = node_count | cbr_rate | mean_speed
//   values        = 500, 1000, 2000, 3000
//   areas         = 60x20, 100x50
//   class_a       = 4            (list; one series per entry)
//   nodes         = 20           (total nodes when the axis is not node_count)
//   scenario_seed = 1
//   max_attempts  = 10000
//
// Any run config key except label and modes sets the base config. Every
// point runs both modes on the same scenarios and per-run seeds.
struct ExperimentPlan
{
  std::string name;
  RunConfig base;
  Axis axis = Axis::CbrRate;
  std::vector<double> values;
  std::vector<Area> areas;
  std::vector<std::size_t> class_a_counts;
  std::size_t nodes = 20;
  std::uint64_t scenario_seed = 1;
  std::uint32_t max_attempts = 10000;
};

struct SweepPoint
{
  Area area;
  std::size_t n_total = 0;
  std::size_t n_class_a = 0;
  double axis_value = 0;
};

inline ExperimentPlan plan_from_doc(const ConfigDoc& doc)
{
  static const std::vector<std::string_view> plan_keys = {"name",    "axis",          "values",      "areas",
                                                          "class_a", "scenario_seed", "max_attempts", "nodes"};
  for (std::string_view forbidden : {"label", "modes"})
    if (const auto* e = doc.find(forbidden))
      throw ConfigError(e->key, "not allowed in a plan; every point runs both modes", e->line, doc.source());

  ExperimentPlan plan;
  plan.base = apply_run_keys(doc, plan_keys);
  auto require = [&](std::string_view key) -> const ConfigEntry& {
    const auto* e = doc.find(key);
    if (!e)
      throw ConfigError(std::string(key), "required plan key is missing", 0, doc.source());
    return *e;
  };
  auto fail = [&](const ConfigEntry& e, const std::string& msg) {
    return ConfigError(e.key, msg, e.line, doc.source());
  };

  const auto& name = require("name");
  plan.name = name.value;
  auto name_char = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
           c == '.';
  };
  if (!std::all_of(plan.name.begin(), plan.name.end(), name_char) || plan.name.front() == '.')
    throw fail(name, "name may only hold letters, digits, '-', '_' and '.', and names output files");
  const auto& axis = require("axis");
  auto parsed_axis = parse_axis(axis.value);
  if (!parsed_axis)
    throw fail(axis, "axis must be node_count, cbr_rate or mean_speed");
  plan.axis = *parsed_axis;

  try {
    const auto& values = require("values");
    for (const auto& v : detail::to_list(values)) {
      auto d = text::parse_double(v);
      if (!d || !std::isfinite(*d) || *d < 0)
        throw fail(values, "bad axis value '" + v + "'");
      if (plan.axis == Axis::NodeCount && (*d < 1 || *d != std::floor(*d)))
        throw fail(values, "node counts must be positive integers");
      plan.values.push_back(*d);
    }
    const auto& areas = require("areas");
    for (const auto& a : detail::to_list(areas)) {
      auto area = parse_area(a);
      if (!area)
        throw fail(areas, "area must look like 60x20, got '" + a + "'");
      plan.areas.push_back(*area);
    }
    const auto& class_a = require("class_a");
    for (const auto& v : detail::to_list(class_a)) {
      auto n = text::parse_uint(v);
      if (!n)
        throw fail(class_a, "bad ClassA count '" + v + "'");
      plan.class_a_counts.push_back(static_cast<std::size_t>(*n));
    }
    if (const auto* e = doc.find("nodes"))
      plan.nodes = static_cast<std::size_t>(detail::to_uint(*e));
    if (const auto* e = doc.find("scenario_seed"))
      plan.scenario_seed = detail::to_uint(*e);
    if (const auto* e = doc.find("max_attempts"))
      plan.max_attempts = detail::to_u32(*e);
  } catch (const ConfigError& e) {
    throw e.line() ? e : doc.locate(e);
  }

  if (plan.axis != Axis::NodeCount && plan.nodes < 1)
    throw fail(*doc.find("nodes"), "must be >= 1");
  for (auto a : plan.class_a_counts) {
    std::size_t smallest = plan.nodes;
    if (plan.axis == Axis::NodeCount)
      smallest = static_cast<std::size_t>(*std::min_element(plan.values.begin(), plan.values.end()));
    if (a > smallest)
      throw fail(*doc.find("class_a"), "ClassA count exceeds the node count");
  }
  if (plan.max_attempts < 1)
    throw fail(*doc.find("max_attempts"), "must be >= 1");
  return plan;
}

inline ExperimentPlan parse_plan(std::string_view text, const std::string& source = "plan")
{
  return plan_from_doc(ConfigDoc::parse(text, source));
}

inline ExperimentPlan read_plan(const std::string& path)
{
  return plan_from_doc(ConfigDoc::read(path));
}

/// Canonical point order: area, then ClassA count, then axis value.
inline std::vector<SweepPoint> expand(const ExperimentPlan& plan)
{
  std::vector<SweepPoint> out;
  for (const auto& area : plan.areas)
    for (auto na : plan.class_a_counts)
      for (double v : plan.values) {
        SweepPoint p{area, plan.nodes, na, v};
        if (plan.axis == Axis::NodeCount)
          p.n_total = static_cast<std::size_t>(v);
        out.push_back(p);
      }
  return out;
}

/// Topology seed for one run of a point. Independent of the axis value
/// unless the axis changes the topology, so rate and speed sweeps reuse the
/// same scenarios across points.
inline std::uint64_t scenario_seed_for(const ExperimentPlan& plan, const SweepPoint& p, std::uint32_t run_index)
{
  std::uint64_t s = derive_seed(plan.scenario_seed, std::bit_cast<std::uint64_t>(p.area.width));
  s = derive_seed(s, std::bit_cast<std::uint64_t>(p.area.height));
  s = derive_seed(s, p.n_total);
  s = derive_seed(s, p.n_class_a);
  return derive_seed(s, run_index);
}

inline SimConfig config_for(const ExperimentPlan& plan, const SweepPoint& p)
{
  RunConfig c = plan.base;
  switch (plan.axis) {
    case Axis::NodeCount: break;
    case Axis::CbrRate: c.sim.cbr_rate = p.axis_value; break;
    case Axis::MeanSpeed: set_mean_speed(c, p.axis_value); break;
  }
  c.sim.validate();
  return c.sim;
}

struct PointResult
{
  SweepPoint point;
  GainReport gain;
  double benchmark_energy_per_node_j = 0;
  double cooperative_energy_per_node_j = 0;
};

struct FailedPoint
{
  SweepPoint point;
  std::string error;
};

struct SweepResult
{
  ExperimentPlan plan;
  std::vector<PointResult> points; // canonical order
  std::vector<FailedPoint> failed; // canonical order
};

inline double mean_energy_per_node(std::span<const RunStats> runs)
{
  double sum = 0;
  for (const auto& r : runs)
    sum += r.total_energy_j() / static_cast<double>(r.nodes.size());
  return sum / static_cast<double>(runs.size());
}

/// Runs every run of one point in both modes on paired scenarios and seeds.
inline PointResult run_point(const ExperimentPlan& plan, const SweepPoint& p)
{
  SimConfig cfg = config_for(plan, p);
  std::vector<RunStats> bmk;
  std::vector<RunStats> coop;
  for (std::uint32_t r = 0; r < cfg.runs; ++r) {
    ScenarioRequest req{p.area, p.n_total, p.n_class_a, cfg.tx_range, plan.max_attempts};
    Scenario scenario = generate_scenario(req, scenario_seed_for(plan, p, r));
    cfg.mode = Mode::Benchmark;
    bmk.push_back(run(cfg, scenario, r));
    cfg.mode = Mode::Cooperative;
    coop.push_back(run(cfg, scenario, r));
  }
  PointResult out;
  out.point = p;
  out.gain = gain(energy_efficiency(bmk), energy_efficiency(coop));
  out.benchmark_energy_per_node_j = mean_energy_per_node(bmk);
  out.cooperative_energy_per_node_j = mean_energy_per_node(coop);
  return out;
}

/// Runs all points, on up to `workers` threads. Results keep the canonical
/// order whatever order the points finish in. A failing point is recorded
/// and the rest still run.
inline SweepResult sweep(const ExperimentPlan& plan, unsigned workers = 1)
{
  const auto points = expand(plan);
  std::vector<std::optional<PointResult>> done(points.size());
  std::vector<std::string> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        done[i] = run_point(plan, points[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(points.size())));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t)
      pool.emplace_back(work);
  }
  SweepResult out;
  out.plan = plan;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (done[i])
      out.points.push_back(std::move(*done[i]));
    else
      out.failed.push_back({points[i], errors[i]});
  }
  return out;
}

inline constexpr std::string_view kSweepHeader =
  "plan,axis,area,n_total,n_class_a,axis_value,runs,bmk_eb_per_mb,coop_eb_per_mb,bmk_goodput_mbps,"
  "coop_goodput_mbps,bmk_energy_per_node_j,coop_energy_per_node_j,gain";
inline constexpr std::string_view kFailedHeader = "plan,axis,area,n_total,n_class_a,axis_value,error";

inline std::string sweep_rows(const SweepResult& s)
{
  std::string out = std::string(kSweepHeader) + "\n";
  for (const auto& r : s.points) {
    const auto& g = r.gain;
    out += text::join_csv(csv::quote(s.plan.name), std::string(to_string(s.plan.axis)), format_area(r.point.area),
                          r.point.n_total, r.point.n_class_a, r.point.axis_value, g.benchmark.runs,
                          g.benchmark.eb_per_mb, g.cooperative.eb_per_mb, g.benchmark.goodput_mbps,
                          g.cooperative.goodput_mbps, r.benchmark_energy_per_node_j, r.cooperative_energy_per_node_j,
                          g.gain);
  }
  return out;
}

inline std::string failed_rows(const SweepResult& s)
{
  std::string out = std::string(kFailedHeader) + "\n";
  for (const auto& f : s.failed)
    out += text::join_csv(csv::quote(s.plan.name), std::string(to_string(s.plan.axis)), format_area(f.point.area),
                          f.point.n_total, f.point.n_class_a, f.point.axis_value, csv::quote(f.error));
  return out;
}

// ---- report ----

struct SweepRow
{
  std::string plan;
  Axis axis = Axis::CbrRate;
  Area area;
  std::size_t n_total = 0;
  std::size_t n_class_a = 0;
  double axis_value = 0;
  std::size_t runs = 0;
  double bmk_eb_per_mb = 0;
  double coop_eb_per_mb = 0;
  double bmk_goodput_mbps = 0;
  double coop_goodput_mbps = 0;
  double bmk_energy_per_node_j = 0;
  double coop_energy_per_node_j = 0;
  double gain = 0;
};

inline std::vector<SweepRow> parse_sweep_csv(std::string_view doc, const std::string& source = "sweep")
{
  auto all = text::lines(doc);
  if (all.empty())
    throw SchemaError(source + ": empty file, expected header '" + std::string(kSweepHeader) + "'");
  auto header = text::trim(all[0]);
  if (header != kSweepHeader)
    throw SchemaError(source + ":1: header does not match the sweep schema");
  std::vector<SweepRow> rows;
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (text::trim(all[i]).empty())
      continue;
    const std::string where = source + ":" + std::to_string(i + 1) + ": ";
    auto f = csv::parse_record(all[i]);
    if (f.size() != 14)
      throw SchemaError(where + "expected 14 fields, got " + std::to_string(f.size()));
    auto num = [&](std::size_t k) {
      auto v = text::parse_double(f[k]);
      if (!v)
        throw SchemaError(where + "field " + std::to_string(k + 1) + " is not a number");
      return *v;
    };
    auto count = [&](std::size_t k) {
      auto v = text::parse_uint(f[k]);
      if (!v)
        throw SchemaError(where + "field " + std::to_string(k + 1) + " is not a count");
      return static_cast<std::size_t>(*v);
    };
    SweepRow r;
    r.plan = f[0];
    auto axis = parse_axis(f[1]);
    if (!axis)
      throw SchemaError(where + "unknown axis '" + f[1] + "'");
    r.axis = *axis;
    auto area = parse_area(f[2]);
    if (!area)
      throw SchemaError(where + "bad area '" + f[2] + "'");
    r.area = *area;
    r.n_total = count(3);
    r.n_class_a = count(4);
    r.axis_value = num(5);
    r.runs = count(6);
    r.bmk_eb_per_mb = num(7);
    r.coop_eb_per_mb = num(8);
    r.bmk_goodput_mbps = num(9);
    r.coop_goodput_mbps = num(10);
    r.bmk_energy_per_node_j = num(11);
    r.coop_energy_per_node_j = num(12);
    r.gain = num(13);
    rows.push_back(std::move(r));
  }
  if (rows.empty())
    throw SchemaError(source + ": no data rows");
  return rows;
}

struct PlotSeries
{
  std::string file_name; // suggested .dat name
  std::string title;
  std::vector<std::pair<double, double>> points; // axis value, gain
};

struct Report
{
  std::string summary;
  std::vector<PlotSeries> series;
  std::optional<SweepRow> best; // highest gain over every input row
};

inline std::string series_title(const SweepRow& r)
{
  std::string t = "class_a " + std::to_string(r.n_class_a);
  if (r.axis != Axis::NodeCount)
    t += ", nodes " + std::to_string(r.n_total);
  return t;
}

inline std::string axis_label(Axis a)
{
  switch (a) {
    case Axis::NodeCount: return "n_total";
    case Axis::CbrRate: return "cbr_rate";
    case Axis::MeanSpeed: return "mean_speed";
  }
  return "axis";
}

inline std::string fixed(double v, int digits = 4)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

/// Gain summary per plan and area, the peak of each series, and the
/// overall maximum. Rows keep file order inside each series.
inline Report build_report(const std::vector<SweepRow>& rows)
{
  Report rep;
  using SeriesKey = std::tuple<std::string, std::string, std::size_t, std::size_t>;
  std::vector<std::string> plan_order;
  std::map<std::string, std::vector<std::string>> area_order;
  std::map<std::tuple<std::string, std::string>, std::vector<SeriesKey>> series_order;
  std::map<SeriesKey, std::vector<const SweepRow*>> series;
  for (const auto& r : rows) {
    const std::string area = format_area(r.area);
    const std::size_t fixed_nodes = r.axis == Axis::NodeCount ? 0 : r.n_total;
    SeriesKey key{r.plan, area, r.n_class_a, fixed_nodes};
    if (std::find(plan_order.begin(), plan_order.end(), r.plan) == plan_order.end())
      plan_order.push_back(r.plan);
    auto& areas = area_order[r.plan];
    if (std::find(areas.begin(), areas.end(), area) == areas.end())
      areas.push_back(area);
    auto& keys = series_order[{r.plan, area}];
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      keys.push_back(key);
    series[key].push_back(&r);
    if (!rep.best || r.gain > rep.best->gain)
      rep.best = r;
  }

  std::string& out = rep.summary;
  for (const auto& plan : plan_order) {
    const Axis axis = series[series_order[{plan, area_order[plan].front()}].front()].front()->axis;
    out += "plan " + plan + " (axis " + std::string(to_string(axis)) + ")\n";
    for (const auto& area : area_order[plan]) {
      out += "  area " + area + "\n";
      for (const auto& key : series_order[{plan, area}]) {
        const auto& pts = series[key];
        out += "    " + series_title(*pts.front()) + "\n";
        out += "      " + axis_label(axis) + "  gain  bmk_goodput  coop_goodput\n";
        const SweepRow* peak = pts.front();
        PlotSeries ps;
        ps.title = plan + " " + area + " " + series_title(*pts.front());
        ps.file_name = plan + "_" + area + "_a" + std::to_string(std::get<2>(key));
        if (axis != Axis::NodeCount)
          ps.file_name += "_n" + std::to_string(std::get<3>(key));
        ps.file_name += ".dat";
        for (const auto* r : pts) {
          out += "      " + text::format_double(r->axis_value) + "  " + fixed(r->gain) + "  " +
                 fixed(r->bmk_goodput_mbps, 2) + "  " + fixed(r->coop_goodput_mbps, 2) + "\n";
          if (r->gain > peak->gain)
            peak = r;
          ps.points.emplace_back(r->axis_value, r->gain);
        }
        out += "      peak: " + axis_label(axis) + " = " + text::format_double(peak->axis_value) + ", gain " +
               fixed(peak->gain) + "\n";
        rep.series.push_back(std::move(ps));
      }
    }
  }
  const auto& b = *rep.best;
  out += "max gain " + fixed(b.gain) + " (plan " + b.plan + ", area " + format_area(b.area) + ", class_a " +
         std::to_string(b.n_class_a) + ", " + axis_label(b.axis) + " " + text::format_double(b.axis_value) + ")\n";
  return rep;
}

/// Two-column plot data: axis value and gain.
inline std::string plot_data(const PlotSeries& s)
{
  std::string out = "# " + s.title + "\n";
  for (const auto& [x, y] : s.points)
    out += text::format_double(x) + " " + text::format_double(y) + "\n";
  return out;
}

} // namespace cesr

#endif // CESR_EXPERIMENT_HPP
