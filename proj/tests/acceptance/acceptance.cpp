// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "cesr/cesr.hpp"
#include "oracles.hpp"

using namespace cesr;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome
{
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what)
  {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

int g_failures = 0;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v, int digits = 4)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void report(int id, const std::string& title, Outcome o, double elapsed)
{
  if (!o.pass)
    ++g_failures;
  std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << title << "  [" << num(elapsed, 1)
            << " s] " << o.detail << std::endl;
}

template <class F>
void check(int id, const std::string& title, F&& body)
{
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  report(id, title, o, seconds_since(t0));
}

std::string slurp(const fs::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot read " + path.string());
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void put(const fs::path& path, const std::string& content)
{
  std::ofstream(path, std::ios::binary) << content;
}

// ---- 1 ----

Outcome chain_golden()
{
  const auto t0 = Clock::now();
  Outcome o;
  oracle::CostGraph g;
  g.lr = {5, 4, 4, 3};
  g.sr.assign(4, std::vector<double>(4, oracle::kInf));
  for (std::size_t i = 0; i + 1 < 4; ++i)
    g.sr[i][i + 1] = g.sr[i + 1][i] = 0.3;
  auto states = oracle::make_states(g, 0.3);
  constexpr std::size_t B = 1, C = 2, D = 3;

  o.require(is_long_range(forward_decision(states[D], 0)), "D not LongRange before beacons");
  oracle::beacon_round(states, g, 5);
  const double c1 = advertised_cost(states[C], 5);
  o.require(std::abs(c1 - 3.3) <= 1e-12, "C after round 1 = " + text::format_double(c1));
  o.require(is_long_range(forward_decision(states[D], 5)), "D not LongRange after round 1");
  oracle::beacon_round(states, g, 10);
  const double b2 = advertised_cost(states[B], 10);
  o.require(std::abs(b2 - 3.6) <= 1e-12, "B after round 2 = " + text::format_double(b2));
  o.require(is_long_range(forward_decision(states[D], 10)), "D not LongRange after round 2");
  for (int round = 3; round <= 6; ++round) {
    oracle::beacon_round(states, g, 5.0 * round);
    o.require(is_long_range(forward_decision(states[D], 5.0 * round)), "D left LongRange");
  }
  const double t = seconds_since(t0);
  o.require(t < 1.0, "took " + num(t) + " s");
  o.note("C=" + text::format_double(c1) + " B=" + text::format_double(b2) + " D=LR");
  return o;
}

// ---- 2 ----

Outcome oracle_equivalence()
{
  const auto t0 = Clock::now();
  Outcome o;
  Rng rng(20240601);
  double worst = 0;
  int loops = 0;
  int unconverged = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 5 + static_cast<std::size_t>(rng.uniform() * 11);
    auto inst = oracle::random_instance(rng, n, 60, 40, 20);
    auto states = oracle::make_states(inst.graph, energy_per_bit(0.890, 54).value);
    auto rounds = oracle::converge(states, inst.graph, 5, n + 1);
    if (!rounds) {
      ++unconverged;
      continue;
    }
    const double now = 5.0 * static_cast<double>(*rounds);
    auto expected = oracle::min_cost_to_bs(inst.graph);
    for (std::size_t i = 0; i < n; ++i)
      worst = std::max(worst, std::abs(advertised_cost(states[i], now) - expected[i]));
    if (!oracle::chains_loop_free(states, now))
      ++loops;
  }
  const double t = seconds_since(t0);
  o.require(unconverged == 0, std::to_string(unconverged) + " instances did not converge");
  o.require(worst <= 1e-9, "max deviation " + text::format_double(worst));
  o.require(loops == 0, std::to_string(loops) + " instances with loops or long chains");
  o.require(t < 30.0, "took " + num(t) + " s");
  o.note("200 instances, max deviation " + text::format_double(worst));
  return o;
}

// ---- 3 ----

Outcome conservation()
{
  Outcome o;
  Rng rng(77);
  const Area areas[] = {{60, 20}, {100, 50}, {40, 40}};
  int time_violations = 0;
  int energy_violations = 0;
  int packet_violations = 0;
  std::size_t checked_nodes = 0;
  for (int k = 0; k < 50; ++k) {
    SimConfig c;
    c.runs = 2;
    c.duration = rng.uniform(1.0, 6.0);
    c.cbr_rate = rng.uniform() < 0.1 ? 0.0 : std::floor(rng.uniform(1, 3000));
    c.mode = rng.uniform() < 0.5 ? Mode::Benchmark : Mode::Cooperative;
    c.beacon_period = rng.uniform(0.5, 5);
    c.table_timeout = 3 * c.beacon_period;
    c.packet_size = static_cast<std::uint32_t>(rng.uniform(64, 1500));
    c.master_seed = k;
    if (rng.uniform() < 0.5)
      c.mobility = MobilityParams::walking(rng.uniform(0, 4));
    const Area area = areas[static_cast<int>(rng.uniform() * 3)];
    const auto n = static_cast<std::size_t>(2 + rng.uniform() * 11);
    const auto na = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n + 1));
    Scenario s = generate_scenario({area, n, std::min(na, n), c.tx_range, 100000}, 1000 + k);

    std::vector<RunStats> runs;
    for (std::uint32_t r = 0; r < c.runs; ++r)
      runs.push_back(run(c, s, r));

    // Recompute energy from the exported ledger alone.
    std::map<std::pair<std::string, std::string>, std::array<double, 2>> seconds; // (run,node) -> [sr, lr]
    std::map<std::pair<std::string, std::string>, double> joules;
    auto ledger = text::lines(csv::ledger_rows(runs, c.power));
    for (std::size_t i = 1; i < ledger.size(); ++i) {
      if (ledger[i].empty())
        continue;
      auto f = csv::parse_record(ledger[i]);
      const auto key = std::make_pair(f[0], f[1]);
      const bool sr = f[2] == "sr";
      const PowerProfile& p = sr ? c.power.short_range : c.power.long_range;
      const double sec = *text::parse_double(f[4]);
      const double w = f[3] == "tx" ? p.tx_w : f[3] == "rx" ? p.rx_w : p.idle_w;
      seconds[key][sr ? 0 : 1] += sec;
      joules[key] += w * sec;
    }
    auto run_csv = text::lines(csv::run_rows(runs));
    for (std::size_t i = 1; i < run_csv.size(); ++i) {
      if (run_csv[i].empty())
        continue;
      auto f = csv::parse_record(run_csv[i]);
      const auto key = std::make_pair(f[0], f[1]);
      const double total = *text::parse_double(f[9]);
      const double expected_sr = c.mode == Mode::Cooperative ? c.duration : 0.0;
      if (std::abs(seconds[key][1] - c.duration) > 1e-9 * c.duration ||
          std::abs(seconds[key][0] - expected_sr) > 1e-9 * c.duration)
        ++time_violations;
      if (std::abs(joules[key] - total) > 1e-9 * std::max(1.0, total))
        ++energy_violations;
      ++checked_nodes;
    }
    for (const auto& r : runs)
      for (const auto& nd : r.nodes)
        if (nd.generated_pkts != nd.delivered_pkts + nd.dropped_pkts() + nd.in_flight)
          ++packet_violations;
  }
  o.require(time_violations == 0, std::to_string(time_violations) + " time-conservation violations");
  o.require(energy_violations == 0, std::to_string(energy_violations) + " energy recomputation mismatches");
  o.require(packet_violations == 0, std::to_string(packet_violations) + " packet-conservation violations");
  o.note("50 configs, " + std::to_string(checked_nodes) + " node-runs");
  return o;
}

// ---- 4 ----

double benchmark_goodput(double rate)
{
  SimConfig c;
  c.mode = Mode::Benchmark;
  c.cbr_rate = rate;
  double sum = 0;
  for (std::uint32_t r = 0; r < c.runs; ++r) {
    Scenario s = generate_scenario({{60, 20}, 20, 4, c.tx_range, 10000}, derive_seed(4, r));
    sum += run(c, s, r).goodput_mbps();
  }
  return sum / c.runs;
}

Outcome saturation()
{
  const auto t0 = Clock::now();
  Outcome o;
  const double low_rates[] = {10, 20, 40, 80};
  std::vector<double> low;
  for (double r : low_rates)
    low.push_back(benchmark_goodput(r));
  const double g2000 = benchmark_goodput(2000);
  const double g3000 = benchmark_goodput(3000);

  // Linear regime: goodput per unit rate matches the lowest point within 1%.
  const double slope = low[0] / low_rates[0];
  double breakpoint = 0;
  std::size_t linear = 0;
  for (std::size_t i = 0; i < low.size(); ++i) {
    if (std::abs(low[i] / low_rates[i] - slope) <= 0.01 * slope) {
      breakpoint = low[i];
      ++linear;
    }
  }
  const double diff = std::abs(g2000 - g3000) / std::max(g2000, g3000);
  o.require(linear >= 2, "no linear regime at low rates");
  o.require(diff < 0.05, "goodput 2000 vs 3000 differs by " + num(100 * diff, 2) + "%");
  o.require(g2000 > breakpoint && g3000 > breakpoint, "saturated goodput not above the linear regime");
  const double t = seconds_since(t0);
  o.require(t < 120, "took " + num(t) + " s");
  o.note("goodput 2000=" + num(g2000, 3) + " 3000=" + num(g3000, 3) + " Mb/s, diff " + num(100 * diff, 2) +
         "%, linear up to " + num(breakpoint, 3) + " Mb/s");
  return o;
}

// ---- sweeps ----

struct SweepData
{
  fs::path csv;
  std::vector<SweepRow> rows;
  int exit_code = 0;
};

SweepData run_plan(const std::string& name, const fs::path& out, unsigned workers)
{
  SweepOptions so;
  so.plan_path = std::string(CESR_SOURCE_DIR) + "/plans/" + name + ".plan";
  so.out_dir = out.string();
  so.parallel = workers;
  std::ostringstream log, err;
  SweepData d;
  d.exit_code = cmd_sweep(so, log, err);
  d.csv = out / (name + ".csv");
  if (fs::exists(d.csv))
    d.rows = parse_sweep_csv(slurp(d.csv), d.csv.string());
  if (d.exit_code != 0)
    std::cerr << err.str();
  return d;
}

const SweepRow* find_row(const std::vector<SweepRow>& rows, const std::string& area, std::size_t class_a,
                         double value)
{
  for (const auto& r : rows)
    if (format_area(r.area) == area && r.n_class_a == class_a && r.axis_value == value)
      return &r;
  return nullptr;
}

Outcome traffic_trend(const SweepData& traffic, const fs::path& out, unsigned workers)
{
  Outcome o;
  o.require(traffic.exit_code == 0, "traffic sweep failed");
  double g3000_dense = 0;
  double g3000_sparse = 0;
  for (const char* area : {"60x20", "100x50"}) {
    const auto* lo = find_row(traffic.rows, area, 4, 500);
    const auto* hi = find_row(traffic.rows, area, 4, 3000);
    if (!lo || !hi) {
      o.require(false, std::string("missing traffic rows for ") + area);
      continue;
    }
    o.require(hi->gain > lo->gain, std::string("(a) ") + area + " gain(3000)=" + num(hi->gain) +
                                     " not above gain(500)=" + num(lo->gain));
    o.note(std::string("(a) ") + area + " gain 500=" + num(lo->gain) + " 3000=" + num(hi->gain));
    (std::string(area) == "60x20" ? g3000_dense : g3000_sparse) = hi->gain;
  }

  // (b) the plan's own points plus low-rate probes of the same setup.
  auto plan = read_plan(std::string(CESR_SOURCE_DIR) + "/plans/traffic.plan");
  plan.name = "traffic_low";
  plan.values = {50, 100};
  auto low = sweep(plan, workers);
  put(out / "traffic_low.csv", sweep_rows(low));
  double min_gain = 1;
  std::string where;
  for (const auto& r : traffic.rows)
    if (r.gain < min_gain) {
      min_gain = r.gain;
      where = format_area(r.area) + " @" + text::format_double(r.axis_value);
    }
  for (const auto& p : low.points)
    if (p.gain.gain < min_gain) {
      min_gain = p.gain.gain;
      where = format_area(p.point.area) + " @" + text::format_double(p.point.axis_value);
    }
  o.require(low.failed.empty(), "low-traffic probes failed");
  o.require(min_gain <= 0, "(b) no low-traffic configuration with gain <= 0, lowest " + num(min_gain));
  o.note("(b) lowest gain " + num(min_gain) + " at " + where + " pkts/s");

  o.require(g3000_dense >= g3000_sparse,
            "(c) gain 60x20=" + num(g3000_dense) + " below 100x50=" + num(g3000_sparse) + " at 3000");
  o.note("(c) 3000 pkts/s: 60x20=" + num(g3000_dense) + " 100x50=" + num(g3000_sparse));
  return o;
}

Outcome node_count_peak(const SweepData& nodes)
{
  Outcome o;
  o.require(nodes.exit_code == 0, "nodes sweep failed");
  std::vector<const SweepRow*> series;
  for (const auto& r : nodes.rows)
    if (format_area(r.area) == "60x20" && r.n_class_a == 2)
      series.push_back(&r);
  std::sort(series.begin(), series.end(), [](auto* a, auto* b) { return a->axis_value < b->axis_value; });
  if (series.size() < 3) {
    o.require(false, "fewer than 3 points in the 2-ClassA 60x20 series");
    return o;
  }
  double interior = -1e300;
  double at = 0;
  for (std::size_t i = 1; i + 1 < series.size(); ++i)
    if (series[i]->gain > interior) {
      interior = series[i]->gain;
      at = series[i]->axis_value;
    }
  const double first = series.front()->gain;
  const double last = series.back()->gain;
  o.require(interior > first && interior > last, "interior max " + num(interior) + " at n=" +
                                                   text::format_double(at) + " does not beat both endpoints");
  std::string curve;
  for (auto* r : series)
    curve += (curve.empty() ? "" : " ") + text::format_double(r->axis_value) + ":" + num(r->gain, 3);
  o.note("gain by n " + curve);
  return o;
}

Outcome mobility_robustness(const SweepData& mobility)
{
  Outcome o;
  o.require(mobility.exit_code == 0, "mobility sweep failed");
  double lo = 1e300;
  double hi = -1e300;
  int dense = 0;
  for (const auto& r : mobility.rows)
    if (format_area(r.area) == "60x20" && r.axis_value >= 0 && r.axis_value <= 3) {
      lo = std::min(lo, r.gain);
      hi = std::max(hi, r.gain);
      ++dense;
    }
  o.require(dense >= 2, "missing 60x20 speed points");
  o.require(hi - lo < 0.10, "60x20 gain spread " + num(100 * (hi - lo), 2) + " pp");
  o.note("60x20 gain spread " + num(100 * (hi - lo), 2) + " pp");
  const auto* s0 = find_row(mobility.rows, "100x50", 2, 0);
  const auto* s2 = find_row(mobility.rows, "100x50", 2, 2);
  if (!s0 || !s2) {
    o.require(false, "missing 100x50 rows at 0 or 2 m/s");
    return o;
  }
  o.require(s2->coop_goodput_mbps < s0->coop_goodput_mbps, "100x50 goodput at 2 m/s not below 0 m/s");
  o.note("100x50 goodput 0 m/s=" + num(s0->coop_goodput_mbps, 2) + " 2 m/s=" + num(s2->coop_goodput_mbps, 2) +
         " Mb/s");
  return o;
}

// ---- 8 ----

Outcome determinism(const fs::path& out)
{
  Outcome o;
  const fs::path dir = out / "determinism";
  fs::create_directories(dir);
  write_scenario(generate_scenario({{60, 20}, 12, 3, 20, 10000}, 8), (dir / "s.txt").string());
  put(dir / "c.cfg", "label = det\nruns = 3\nduration = 10\ncbr_rate = 2500\n"
                     "mobility.mean_speed = 1.5\nmobility.alpha = 0.5\n");
  RunOptions ro;
  ro.config_path = (dir / "c.cfg").string();
  ro.scenario_path = (dir / "s.txt").string();
  ro.trace = true;
  ro.mobility_trace = true;
  std::ostringstream log, err;
  ro.out_dir = (dir / "a").string();
  o.require(cmd_run(ro, log, err) == 0, "first run failed: " + err.str());
  ro.out_dir = (dir / "b").string();
  o.require(cmd_run(ro, log, err) == 0, "second run failed: " + err.str());
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    const auto other = dir / "b" / entry.path().filename();
    o.require(fs::exists(other), entry.path().filename().string() + " missing in second output");
    if (fs::exists(other) && slurp(entry.path()) != slurp(other))
      o.require(false, entry.path().filename().string() + " differs");
    ++files;
  }
  o.require(files >= 7, "only " + std::to_string(files) + " files written");
  o.note(std::to_string(files) + " CSV files byte-identical");
  return o;
}

// ---- 9 ----

Outcome headline(const std::vector<const SweepData*>& all, const fs::path& out)
{
  Outcome o;
  ReportOptions ro;
  double best = -1e300;
  for (const auto* d : all) {
    o.require(d->exit_code == 0, d->csv.filename().string() + " sweep failed");
    ro.sweep_paths.push_back(d->csv.string());
    for (const auto& r : d->rows)
      best = std::max(best, r.gain);
  }
  ro.out_dir = (out / "report").string();
  std::ostringstream summary, err;
  o.require(cmd_report(ro, summary, err) == 0, "report failed: " + err.str());
  o.require(best > 0 && best < 0.6, "max gain " + num(best) + " outside (0, 0.6)");
  const std::string line = "max gain " + num(best);
  const auto pos = summary.str().find(line);
  o.require(pos != std::string::npos, "report does not state '" + line + "'");
  if (pos != std::string::npos)
    o.note(summary.str().substr(pos, summary.str().find('\n', pos) - pos));
  return o;
}

} // namespace

int main()
{
  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  const fs::path out = fs::temp_directory_path() / ("cesr_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(out);
  fs::create_directories(out);
  std::cout << "output: " << out.string() << ", workers: " << workers << std::endl;

  check(1, "four-node chain golden example", chain_golden);
  check(2, "oracle equivalence on 200 static scenarios", oracle_equivalence);
  check(3, "energy and packet conservation over 50 configs", conservation);
  check(4, "benchmark goodput saturation", saturation);

  const auto t_sweeps = Clock::now();
  SweepData nodes, traffic, mobility;
  try {
    traffic = run_plan("traffic", out, workers);
    nodes = run_plan("node_count", out, workers);
    mobility = run_plan("mobility", out, workers);
  } catch (const std::exception& e) {
    std::cerr << "sweep error: " << e.what() << "\n";
  }
  std::cout << "default plans swept in " << num(seconds_since(t_sweeps), 1) << " s" << std::endl;

  check(5, "gain trend against traffic", [&] { return traffic_trend(traffic, out, workers); });
  check(6, "interior optimum in node count", [&] { return node_count_peak(nodes); });
  check(7, "mobility robustness", [&] { return mobility_robustness(mobility); });
  check(8, "determinism of cmd_run", [&] { return determinism(out); });
  check(9, "headline gain in (0, 0.6) and reported", [&] { return headline({&nodes, &traffic, &mobility}, out); });

  std::cout << (g_failures ? std::to_string(g_failures) + " criterion(s) failed" : "all criteria passed")
            << std::endl;
  return g_failures ? 1 : 0;
}
