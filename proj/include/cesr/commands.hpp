#ifndef CESR_COMMANDS_HPP
#define CESR_COMMANDS_HPP

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cesr/config.hpp"
#include "cesr/csv.hpp"
#include "cesr/error.hpp"
#include "cesr/experiment.hpp"
#include "cesr/metrics.hpp"
#include "cesr/scenario.hpp"
#include "cesr/sim.hpp"

namespace cesr {

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitInvalid = 2 };

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error("cannot write " + path.string());
  out << content;
  if (!out)
    throw Error("write failed for " + path.string());
}

inline std::ofstream open_trace(const std::filesystem::path& path, std::string_view header)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error("cannot write " + path.string());
  out << header << "\n";
  return out;
}

inline std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void make_dir(const std::filesystem::path& dir)
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw Error("cannot create " + dir.string() + ": " + ec.message());
}

/// Maps an exception to an exit code and prints it.
inline int report_error(std::ostream& err, const std::exception& e)
{
  err << "error: " << e.what() << "\n";
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ExhaustedAttempts*>(&e) ||
      dynamic_cast<const InvalidArgument*>(&e) || dynamic_cast<const SchemaError*>(&e))
    return kExitInvalid;
  return kExitRuntime;
}

} // namespace detail

struct GenerateOptions
{
  Area area{60, 20};
  std::size_t nodes = 10;
  std::size_t class_a = 2;
  double tx_range = 20;
  std::uint32_t max_attempts = 10000;
  std::uint64_t seed = 1;
  std::string out_path;
};

inline int cmd_generate(const GenerateOptions& o, std::ostream& log, std::ostream& err)
{
  try {
    ScenarioRequest req{o.area, o.nodes, o.class_a, o.tx_range, o.max_attempts};
    Scenario s = generate_scenario(req, o.seed);
    if (o.out_path.empty() || o.out_path == "-") {
      log << serialize(s);
    } else {
      detail::write_file(o.out_path, serialize(s));
      log << "wrote " << o.out_path << " (" << s.size() << " nodes, " << s.attempts << " attempts)\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return detail::report_error(err, e);
  }
}

struct RunOptions
{
  std::string config_path;
  std::string scenario_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed; // overrides master_seed
  bool trace = false;
  bool mobility_trace = false;
};

/// Runs every configured mode and run on one scenario and writes, per mode,
/// runs_<mode>.csv, aggregate_<mode>.csv and ledger_<mode>.csv, plus
/// report.csv. Optional traces go to trace_routing_run<k>.csv and
/// trace_mobility_run<k>.csv.
inline int cmd_run(const RunOptions& o, std::ostream& log, std::ostream& err)
{
  namespace fs = std::filesystem;
  try {
    RunConfig cfg = read_run_config(o.config_path);
    if (o.seed)
      cfg.sim.master_seed = *o.seed;
    Scenario scenario = read_scenario(o.scenario_path);
    if (scenario.tx_range != cfg.sim.tx_range)
      throw ConfigError("tx_range",
                        "config uses " + text::format_double(cfg.sim.tx_range) + " m but the scenario was built for " +
                          text::format_double(scenario.tx_range) + " m",
                        0, o.config_path);
    const fs::path dir = o.out_dir;
    detail::make_dir(dir);

    const Mode trace_mode = cfg.has(Mode::Cooperative) ? Mode::Cooperative : Mode::Benchmark;
    std::vector<csv::ReportRow> rows;
    std::optional<EfficiencyReport> bmk;
    std::string metric_error;
    for (Mode mode : cfg.modes) {
      SimConfig sim = cfg.sim;
      sim.mode = mode;
      std::vector<RunStats> runs;
      for (std::uint32_t r = 0; r < sim.runs; ++r) {
        const std::string suffix = "_run" + std::to_string(r) + ".csv";
        const bool traced = mode == trace_mode;
        std::ofstream routing;
        std::ofstream mobility;
        TraceSinks sinks;
        if (traced && o.trace && mode == Mode::Cooperative) {
          routing = detail::open_trace(dir / ("trace_routing" + suffix), csv::kRoutingTraceHeader);
          sinks.routing = &routing;
        }
        if (traced && o.mobility_trace) {
          mobility = detail::open_trace(dir / ("trace_mobility" + suffix), csv::kMobilityTraceHeader);
          sinks.mobility = &mobility;
        }
        runs.push_back(run(sim, scenario, r, sinks));
        if ((sinks.routing && !routing.flush()) || (sinks.mobility && !mobility.flush()))
          throw Error("trace write failed");
      }
      const std::string name(to_string(mode));
      detail::write_file(dir / ("runs_" + name + ".csv"), csv::run_rows(runs));
      detail::write_file(dir / ("aggregate_" + name + ".csv"), csv::aggregate_rows(runs));
      detail::write_file(dir / ("ledger_" + name + ".csv"), csv::ledger_rows(runs, sim.power));
      log << name << ": " << runs.size() << " runs\n";

      try {
        csv::ReportRow row{cfg.label, mode, energy_efficiency(runs), std::nullopt};
        if (mode == Mode::Benchmark)
          bmk = row.efficiency;
        else if (bmk)
          row.gain = gain(*bmk, row.efficiency).gain;
        rows.push_back(row);
      } catch (const ZeroDelivery& e) {
        metric_error = std::string(name) + ": " + e.what();
      }
    }
    detail::write_file(dir / "report.csv", csv::report_rows(rows));
    for (const auto& row : rows) {
      log << to_string(row.mode) << ": " << text::format_double(row.efficiency.eb_per_mb) << " J/Mb, "
          << text::format_double(row.efficiency.goodput_mbps) << " Mb/s";
      if (row.gain)
        log << ", gain " << text::format_double(*row.gain);
      log << "\n";
    }
    if (!metric_error.empty()) {
      err << "error: " << metric_error << "\n";
      return kExitRuntime;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return detail::report_error(err, e);
  }
}

struct SweepOptions
{
  std::string plan_path;
  std::string out_dir = ".";
  unsigned parallel = 1;
  std::optional<std::uint64_t> seed; // overrides master_seed
};

/// Writes <name>.csv with one row per point, and <name>_failed.csv when any
/// point failed.
inline int cmd_sweep(const SweepOptions& o, std::ostream& log, std::ostream& err)
{
  namespace fs = std::filesystem;
  try {
    ExperimentPlan plan = read_plan(o.plan_path);
    if (o.seed)
      plan.base.sim.master_seed = *o.seed;
    const fs::path dir = o.out_dir;
    detail::make_dir(dir);
    SweepResult result = sweep(plan, o.parallel);
    const fs::path csv_path = dir / (plan.name + ".csv");
    const fs::path failed_path = dir / (plan.name + "_failed.csv");
    detail::write_file(csv_path, sweep_rows(result));
    log << "wrote " << csv_path.string() << " (" << result.points.size() << " points)\n";
    if (result.failed.empty()) {
      std::error_code ec;
      fs::remove(failed_path, ec);
      return kExitOk;
    }
    detail::write_file(failed_path, failed_rows(result));
    err << "error: " << result.failed.size() << " point(s) failed, see " << failed_path.string() << "\n";
    for (const auto& f : result.failed)
      err << "  " << format_area(f.point.area) << " n=" << f.point.n_total << " a=" << f.point.n_class_a << " "
          << to_string(plan.axis) << "=" << text::format_double(f.point.axis_value) << ": " << f.error << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    return detail::report_error(err, e);
  }
}

struct ReportOptions
{
  std::vector<std::string> sweep_paths;
  std::string out_dir; // empty: summary only
};

/// Prints the gain summary. With an output directory, also writes
/// summary.txt and one .dat file per series.
inline int cmd_report(const ReportOptions& o, std::ostream& log, std::ostream& err)
{
  namespace fs = std::filesystem;
  try {
    if (o.sweep_paths.empty())
      throw InvalidArgument("no sweep CSV given");
    std::vector<SweepRow> rows;
    for (const auto& path : o.sweep_paths) {
      auto part = parse_sweep_csv(detail::read_file(path), path);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    Report rep = build_report(rows);
    log << rep.summary;
    if (!o.out_dir.empty()) {
      const fs::path dir = o.out_dir;
      detail::make_dir(dir);
      detail::write_file(dir / "summary.txt", rep.summary);
      for (const auto& s : rep.series)
        detail::write_file(dir / s.file_name, plot_data(s));
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return detail::report_error(err, e);
  }
}

} // namespace cesr

#endif // CESR_COMMANDS_HPP
