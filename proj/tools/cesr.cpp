// Command-line front end: generate | run | sweep | report.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cesr/commands.hpp"

int main(int argc, char** argv)
{
  CLI::App app{"Cooperative energy saving routing simulator"};
  app.require_subcommand(1);

  cesr::GenerateOptions gen;
  std::string area = "60x20";
  auto* generate = app.add_subcommand("generate", "Generate a connected random scenario");
  generate->add_option("--area", area, "Area as WIDTHxHEIGHT in meters")->capture_default_str();
  generate->add_option("--nodes", gen.nodes, "Total number of nodes")->required();
  generate->add_option("--class-a", gen.class_a, "Number of ClassA nodes")->required();
  generate->add_option("--tx-range", gen.tx_range, "Short-range reach in meters")->capture_default_str();
  generate->add_option("--max-attempts", gen.max_attempts, "Placement attempts before giving up")
    ->capture_default_str();
  generate->add_option("--seed", gen.seed, "Placement seed")->capture_default_str();
  generate->add_option("--out", gen.out_path, "Output scenario file (stdout when omitted)");

  cesr::RunOptions run;
  std::optional<std::uint64_t> run_seed;
  auto* run_cmd = app.add_subcommand("run", "Run a config on a scenario and write CSVs");
  run_cmd->add_option("config", run.config_path, "Run config file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("scenario", run.scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", run.out_dir, "Output directory")->capture_default_str();
  run_cmd->add_option("--seed", run_seed, "Override master_seed");
  run_cmd->add_flag("--trace", run.trace, "Write the routing decision trace");
  run_cmd->add_flag("--mobility-trace", run.mobility_trace, "Write node positions per mobility step");

  cesr::SweepOptions sw;
  std::optional<std::uint64_t> sweep_seed;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run an experiment plan");
  sweep_cmd->add_option("plan", sw.plan_path, "Plan file")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--out", sw.out_dir, "Output directory")->capture_default_str();
  sweep_cmd->add_option("--parallel", sw.parallel, "Points run concurrently")
    ->capture_default_str()
    ->check(CLI::Range(1u, 1024u));
  sweep_cmd->add_option("--seed", sweep_seed, "Override master_seed");

  cesr::ReportOptions rep;
  auto* report_cmd = app.add_subcommand("report", "Summarize sweep CSVs and write plot data");
  report_cmd->add_option("sweep_csv", rep.sweep_paths, "Sweep CSV files")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--out", rep.out_dir, "Directory for summary.txt and .dat files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? cesr::kExitOk : cesr::kExitInvalid;
  }

  if (generate->parsed()) {
    auto parsed = cesr::parse_area(area);
    if (!parsed) {
      std::cerr << "error: --area must look like 60x20\n";
      return cesr::kExitInvalid;
    }
    gen.area = *parsed;
    return cesr::cmd_generate(gen, std::cout, std::cerr);
  }
  if (run_cmd->parsed()) {
    run.seed = run_seed;
    return cesr::cmd_run(run, std::cout, std::cerr);
  }
  if (sweep_cmd->parsed()) {
    sw.seed = sweep_seed;
    return cesr::cmd_sweep(sw, std::cout, std::cerr);
  }
  return cesr::cmd_report(rep, std::cout, std::cerr);
}
