#ifndef CESR_METRICS_HPP
#define CESR_METRICS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "cesr/error.hpp"
#include "cesr/rng.hpp"
#include "cesr/sim.hpp"

namespace cesr {

struct RunEfficiency
{
  std::uint32_t run_index = 0;
  std::uint64_t run_key = 0; // identifies scenario + per-run seed
  double energy_j = 0;
  double delivered_mbits = 0;
  double eb_per_mb = 0;
  double goodput_mbps = 0;
};

struct EfficiencyReport
{
  std::size_t runs = 0;
  double eb_per_mb = 0;    // J/Mb, mean of per-run ratios
  double goodput_mbps = 0; // mean aggregate goodput
  std::vector<RunEfficiency> per_run;
};

struct GainReport
{
  EfficiencyReport benchmark;
  EfficiencyReport cooperative;
  double gain = 0; // 1 - coop/bmk; negative when cooperation costs more per bit
};

inline std::uint64_t run_key(const RunStats& r)
{
  return derive_seed(r.scenario_seed, r.run_seed);
}

/// Mean over runs of (energy of all nodes) / (Mbits received at the BS).
/// A run with nothing delivered aborts the metric.
inline EfficiencyReport energy_efficiency(std::span<const RunStats> runs)
{
  if (runs.empty())
    throw InvalidArgument("energy_efficiency needs at least one run");
  EfficiencyReport rep;
  rep.runs = runs.size();
  double ratio_sum = 0;
  double goodput_sum = 0;
  for (const auto& r : runs) {
    RunEfficiency e;
    e.run_index = r.run_index;
    e.run_key = run_key(r);
    e.energy_j = r.total_energy_j();
    e.delivered_mbits = r.delivered_mbits();
    if (!(e.delivered_mbits > 0))
      throw ZeroDelivery(r.run_index);
    e.eb_per_mb = e.energy_j / e.delivered_mbits;
    e.goodput_mbps = r.goodput_mbps();
    ratio_sum += e.eb_per_mb;
    goodput_sum += e.goodput_mbps;
    rep.per_run.push_back(e);
  }
  rep.eb_per_mb = ratio_sum / static_cast<double>(runs.size());
  rep.goodput_mbps = goodput_sum / static_cast<double>(runs.size());
  return rep;
}

inline GainReport gain(const EfficiencyReport& benchmark, const EfficiencyReport& cooperative)
{
  if (benchmark.runs != cooperative.runs || benchmark.per_run.size() != cooperative.per_run.size())
    throw MismatchedRuns("benchmark and cooperative run counts differ");
  for (std::size_t i = 0; i < benchmark.per_run.size(); ++i) {
    if (benchmark.per_run[i].run_key != cooperative.per_run[i].run_key ||
        benchmark.per_run[i].run_index != cooperative.per_run[i].run_index)
      throw MismatchedRuns("run " + std::to_string(i) + " was not paired on the same scenario and seed");
  }
  if (!(benchmark.eb_per_mb > 0))
    throw InvalidArgument("benchmark efficiency must be positive");
  GainReport g;
  g.benchmark = benchmark;
  g.cooperative = cooperative;
  g.gain = 1.0 - cooperative.eb_per_mb / benchmark.eb_per_mb;
  return g;
}

} // namespace cesr

#endif // CESR_METRICS_HPP
