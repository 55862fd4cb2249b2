#ifndef CESR_CSV_HPP
#define CESR_CSV_HPP

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cesr/energy.hpp"
#include "cesr/error.hpp"
#include "cesr/metrics.hpp"
#include "cesr/sim.hpp"
#include "cesr/text.hpp"

namespace cesr::csv {

inline constexpr std::string_view kRunHeader =
  "run_index,node_id,class,generated_pkts,delivered_mbits,dropped_pkts,hops_mean,energy_lr_j,energy_sr_j,"
  "energy_total_j";
inline constexpr std::string_view kAggregateHeader = "run_index,goodput_mbps,system_energy_j,eb_per_mb";
inline constexpr std::string_view kLedgerHeader = "run_index,node_id,iface,state,seconds,joules";
inline constexpr std::string_view kReportHeader = "config_label,mode,runs,eb_per_mb,goodput_mbps,gain_vs_benchmark";
inline constexpr std::string_view kRoutingTraceHeader = "time,node_id,decision,next_hop,eq1_cost,lr_cost";
inline constexpr std::string_view kMobilityTraceHeader = "time,node_id,x,y";

/// Quotes a field when it holds a separator, quote or newline.
inline std::string quote(std::string_view field)
{
  if (field.find_first_of(",\"\n\r") == std::string_view::npos)
    return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + "\"";
}

/// Splits one CSV record, honoring double-quoted fields.
inline std::vector<std::string> parse_record(std::string_view line)
{
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (quoted)
    throw SchemaError("unterminated quoted field");
  out.push_back(std::move(cur));
  return out;
}

/// One row per node per run.
inline std::string run_rows(std::span<const RunStats> runs)
{
  std::string out = std::string(kRunHeader) + "\n";
  for (const auto& r : runs)
    for (const auto& n : r.nodes)
      out += text::join_csv(r.run_index, n.node_id, std::string(1, class_letter(n.cls)), n.generated_pkts,
                            n.delivered_mbits, n.dropped_pkts(), n.hops_mean(), n.energy_lr_j, n.energy_sr_j,
                            n.energy_total_j());
  return out;
}

inline std::string aggregate_rows(std::span<const RunStats> runs)
{
  std::string out = std::string(kAggregateHeader) + "\n";
  for (const auto& r : runs) {
    const double energy = r.total_energy_j();
    const double mbits = r.delivered_mbits();
    std::string eb = mbits > 0 ? text::format_double(energy / mbits) : "";
    out += text::join_csv(r.run_index, r.goodput_mbps(), energy, eb);
  }
  return out;
}

/// Per node, per interface, per state: seconds and the joules they cost.
inline std::string ledger_rows(std::span<const RunStats> runs, const PowerProfiles& power)
{
  std::string out = std::string(kLedgerHeader) + "\n";
  for (const auto& r : runs) {
    for (const auto& n : r.nodes) {
      for (auto k : kInterfaces) {
        const bool enabled = k == InterfaceKind::LongRange || n.sr_enabled;
        for (auto s : kRadioStates) {
          const double sec = n.seconds[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)];
          const double joules = enabled ? sec * power.of(k).watts(s) : 0.0;
          out += text::join_csv(r.run_index, n.node_id, std::string(to_string(k)), std::string(to_string(s)), sec,
                                joules);
        }
      }
    }
  }
  return out;
}

struct ReportRow
{
  std::string label;
  Mode mode = Mode::Cooperative;
  EfficiencyReport efficiency;
  std::optional<double> gain; // set on the cooperative row when both modes ran
};

inline std::string report_rows(std::span<const ReportRow> rows)
{
  std::string out = std::string(kReportHeader) + "\n";
  for (const auto& row : rows) {
    std::string gain = row.gain ? text::format_double(*row.gain) : "";
    out += text::join_csv(quote(row.label), std::string(to_string(row.mode)), row.efficiency.runs,
                          row.efficiency.eb_per_mb, row.efficiency.goodput_mbps, gain);
  }
  return out;
}

} // namespace cesr::csv

#endif // CESR_CSV_HPP
