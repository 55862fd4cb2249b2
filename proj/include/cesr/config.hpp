#ifndef CESR_CONFIG_HPP
#define CESR_CONFIG_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cesr/error.hpp"
#include "cesr/mobility.hpp"
#include "cesr/sim.hpp"
#include "cesr/text.hpp"

namespace cesr {

// Config and plan files are plain text, one "key = value" per line. Blank
// lines and anything after '#' are ignored. Keys are case-sensitive, may
// appear at most once, and unknown keys are rejected. List values are
// comma-separated.

struct ConfigEntry
{
  std::string key;
  std::string value;
  int line = 0;
};

class ConfigDoc
{
public:
  static ConfigDoc parse(std::string_view doc, const std::string& source)
  {
    ConfigDoc out;
    out.source_ = source;
    auto all = text::split(doc, '\n');
    for (std::size_t i = 0; i < all.size(); ++i) {
      const int line = static_cast<int>(i + 1);
      std::string_view raw = all[i];
      if (auto hash = raw.find('#'); hash != std::string_view::npos)
        raw = raw.substr(0, hash);
      raw = text::trim(raw);
      if (raw.empty())
        continue;
      auto eq = raw.find('=');
      if (eq == std::string_view::npos)
        throw ConfigError("", "expected 'key = value'", line, source);
      std::string key(text::trim(raw.substr(0, eq)));
      std::string value(text::trim(raw.substr(eq + 1)));
      if (key.empty() || !std::all_of(key.begin(), key.end(), valid_key_char))
        throw ConfigError(key, "malformed key", line, source);
      if (value.empty())
        throw ConfigError(key, "missing value", line, source);
      if (out.find(key))
        throw ConfigError(key, "duplicate key", line, source);
      out.entries_.push_back({std::move(key), std::move(value), line});
    }
    return out;
  }

  static ConfigDoc read(const std::string& path)
  {
    std::ifstream in(path, std::ios::binary);
    if (!in)
      throw Error("cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
  }

  const ConfigEntry* find(std::string_view key) const
  {
    for (const auto& e : entries_)
      if (e.key == key)
        return &e;
    return nullptr;
  }

  int line_of(std::string_view key) const
  {
    const auto* e = find(key);
    return e ? e->line : 0;
  }

  const std::vector<ConfigEntry>& entries() const { return entries_; }
  const std::string& source() const { return source_; }

  /// Attaches file position to an error raised for a key of this document.
  ConfigError locate(const ConfigError& e) const { return e.at(line_of(e.field()), source_); }

private:
  static bool valid_key_char(char c)
  {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.';
  }

  std::string source_;
  std::vector<ConfigEntry> entries_;
};

namespace detail {

inline double to_double(const ConfigEntry& e)
{
  auto v = text::parse_double(e.value);
  if (!v || !std::isfinite(*v))
    throw ConfigError(e.key, "expected a number, got '" + e.value + "'");
  return *v;
}

inline std::uint64_t to_uint(const ConfigEntry& e)
{
  auto v = text::parse_uint(e.value);
  if (!v)
    throw ConfigError(e.key, "expected a non-negative integer, got '" + e.value + "'");
  return *v;
}

inline std::uint32_t to_u32(const ConfigEntry& e)
{
  auto v = to_uint(e);
  if (v > 0xFFFFFFFFu)
    throw ConfigError(e.key, "value too large");
  return static_cast<std::uint32_t>(v);
}

inline bool to_bool(const ConfigEntry& e)
{
  auto v = text::parse_bool(e.value);
  if (!v)
    throw ConfigError(e.key, "expected true or false, got '" + e.value + "'");
  return *v;
}

inline std::vector<std::string> to_list(const ConfigEntry& e)
{
  std::vector<std::string> out;
  for (auto part : text::split(e.value, ',')) {
    auto t = text::trim(part);
    if (t.empty())
      throw ConfigError(e.key, "empty list item");
    out.emplace_back(t);
  }
  return out;
}

inline Mode to_mode(const std::string& s, const std::string& key)
{
  if (s == "benchmark")
    return Mode::Benchmark;
  if (s == "cooperative")
    return Mode::Cooperative;
  throw ConfigError(key, "mode must be benchmark or cooperative, got '" + s + "'");
}

} // namespace detail

/// Simulation settings plus the modes to run.
struct RunConfig
{
  std::string label = "run";
  SimConfig sim;
  std::vector<Mode> modes{Mode::Benchmark, Mode::Cooperative};
  bool speed_stddev_given = false; // false: speed_stddev follows mean_speed

  bool has(Mode m) const { return std::find(modes.begin(), modes.end(), m) != modes.end(); }
};

using FieldSetter = std::function<void(RunConfig&, const ConfigEntry&)>;

/// Every key accepted in a run config, with the setter that applies it.
inline const std::map<std::string, FieldSetter, std::less<>>& run_config_fields()
{
  using namespace detail;
  static const std::map<std::string, FieldSetter, std::less<>> fields = {
    {"label", [](RunConfig& c, const ConfigEntry& e) { c.label = e.value; }},
    {"modes",
     [](RunConfig& c, const ConfigEntry& e) {
       c.modes.clear();
       for (const auto& m : to_list(e)) {
         Mode mode = to_mode(m, e.key);
         if (c.has(mode))
           throw ConfigError(e.key, "mode listed twice");
         c.modes.push_back(mode);
       }
       std::sort(c.modes.begin(), c.modes.end());
     }},
    {"duration", [](RunConfig& c, const ConfigEntry& e) { c.sim.duration = to_double(e); }},
    {"runs", [](RunConfig& c, const ConfigEntry& e) { c.sim.runs = to_u32(e); }},
    {"beacon_period", [](RunConfig& c, const ConfigEntry& e) { c.sim.beacon_period = to_double(e); }},
    {"table_timeout", [](RunConfig& c, const ConfigEntry& e) { c.sim.table_timeout = to_double(e); }},
    {"table_sweep_interval", [](RunConfig& c, const ConfigEntry& e) { c.sim.table_sweep_interval = to_double(e); }},
    {"cbr_rate", [](RunConfig& c, const ConfigEntry& e) { c.sim.cbr_rate = to_double(e); }},
    {"packet_size", [](RunConfig& c, const ConfigEntry& e) { c.sim.packet_size = to_u32(e); }},
    {"beacon_size", [](RunConfig& c, const ConfigEntry& e) { c.sim.beacon_size = to_u32(e); }},
    {"tx_range", [](RunConfig& c, const ConfigEntry& e) { c.sim.tx_range = to_double(e); }},
    {"hop_budget", [](RunConfig& c, const ConfigEntry& e) { c.sim.hop_budget = to_u32(e); }},
    {"uplink_queue_cap", [](RunConfig& c, const ConfigEntry& e) { c.sim.uplink_queue_cap = to_u32(e); }},
    {"sr_queue_cap", [](RunConfig& c, const ConfigEntry& e) { c.sim.sr_queue_cap = to_u32(e); }},
    {"master_seed", [](RunConfig& c, const ConfigEntry& e) { c.sim.master_seed = to_uint(e); }},
    {"class_a_generates", [](RunConfig& c, const ConfigEntry& e) { c.sim.class_a_generates = to_bool(e); }},
    {"beacon_energy_counted", [](RunConfig& c, const ConfigEntry& e) { c.sim.beacon_energy_counted = to_bool(e); }},
    {"sr_rate", [](RunConfig& c, const ConfigEntry& e) { c.sim.rates.sr_rate = to_double(e); }},
    {"lr_rate_class_a", [](RunConfig& c, const ConfigEntry& e) { c.sim.rates.lr_rate_class_a = to_double(e); }},
    {"lr_rate_class_b", [](RunConfig& c, const ConfigEntry& e) { c.sim.rates.lr_rate_class_b = to_double(e); }},
    {"sr_power_tx", [](RunConfig& c, const ConfigEntry& e) { c.sim.power.short_range.tx_w = to_double(e); }},
    {"sr_power_rx", [](RunConfig& c, const ConfigEntry& e) { c.sim.power.short_range.rx_w = to_double(e); }},
    {"sr_power_idle", [](RunConfig& c, const ConfigEntry& e) { c.sim.power.short_range.idle_w = to_double(e); }},
    {"lr_power_tx", [](RunConfig& c, const ConfigEntry& e) { c.sim.power.long_range.tx_w = to_double(e); }},
    {"lr_power_rx", [](RunConfig& c, const ConfigEntry& e) { c.sim.power.long_range.rx_w = to_double(e); }},
    {"lr_power_idle", [](RunConfig& c, const ConfigEntry& e) { c.sim.power.long_range.idle_w = to_double(e); }},
    {"mobility.mean_speed", [](RunConfig& c, const ConfigEntry& e) { c.sim.mobility->mean_speed = to_double(e); }},
    {"mobility.alpha", [](RunConfig& c, const ConfigEntry& e) { c.sim.mobility->alpha = to_double(e); }},
    {"mobility.speed_stddev",
     [](RunConfig& c, const ConfigEntry& e) {
       c.sim.mobility->speed_stddev = to_double(e);
       c.speed_stddev_given = true;
     }},
    {"mobility.direction_stddev",
     [](RunConfig& c, const ConfigEntry& e) { c.sim.mobility->direction_stddev = to_double(e); }},
    {"mobility.update_interval",
     [](RunConfig& c, const ConfigEntry& e) { c.sim.mobility->update_interval = to_double(e); }},
  };
  return fields;
}

/// Sets the mean speed, keeping the speed spread proportional unless it was
/// given explicitly.
inline void set_mean_speed(RunConfig& c, double mean_speed)
{
  if (!c.sim.mobility)
    c.sim.mobility = MobilityParams::walking(mean_speed);
  c.sim.mobility->mean_speed = mean_speed;
  if (!c.speed_stddev_given)
    c.sim.mobility->speed_stddev = MobilityParams::walking(mean_speed).speed_stddev;
}

/// Applies the run keys of doc, skipping keys listed in extra (those belong
/// to the caller). Any other unknown key is an error.
inline RunConfig apply_run_keys(const ConfigDoc& doc, const std::vector<std::string_view>& extra = {})
{
  const auto& fields = run_config_fields();
  RunConfig c;
  const ConfigEntry* mean_speed = doc.find("mobility.mean_speed");
  bool any_mobility = false;
  for (const auto& e : doc.entries())
    any_mobility = any_mobility || e.key.starts_with("mobility.");
  if (any_mobility) {
    if (!mean_speed)
      throw ConfigError("mobility.mean_speed", "required when any mobility key is set", 0, doc.source());
    try {
      c.sim.mobility = MobilityParams::walking(detail::to_double(*mean_speed));
    } catch (const ConfigError& err) {
      throw doc.locate(err);
    }
  }
  for (const auto& e : doc.entries()) {
    if (std::find(extra.begin(), extra.end(), e.key) != extra.end())
      continue;
    auto it = fields.find(e.key);
    if (it == fields.end())
      throw ConfigError(e.key, "unknown key", e.line, doc.source());
    try {
      it->second(c, e);
    } catch (const ConfigError& err) {
      throw ConfigError(err.field(), err.message(), e.line, doc.source());
    }
  }
  if (any_mobility && !c.speed_stddev_given)
    c.sim.mobility->speed_stddev = MobilityParams::walking(c.sim.mobility->mean_speed).speed_stddev;
  if (c.modes.empty())
    throw ConfigError("modes", "at least one mode is required", doc.line_of("modes"), doc.source());
  try {
    c.sim.validate();
  } catch (const ConfigError& err) {
    throw doc.locate(err);
  }
  return c;
}

inline RunConfig parse_run_config(std::string_view text, const std::string& source = "config")
{
  return apply_run_keys(ConfigDoc::parse(text, source));
}

inline RunConfig read_run_config(const std::string& path)
{
  return apply_run_keys(ConfigDoc::read(path));
}

} // namespace cesr

#endif // CESR_CONFIG_HPP
