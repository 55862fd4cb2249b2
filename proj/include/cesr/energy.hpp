#ifndef CESR_ENERGY_HPP
#define CESR_ENERGY_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <string_view>

#include "cesr/error.hpp"

namespace cesr {

enum class InterfaceKind { ShortRange = 0, LongRange = 1 };

// No sleep state: an interface that is neither sending nor receiving idles.
enum class RadioState { Tx = 0, Rx = 1, Idle = 2 };

inline constexpr std::array<InterfaceKind, 2> kInterfaces{InterfaceKind::ShortRange, InterfaceKind::LongRange};
inline constexpr std::array<RadioState, 3> kRadioStates{RadioState::Tx, RadioState::Rx, RadioState::Idle};

inline std::string_view to_string(InterfaceKind k)
{
  return k == InterfaceKind::ShortRange ? "sr" : "lr";
}

inline std::string_view to_string(RadioState s)
{
  switch (s) {
    case RadioState::Tx: return "tx";
    case RadioState::Rx: return "rx";
    case RadioState::Idle: return "idle";
  }
  return "?";
}

/// Watts drawn in each radio state.
struct PowerProfile
{
  double tx_w = 0;
  double rx_w = 0;
  double idle_w = 0;

  double watts(RadioState s) const
  {
    switch (s) {
      case RadioState::Tx: return tx_w;
      case RadioState::Rx: return rx_w;
      case RadioState::Idle: return idle_w;
    }
    return 0;
  }
};

struct PowerProfiles
{
  PowerProfile short_range{0.890, 0.890, 0.256}; // 802.11g
  PowerProfile long_range{2.409, 1.485, 0.660};  // WiMAX

  const PowerProfile& of(InterfaceKind k) const { return k == InterfaceKind::ShortRange ? short_range : long_range; }
};

/// Energy per bit of a link in J/Mb.
struct LinkCost
{
  double value = 0;
  friend bool operator==(const LinkCost&, const LinkCost&) = default;
  friend auto operator<=>(const LinkCost&, const LinkCost&) = default;
};

/// TX power over achievable rate: W / (Mb/s) = J/Mb.
inline LinkCost energy_per_bit(double power_tx_w, double rate_mbps)
{
  if (!(rate_mbps > 0))
    throw InvalidArgument("rate must be positive");
  if (!(power_tx_w >= 0))
    throw InvalidArgument("power must be non-negative");
  return {power_tx_w / rate_mbps};
}

/// Time-in-state accounting for the two interfaces of one node. Time since
/// the last transition is credited to the state being left. A disabled
/// interface does not exist on the device and accrues nothing.
class EnergyLedger
{
public:
  explicit EnergyLedger(double start = 0.0, bool short_range_enabled = true, bool long_range_enabled = true)
  {
    tracks_[0] = {short_range_enabled, RadioState::Idle, start, {}};
    tracks_[1] = {long_range_enabled, RadioState::Idle, start, {}};
  }

  void transition(InterfaceKind iface, RadioState next, double now)
  {
    auto& t = track(iface);
    if (now < t.since)
      throw TimeRegression(t.since, now);
    if (!t.enabled)
      return;
    t.seconds[index(t.state)] += now - t.since;
    t.since = now;
    t.state = next;
  }

  /// Credits all pending time up to now without changing states.
  void close(double now)
  {
    for (auto k : kInterfaces)
      transition(k, state(k), now);
  }

  double seconds(InterfaceKind iface, RadioState s) const { return track(iface).seconds[index(s)]; }

  double elapsed(InterfaceKind iface) const
  {
    const auto& t = track(iface);
    return t.seconds[0] + t.seconds[1] + t.seconds[2];
  }

  RadioState state(InterfaceKind iface) const { return track(iface).state; }
  bool enabled(InterfaceKind iface) const { return track(iface).enabled; }
  double last_transition(InterfaceKind iface) const { return track(iface).since; }

private:
  struct Track
  {
    bool enabled = true;
    RadioState state = RadioState::Idle;
    double since = 0;
    std::array<double, 3> seconds{};
  };

  static std::size_t index(RadioState s) { return static_cast<std::size_t>(s); }
  Track& track(InterfaceKind k) { return tracks_[static_cast<std::size_t>(k)]; }
  const Track& track(InterfaceKind k) const { return tracks_[static_cast<std::size_t>(k)]; }

  std::array<Track, 2> tracks_{};
};

inline double interface_energy(const EnergyLedger& ledger, InterfaceKind iface, const PowerProfile& profile)
{
  if (!ledger.enabled(iface))
    return 0;
  double j = 0;
  for (auto s : kRadioStates)
    j += profile.watts(s) * ledger.seconds(iface, s);
  return j;
}

/// Joules over both interfaces. Expects a closed ledger.
inline double total_energy(const EnergyLedger& ledger, const PowerProfiles& profiles)
{
  return interface_energy(ledger, InterfaceKind::ShortRange, profiles.short_range) +
         interface_energy(ledger, InterfaceKind::LongRange, profiles.long_range);
}

} // namespace cesr

#endif // CESR_ENERGY_HPP
