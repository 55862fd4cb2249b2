#ifndef CESR_MOBILITY_HPP
#define CESR_MOBILITY_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "cesr/error.hpp"
#include "cesr/rng.hpp"
#include "cesr/scenario.hpp"

namespace cesr {

/// Gauss-Markov parameters. alpha = 1 is pure memory, alpha = 0 is
/// memoryless around the means.
struct MobilityParams
{
  double alpha = 0.5;
  double mean_speed = 0;           // m/s
  double speed_stddev = 0;         // m/s
  double direction_stddev = 0.5;   // rad
  double update_interval = 1;      // s

  /// Defaults used when only alpha and the mean speed are given.
  static MobilityParams walking(double mean_speed, double alpha = 0.5)
  {
    return {alpha, mean_speed, 0.5 * mean_speed, 0.5, 1.0};
  }
};

inline void validate(const MobilityParams& p)
{
  if (!(p.alpha >= 0 && p.alpha <= 1))
    throw ConfigError("mobility.alpha", "must lie in [0, 1]");
  if (!(p.mean_speed >= 0) || !std::isfinite(p.mean_speed))
    throw ConfigError("mobility.mean_speed", "must be >= 0");
  if (!(p.speed_stddev >= 0) || !std::isfinite(p.speed_stddev))
    throw ConfigError("mobility.speed_stddev", "must be >= 0");
  if (!(p.direction_stddev >= 0) || !std::isfinite(p.direction_stddev))
    throw ConfigError("mobility.direction_stddev", "must be >= 0");
  if (!(p.update_interval > 0) || !std::isfinite(p.update_interval))
    throw ConfigError("mobility.update_interval", "must be > 0");
}

struct MobilityState
{
  Position position;
  double speed = 0;          // m/s
  double direction = 0;      // rad, in (-pi, pi]
  double mean_direction = 0; // rad, drawn once per node
};

/// Maps an angle into (-pi, pi].
inline double wrap_angle(double a)
{
  constexpr double two_pi = 2 * std::numbers::pi;
  a = std::remainder(a, two_pi);
  if (a <= -std::numbers::pi)
    a += two_pi;
  return a;
}

/// One Gauss-Markov update. The direction recursion runs on the wrapped
/// deviation from the mean heading so it never averages across the +-pi
/// seam. The returned position is the raw step and may leave the area.
inline MobilityState gm_step(const MobilityState& s, const MobilityParams& p, Rng& rng)
{
  const double noise = std::sqrt(std::max(0.0, 1.0 - p.alpha * p.alpha));
  const double g1 = rng.gaussian();
  const double g2 = rng.gaussian();

  MobilityState next = s;
  next.speed = p.alpha * s.speed + (1 - p.alpha) * p.mean_speed + noise * p.speed_stddev * g1;
  next.speed = std::max(0.0, next.speed);
  double deviation = wrap_angle(s.direction - s.mean_direction);
  next.direction = wrap_angle(s.mean_direction + p.alpha * deviation + noise * p.direction_stddev * g2);
  next.position.x += next.speed * p.update_interval * std::cos(next.direction);
  next.position.y += next.speed * p.update_interval * std::sin(next.direction);
  return next;
}

struct Reflection
{
  Position position;
  double direction = 0;
  bool flipped_x = false;
  bool flipped_y = false;
};

namespace detail {

inline bool fold(double& v, double limit)
{
  bool flipped = false;
  while (v < 0 || v > limit) {
    v = v < 0 ? -v : 2 * limit - v;
    flipped = !flipped;
  }
  return flipped;
}

inline double mirror(double direction, bool fx, bool fy)
{
  if (fx)
    direction = std::numbers::pi - direction;
  if (fy)
    direction = -direction;
  return wrap_angle(direction);
}

} // namespace detail

/// Mirrors a position back into the area and negates the heading component
/// normal to each violated edge.
inline Reflection reflect(Position pos, double direction, const Area& area)
{
  Reflection r;
  r.flipped_x = detail::fold(pos.x, area.width);
  r.flipped_y = detail::fold(pos.y, area.height);
  r.position = pos;
  r.direction = (r.flipped_x || r.flipped_y) ? detail::mirror(direction, r.flipped_x, r.flipped_y) : direction;
  return r;
}

/// Initial state for a node at rest at pos with a uniformly drawn heading.
inline MobilityState initial_state(Position pos, const MobilityParams& p, Rng& rng)
{
  MobilityState s;
  s.position = pos;
  s.mean_direction = wrap_angle(rng.uniform(-std::numbers::pi, std::numbers::pi));
  s.direction = s.mean_direction;
  s.speed = p.mean_speed;
  return s;
}

/// gm_step then reflect, node-id order. A bounce mirrors the mean heading
/// too, otherwise mean reversion would steer the node straight back into
/// the wall.
inline std::vector<MobilityState> advance_all(const std::vector<MobilityState>& states, const MobilityParams& p,
                                              const Area& area, Rng& rng)
{
  std::vector<MobilityState> out;
  out.reserve(states.size());
  for (const auto& s : states) {
    auto raw = gm_step(s, p, rng);
    auto r = reflect(raw.position, raw.direction, area);
    raw.position = r.position;
    raw.direction = r.direction;
    if (r.flipped_x || r.flipped_y)
      raw.mean_direction = detail::mirror(raw.mean_direction, r.flipped_x, r.flipped_y);
    out.push_back(raw);
  }
  return out;
}

} // namespace cesr

#endif // CESR_MOBILITY_HPP
