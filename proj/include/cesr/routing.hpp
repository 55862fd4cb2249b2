#ifndef CESR_ROUTING_HPP
#define CESR_ROUTING_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "cesr/energy.hpp"
#include "cesr/error.hpp"
#include "cesr/types.hpp"

namespace cesr {

/// Periodic short-range broadcast: who I am and the cheapest J/Mb to the BS
/// through me.
struct Beacon
{
  NodeId sender = 0;
  double advertised_cost = 0; // J/Mb
  double sent_at = 0;
};

struct NeighborEntry
{
  NodeId neighbor = 0;
  double advertised_cost = 0; // J/Mb
  double last_heard = 0;
};

/// Neighbors keyed by id, kept sorted so scans run in ascending id order.
class NeighborTable
{
public:
  explicit NeighborTable(double timeout = 15.0, double beacon_period = 5.0)
    : timeout_(timeout)
    , beacon_period_(beacon_period)
  {}

  void upsert(NodeId neighbor, double cost, double now)
  {
    auto it = lower_bound(neighbor);
    if (it != entries_.end() && it->neighbor == neighbor) {
      it->advertised_cost = cost;
      it->last_heard = now;
    } else {
      entries_.insert(it, NeighborEntry{neighbor, cost, now});
    }
  }

  /// Drops every entry not heard for more than the timeout.
  void expire(double now)
  {
    std::erase_if(entries_, [&](const NeighborEntry& e) { return now - e.last_heard > timeout_; });
  }

  bool live(const NeighborEntry& e, double now) const { return now - e.last_heard <= timeout_; }

  const NeighborEntry* find(NodeId neighbor) const
  {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), neighbor,
                               [](const NeighborEntry& e, NodeId id) { return e.neighbor < id; });
    return it != entries_.end() && it->neighbor == neighbor ? &*it : nullptr;
  }

  std::span<const NeighborEntry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  double timeout() const { return timeout_; }
  double beacon_period() const { return beacon_period_; }

private:
  std::vector<NeighborEntry>::iterator lower_bound(NodeId neighbor)
  {
    return std::lower_bound(entries_.begin(), entries_.end(), neighbor,
                            [](const NeighborEntry& e, NodeId id) { return e.neighbor < id; });
  }

  std::vector<NeighborEntry> entries_;
  double timeout_;
  double beacon_period_;
};

/// Per-node protocol state: own link costs, the neighbor table and the
/// result of the last route evaluation.
struct NodeRoutingState
{
  NodeId node_id = 0;
  LinkCost lr_cost;  // own long-range J/Mb
  LinkCost sr_cost;  // short-range J/Mb to any neighbor
  std::map<NodeId, double> sr_cost_overrides; // per-neighbor exceptions
  NeighborTable table;
  double best_cost = kInfinity;
  std::optional<NodeId> best_next_hop;

  NodeRoutingState() = default;
  NodeRoutingState(NodeId id, LinkCost lr, LinkCost sr, NeighborTable t = NeighborTable{})
    : node_id(id)
    , lr_cost(lr)
    , sr_cost(sr)
    , table(std::move(t))
    , best_cost(lr.value)
  {}

  double sr_cost_to(NodeId k) const
  {
    if (!sr_cost_overrides.empty()) {
      auto it = sr_cost_overrides.find(k);
      if (it != sr_cost_overrides.end())
        return it->second;
    }
    return sr_cost.value;
  }
};

struct BestNeighbor
{
  std::optional<NodeId> neighbor;
  double cost = kInfinity;
};

struct LongRange
{
  friend bool operator==(const LongRange&, const LongRange&) = default;
};

struct ShortRange
{
  NodeId next_hop = 0;
  friend bool operator==(const ShortRange&, const ShortRange&) = default;
};

using ForwardDecision = std::variant<LongRange, ShortRange>;

inline bool is_long_range(const ForwardDecision& d)
{
  return std::holds_alternative<LongRange>(d);
}

/// Stores the beacon as the sender's entry with a fresh timestamp.
inline void handle_beacon(NodeRoutingState& state, const Beacon& beacon, double now)
{
  if (beacon.sender == state.node_id)
    throw SelfBeacon(state.node_id);
  state.table.upsert(beacon.sender, beacon.advertised_cost, now);
}

inline void expire(NeighborTable& table, double now)
{
  table.expire(now);
}

/// min over live neighbors k of sr_cost(n,k) + advertised(k). Equal costs
/// resolve to the lowest id. Empty table yields (none, +inf).
inline BestNeighbor best_neighbor(const NodeRoutingState& state, double now)
{
  BestNeighbor best;
  for (const auto& e : state.table.entries()) {
    if (!state.table.live(e, now))
      continue;
    double c = state.sr_cost_to(e.neighbor) + e.advertised_cost;
    if (c < best.cost) {
      best.cost = c;
      best.neighbor = e.neighbor;
    }
  }
  return best;
}

/// What the node tells its neighbors: the via-neighbor cost if it beats the
/// own long-range cost, the long-range cost otherwise.
inline double advertised_cost(const NodeRoutingState& state, double now)
{
  return std::min(best_neighbor(state, now).cost, state.lr_cost.value);
}

/// Per data packet: expire, evaluate, and pick short range only when the
/// via-neighbor cost is strictly lower. Ties go long range.
inline ForwardDecision forward_decision(NodeRoutingState& state, double now)
{
  expire(state.table, now);
  auto best = best_neighbor(state, now);
  if (best.neighbor && best.cost < state.lr_cost.value) {
    state.best_cost = best.cost;
    state.best_next_hop = best.neighbor;
    return ShortRange{*best.neighbor};
  }
  state.best_cost = state.lr_cost.value;
  state.best_next_hop.reset();
  return LongRange{};
}

inline Beacon make_beacon(const NodeRoutingState& state, double now)
{
  return {state.node_id, advertised_cost(state, now), now};
}

} // namespace cesr

#endif // CESR_ROUTING_HPP
