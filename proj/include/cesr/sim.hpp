#ifndef CESR_SIM_HPP
#define CESR_SIM_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <ostream>
#include <queue>
#include <string>
#include <vector>

#include "cesr/energy.hpp"
#include "cesr/error.hpp"
#include "cesr/mobility.hpp"
#include "cesr/rng.hpp"
#include "cesr/routing.hpp"
#include "cesr/scenario.hpp"
#include "cesr/text.hpp"
#include "cesr/types.hpp"

namespace cesr {

enum class Mode { Benchmark, Cooperative };

inline std::string_view to_string(Mode m)
{
  return m == Mode::Benchmark ? "benchmark" : "cooperative";
}

struct SimConfig
{
  double duration = 100;          // s
  std::uint32_t runs = 10;
  double beacon_period = 5;       // s
  double table_timeout = 15;      // s, three lost beacons
  double cbr_rate = 3000;         // packets/s per source
  std::uint32_t packet_size = 1024; // bytes
  std::uint32_t beacon_size = 32;   // bytes
  double tx_range = 20;           // m
  Mode mode = Mode::Cooperative;
  std::uint32_t hop_budget = 0;   // 0 selects 4 x node count
  std::uint32_t uplink_queue_cap = 50; // packets per node in the shared uplink
  std::uint32_t sr_queue_cap = 50;     // data packets per node short-range queue
  std::optional<MobilityParams> mobility;
  double table_sweep_interval = 0; // s, 0 selects beacon_period
  std::uint64_t master_seed = 1;
  bool class_a_generates = true;
  bool beacon_energy_counted = true;
  RateProfile rates;
  PowerProfiles power;

  std::uint32_t effective_hop_budget(std::size_t nodes) const
  {
    return hop_budget ? hop_budget : static_cast<std::uint32_t>(4 * nodes);
  }

  void validate() const
  {
    auto positive = [](double v) { return v > 0 && std::isfinite(v); };
    if (!positive(duration))
      throw ConfigError("duration", "must be > 0");
    if (runs < 1)
      throw ConfigError("runs", "must be >= 1");
    if (!positive(beacon_period))
      throw ConfigError("beacon_period", "must be > 0");
    if (!positive(table_timeout))
      throw ConfigError("table_timeout", "must be > 0");
    if (!(cbr_rate >= 0) || !std::isfinite(cbr_rate))
      throw ConfigError("cbr_rate", "must be >= 0");
    if (packet_size < 1)
      throw ConfigError("packet_size", "must be > 0");
    if (beacon_size < 1)
      throw ConfigError("beacon_size", "must be > 0");
    if (!positive(tx_range))
      throw ConfigError("tx_range", "must be > 0");
    if (uplink_queue_cap < 1)
      throw ConfigError("uplink_queue_cap", "must be >= 1");
    if (sr_queue_cap < 1)
      throw ConfigError("sr_queue_cap", "must be >= 1");
    if (!(table_sweep_interval >= 0))
      throw ConfigError("table_sweep_interval", "must be >= 0");
    if (!positive(rates.sr_rate))
      throw ConfigError("sr_rate", "must be > 0");
    if (!positive(rates.lr_rate_class_a))
      throw ConfigError("lr_rate_class_a", "must be > 0");
    if (!positive(rates.lr_rate_class_b))
      throw ConfigError("lr_rate_class_b", "must be > 0");
    for (auto k : kInterfaces) {
      const auto& p = power.of(k);
      const std::string prefix = std::string(to_string(k)) + "_power_";
      for (auto s : kRadioStates)
        if (!(p.watts(s) >= 0) || !std::isfinite(p.watts(s)))
          throw ConfigError(prefix + std::string(to_string(s)), "must be >= 0");
    }
    if (mobility)
      cesr::validate(*mobility);
  }
};

struct Packet
{
  NodeId source = 0;
  std::uint64_t sequence = 0;
  std::uint32_t size = 0; // bytes
  std::uint32_t hops_taken = 0;
  double created_at = 0;
};

struct NodeStats
{
  NodeId node_id = 0;
  MtClass cls = MtClass::ClassB;
  std::uint64_t generated_pkts = 0;
  std::uint64_t delivered_pkts = 0;
  double delivered_mbits = 0;      // received at the BS from this source
  std::uint64_t dropped_sr_queue = 0;
  std::uint64_t dropped_uplink_queue = 0;
  std::uint64_t dropped_hop_budget = 0;
  std::uint64_t lost_link = 0;     // next hop out of range at frame end
  std::uint64_t in_flight = 0;     // queued or on air when the run stopped
  std::uint64_t relayed_pkts = 0;  // foreign packets this node forwarded
  std::vector<std::uint64_t> hop_histogram; // delivered packets by hops_taken
  std::array<std::array<double, 3>, 2> seconds{}; // [iface][state]
  bool sr_enabled = true;
  double energy_lr_j = 0;
  double energy_sr_j = 0;

  std::uint64_t dropped_pkts() const
  {
    return dropped_sr_queue + dropped_uplink_queue + dropped_hop_budget + lost_link;
  }
  double energy_total_j() const { return energy_lr_j + energy_sr_j; }

  double hops_mean() const
  {
    std::uint64_t n = 0;
    double sum = 0;
    for (std::size_t h = 0; h < hop_histogram.size(); ++h) {
      n += hop_histogram[h];
      sum += static_cast<double>(h) * static_cast<double>(hop_histogram[h]);
    }
    return n ? sum / static_cast<double>(n) : 0.0;
  }
};

struct RunStats
{
  std::uint32_t run_index = 0;
  std::uint64_t run_seed = 0;
  std::uint64_t scenario_seed = 0;
  Mode mode = Mode::Cooperative;
  double duration = 0;
  std::vector<NodeStats> nodes;
  std::uint64_t events = 0;
  std::uint64_t beacons_sent = 0;
  std::uint64_t beacons_lost = 0;

  double total_energy_j() const
  {
    double j = 0;
    for (const auto& n : nodes)
      j += n.energy_total_j();
    return j;
  }
  double delivered_mbits() const
  {
    double d = 0;
    for (const auto& n : nodes)
      d += n.delivered_mbits;
    return d;
  }
  double goodput_mbps() const { return duration > 0 ? delivered_mbits() / duration : 0.0; }
};

/// Optional CSV trace outputs. Null streams are skipped.
struct TraceSinks
{
  std::ostream* routing = nullptr;  // time,node_id,decision,next_hop,eq1_cost,lr_cost
  std::ostream* mobility = nullptr; // time,node_id,x,y
};

enum class EventKind : std::uint8_t {
  TxEnd,       // long-range uplink service complete
  RxEnd,       // short-range frame complete at its receivers
  MobilityTick,
  TableSweep,
  BeaconDue,
  CbrArrival,
};

/// Queue entry. Ordered by (time, priority class, node, sequence), which
/// is a total order because sequence numbers are unique.
struct Event
{
  double time = 0;
  std::uint64_t sequence = 0;
  std::uint32_t rank = 0; // priority class in the top byte, node below
  std::uint32_t slot = 0;

  EventKind kind() const { return static_cast<EventKind>(rank >> 24); }
  NodeId node() const { return rank & 0xFFFFFFu; }

  friend bool operator>(const Event& a, const Event& b)
  {
    if (a.time != b.time)
      return a.time > b.time;
    if (a.rank != b.rank)
      return a.rank > b.rank;
    return a.sequence > b.sequence;
  }
};

class EventQueue
{
public:
  static constexpr std::uint32_t kMaxNodes = 1u << 24;

  void push(double time, EventKind kind, NodeId node, std::uint32_t slot = 0)
  {
    const auto rank = (static_cast<std::uint32_t>(kind) << 24) | node;
    queue_.push(Event{time, next_sequence_++, rank, slot});
  }
  bool empty() const { return queue_.empty(); }
  const Event& top() const { return queue_.top(); }
  Event pop()
  {
    Event e = queue_.top();
    queue_.pop();
    return e;
  }
  std::size_t size() const { return queue_.size(); }

private:
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t next_sequence_ = 0;
};

/// Packet-level simulation of one run: CBR sources, a shared FIFO uplink to
/// the BS, a protocol-model short-range medium, and CESR relaying.
class Simulator
{
public:
  Simulator(const SimConfig& config, const Scenario& scenario, std::uint32_t run_index, TraceSinks sinks = {})
    : config_(config)
    , scenario_(scenario)
    , run_index_(run_index)
    , sinks_(sinks)
  {
    config_.validate();
    if (run_index >= config_.runs)
      throw ConfigError("runs", "run_index " + std::to_string(run_index) + " out of range");
    if (scenario_.nodes.empty())
      throw InvalidArgument("scenario has no nodes");
    if (scenario_.nodes.size() >= EventQueue::kMaxNodes)
      throw InvalidArgument("scenario has too many nodes");
    run_seed_ = derive_seed(config_.master_seed, run_index);
    hop_budget_ = config_.effective_hop_budget(scenario_.size());
    cooperative_ = config_.mode == Mode::Cooperative;
    setup();
  }

  RunStats run()
  {
    while (!queue_.empty() && queue_.top().time < config_.duration) {
      Event e = queue_.pop();
      now_ = e.time;
      ++stats_.events;
      dispatch(e);
    }
    now_ = config_.duration;
    finish();
    return std::move(stats_);
  }

  /// Short-range frame airtime in seconds.
  static double airtime(std::uint32_t bytes, double rate_mbps) { return bytes * 8.0 / (rate_mbps * kBitsPerMb); }

private:
  struct SrFrame
  {
    bool is_beacon = false;
    Packet packet;
    NodeId next_hop = 0;
    Beacon beacon;
    double enqueued_at = 0;
  };

  struct ActiveTx
  {
    NodeId sender = 0;
    SrFrame frame;
    std::vector<NodeId> receivers; // within tx_range: medium busy, RX for the frame
    std::vector<NodeId> heard;     // beacon receivers whose medium was free
    bool counts = true; // charged to the sender and receiver ledgers
    bool in_use = false;
  };

  struct UplinkItem
  {
    NodeId sender = 0;
    Packet packet;
  };

  struct Node
  {
    MtClass cls = MtClass::ClassB;
    MobilityState mobility;
    NodeRoutingState routing;
    EnergyLedger ledger;
    std::deque<SrFrame> sr_queue;
    std::uint32_t sr_data_queued = 0;
    bool sr_tx = false;
    bool sr_tx_counts = false;   // current frame charged to the ledger
    std::uint32_t rx_frames = 0;  // in-range transmissions on air
    std::uint32_t rx_counted = 0; // of those, ones charged to the ledger
    std::uint32_t uplink_queued = 0;
    double contending_since = 0; // when the current head-of-line started waiting
    std::uint64_t next_cbr = 0;
    double cbr_phase = 0;
    // Cached forward decision; valid until a beacon arrives or an entry
    // can expire.
    bool decision_fresh = false;
    double decision_valid_until = 0;
    ForwardDecision decision = LongRange{};
    double via_cost = kInfinity; // best via-neighbor cost at the last decision
  };

  void setup()
  {
    const auto n = scenario_.size();
    nodes_.resize(n);
    stats_.run_index = run_index_;
    stats_.run_seed = run_seed_;
    stats_.scenario_seed = scenario_.seed;
    stats_.mode = config_.mode;
    stats_.duration = config_.duration;
    stats_.nodes.resize(n);

    const LinkCost sr_cost = energy_per_bit(config_.power.short_range.tx_w, config_.rates.sr_rate);
    Rng cbr_rng(derive_seed(run_seed_, 1));
    Rng beacon_rng(derive_seed(run_seed_, 2));
    Rng mobility_rng(derive_seed(run_seed_, 3));
    mobility_rng_.emplace(derive_seed(run_seed_, 4));

    for (std::size_t i = 0; i < n; ++i) {
      const auto& spec = scenario_.nodes[i];
      auto& node = nodes_[i];
      node.cls = spec.cls;
      LinkCost lr = energy_per_bit(config_.power.long_range.tx_w, config_.rates.lr_rate(spec.cls));
      node.routing = NodeRoutingState(static_cast<NodeId>(i), lr, sr_cost,
                                      NeighborTable(config_.table_timeout, config_.beacon_period));
      node.ledger = EnergyLedger(0.0, cooperative_, true);
      node.mobility.position = spec.position;
      if (config_.mobility)
        node.mobility = initial_state(spec.position, *config_.mobility, mobility_rng);

      auto& st = stats_.nodes[i];
      st.node_id = static_cast<NodeId>(i);
      st.cls = spec.cls;
      st.sr_enabled = cooperative_;

      // Phases are drawn for every node in both modes so paired runs share
      // their traffic pattern.
      double cbr_u = cbr_rng.uniform();
      double beacon_u = beacon_rng.uniform();
      bool generates = config_.cbr_rate > 0 && (spec.cls == MtClass::ClassB || config_.class_a_generates);
      if (generates) {
        node.cbr_phase = cbr_u / config_.cbr_rate;
        queue_.push(node.cbr_phase, EventKind::CbrArrival, static_cast<NodeId>(i));
      }
      if (cooperative_)
        queue_.push(beacon_u * config_.beacon_period, EventKind::BeaconDue, static_cast<NodeId>(i));
    }

    update_geometry();
    trace_positions();
    if (config_.mobility)
      queue_.push(config_.mobility->update_interval, EventKind::MobilityTick, 0);
    if (cooperative_) {
      double sweep = config_.table_sweep_interval > 0 ? config_.table_sweep_interval : config_.beacon_period;
      queue_.push(sweep, EventKind::TableSweep, 0);
    }
  }

  void dispatch(const Event& e)
  {
    switch (e.kind()) {
      case EventKind::CbrArrival: on_cbr(e.node()); break;
      case EventKind::BeaconDue: on_beacon_due(e.node()); break;
      case EventKind::RxEnd: on_rx_end(e.slot); break;
      case EventKind::TxEnd: on_uplink_done(); break;
      case EventKind::MobilityTick: on_mobility_tick(); break;
      case EventKind::TableSweep: on_table_sweep(); break;
    }
  }

  // ---- geometry ----

  void update_geometry()
  {
    const auto n = nodes_.size();
    const double tx2 = config_.tx_range * config_.tx_range;
    in_tx_.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double dx = nodes_[i].mobility.position.x - nodes_[j].mobility.position.x;
        double dy = nodes_[i].mobility.position.y - nodes_[j].mobility.position.y;
        double d2 = dx * dx + dy * dy;
        in_tx_[i * n + j] = in_tx_[j * n + i] = d2 <= tx2;
      }
    }
  }

  bool in_range(NodeId a, NodeId b) const { return in_tx_[a * nodes_.size() + b] != 0; }

  // ---- energy ----

  void refresh_sr(NodeId i)
  {
    auto& node = nodes_[i];
    if (!cooperative_)
      return;
    RadioState s = RadioState::Idle;
    if (node.sr_tx && node.sr_tx_counts)
      s = RadioState::Tx;
    else if (!node.sr_tx && node.rx_counted > 0)
      s = RadioState::Rx;
    if (node.ledger.state(InterfaceKind::ShortRange) != s)
      node.ledger.transition(InterfaceKind::ShortRange, s, now_);
  }

  void set_lr(NodeId i, RadioState s) { nodes_[i].ledger.transition(InterfaceKind::LongRange, s, now_); }

  // ---- traffic ----

  void on_cbr(NodeId i)
  {
    auto& node = nodes_[i];
    Packet p;
    p.source = i;
    p.sequence = node.next_cbr++;
    p.size = config_.packet_size;
    p.created_at = now_;
    ++stats_.nodes[i].generated_pkts;
    double next = node.cbr_phase + static_cast<double>(node.next_cbr) / config_.cbr_rate;
    queue_.push(next, EventKind::CbrArrival, i);
    on_packet_arrival(i, p);
  }

  void on_packet_arrival(NodeId i, Packet p)
  {
    auto& node = nodes_[i];
    if (!cooperative_) {
      uplink_enqueue(i, p);
      return;
    }
    const ForwardDecision decision = decide(i);
    if (sinks_.routing) {
      std::string hop = is_long_range(decision) ? "" : std::to_string(std::get<ShortRange>(decision).next_hop);
      *sinks_.routing << text::join_csv(now_, i, is_long_range(decision) ? "LR" : "SR", hop, node.via_cost,
                                        node.routing.lr_cost.value);
    }
    if (p.source != i)
      ++stats_.nodes[i].relayed_pkts;
    if (is_long_range(decision)) {
      uplink_enqueue(i, p);
      return;
    }
    if (p.hops_taken >= hop_budget_) {
      ++stats_.nodes[p.source].dropped_hop_budget;
      return;
    }
    if (node.sr_data_queued >= config_.sr_queue_cap) {
      ++stats_.nodes[p.source].dropped_sr_queue;
      return;
    }
    ++p.hops_taken;
    SrFrame f;
    f.packet = p;
    f.next_hop = std::get<ShortRange>(decision).next_hop;
    f.enqueued_at = now_;
    const bool was_idle = node.sr_queue.empty() && !node.sr_tx;
    if (was_idle)
      node.contending_since = now_;
    node.sr_queue.push_back(f);
    ++node.sr_data_queued;
    // A node already waiting is re-offered the medium when it frees.
    if (was_idle && !batching_)
      try_start_sr(i);
  }

  /// expire + forward_decision, reusing the previous result while the table
  /// is unchanged and no entry can have timed out since.
  ForwardDecision decide(NodeId i)
  {
    auto& node = nodes_[i];
    if (node.decision_fresh && now_ <= node.decision_valid_until)
      return node.decision;
    node.decision = forward_decision(node.routing, now_);
    node.via_cost = best_neighbor(node.routing, now_).cost;
    double until = kInfinity;
    for (const auto& e : node.routing.table.entries())
      until = std::min(until, e.last_heard + node.routing.table.timeout());
    node.decision_valid_until = until;
    node.decision_fresh = true;
    return node.decision;
  }

  // ---- long range: one FIFO server shared by every node ----

  void uplink_enqueue(NodeId i, const Packet& p)
  {
    auto& node = nodes_[i];
    if (node.uplink_queued >= config_.uplink_queue_cap) {
      ++stats_.nodes[p.source].dropped_uplink_queue;
      return;
    }
    ++node.uplink_queued;
    uplink_.push_back({i, p});
    if (!uplink_busy_)
      start_uplink();
  }

  void start_uplink()
  {
    if (uplink_.empty()) {
      uplink_busy_ = false;
      return;
    }
    uplink_busy_ = true;
    const auto& item = uplink_.front();
    set_lr(item.sender, RadioState::Tx);
    double service = airtime(item.packet.size, config_.rates.lr_rate(nodes_[item.sender].cls));
    queue_.push(now_ + service, EventKind::TxEnd, item.sender);
  }

  void on_uplink_done()
  {
    UplinkItem item = uplink_.front();
    uplink_.pop_front();
    auto& node = nodes_[item.sender];
    --node.uplink_queued;
    set_lr(item.sender, RadioState::Idle);
    auto& src = stats_.nodes[item.packet.source];
    ++src.delivered_pkts;
    src.delivered_mbits += item.packet.size * 8.0 / kBitsPerMb;
    if (src.hop_histogram.size() <= item.packet.hops_taken)
      src.hop_histogram.resize(item.packet.hops_taken + 1, 0);
    ++src.hop_histogram[item.packet.hops_taken];
    start_uplink();
  }

  // ---- short range: protocol-model medium ----

  void on_beacon_due(NodeId i)
  {
    auto& node = nodes_[i];
    queue_.push(now_ + config_.beacon_period, EventKind::BeaconDue, i);
    SrFrame f;
    f.is_beacon = true;
    f.beacon = make_beacon(node.routing, now_);
    f.enqueued_at = now_;
    const bool was_idle = node.sr_queue.empty() && !node.sr_tx;
    if (was_idle)
      node.contending_since = now_;
    // A beacon still waiting for the medium is replaced, not duplicated.
    if (!node.sr_queue.empty() && node.sr_queue.front().is_beacon)
      node.sr_queue.front() = f;
    else
      node.sr_queue.push_front(f);
    if (was_idle && !batching_)
      try_start_sr(i);
  }

  /// Contention order: earlier wait first, lower id on ties.
  bool precedes(NodeId a, NodeId b) const
  {
    const double ta = nodes_[a].contending_since;
    const double tb = nodes_[b].contending_since;
    return ta != tb ? ta < tb : a < b;
  }

  bool waiting(NodeId j) const { return !nodes_[j].sr_tx && !nodes_[j].sr_queue.empty(); }

  /// A node defers while the medium is busy or while a neighbor that has
  /// waited longer is still waiting.
  void try_start_sr(NodeId i)
  {
    auto& node = nodes_[i];
    if (node.sr_tx || node.rx_frames > 0 || node.sr_queue.empty())
      return;
    const auto n = static_cast<NodeId>(nodes_.size());
    for (NodeId j = 0; j < n; ++j)
      if (j != i && in_range(i, j) && waiting(j) && precedes(j, i))
        return;
    SrFrame f = node.sr_queue.front();
    node.sr_queue.pop_front();
    if (!f.is_beacon)
      --node.sr_data_queued;

    std::uint32_t slot = allocate_tx();
    auto& tx = active_[slot];
    tx.sender = i;
    tx.frame = f;
    tx.receivers.clear();
    tx.heard.clear();
    const bool counts = !f.is_beacon || config_.beacon_energy_counted;
    for (NodeId j = 0; j < n; ++j) {
      if (j == i || !in_range(i, j))
        continue;
      auto& r = nodes_[j];
      if (f.is_beacon) {
        if (!r.sr_tx && r.rx_frames == 0)
          tx.heard.push_back(j);
        else
          ++stats_.beacons_lost;
      }
      tx.receivers.push_back(j);
      ++r.rx_frames;
      if (counts)
        ++r.rx_counted;
    }
    tx.counts = counts;
    node.sr_tx = true;
    node.sr_tx_counts = counts;
    refresh_sr(i);
    for (NodeId j : tx.receivers)
      refresh_sr(j);
    if (f.is_beacon)
      ++stats_.beacons_sent;
    std::uint32_t bytes = f.is_beacon ? config_.beacon_size : f.packet.size;
    queue_.push(now_ + airtime(bytes, config_.rates.sr_rate), EventKind::RxEnd, i, slot);
  }

  void on_rx_end(std::uint32_t slot)
  {
    const ActiveTx& tx = active_[slot];
    auto& sender = nodes_[tx.sender];
    sender.contending_since = now_;
    sender.sr_tx = false;
    sender.sr_tx_counts = false;
    refresh_sr(tx.sender);
    for (NodeId j : tx.receivers) {
      --nodes_[j].rx_frames;
      if (tx.counts)
        --nodes_[j].rx_counted;
      refresh_sr(j);
    }

    batching_ = true;
    auto& wake = wake_;
    wake.assign(tx.receivers.begin(), tx.receivers.end());
    wake.push_back(tx.sender);
    if (tx.frame.is_beacon) {
      for (NodeId j : tx.heard) {
        handle_beacon(nodes_[j].routing, tx.frame.beacon, now_);
        nodes_[j].decision_fresh = false;
      }
    } else {
      NodeId target = tx.frame.next_hop;
      if (in_range(tx.sender, target)) {
        on_packet_arrival(target, tx.frame.packet);
        wake.push_back(target);
      } else {
        ++stats_.nodes[tx.frame.packet.source].lost_link;
      }
    }
    batching_ = false;
    release_tx(slot);
    wake_in_order(wake);
  }

  /// Offers the medium to waiting nodes, longest-waiting node first, lowest
  /// id on ties.
  void wake_in_order(std::vector<NodeId>& wake)
  {
    std::erase_if(wake, [&](NodeId j) { return !waiting(j); });
    std::sort(wake.begin(), wake.end(), [&](NodeId a, NodeId b) { return precedes(a, b); });
    wake.erase(std::unique(wake.begin(), wake.end()), wake.end());
    for (NodeId j : wake)
      try_start_sr(j);
  }

  std::uint32_t allocate_tx()
  {
    if (!free_slots_.empty()) {
      auto s = free_slots_.back();
      free_slots_.pop_back();
      active_[s].in_use = true;
      return s;
    }
    active_.emplace_back();
    active_.back().in_use = true;
    return static_cast<std::uint32_t>(active_.size() - 1);
  }

  void release_tx(std::uint32_t slot)
  {
    active_[slot].in_use = false;
    free_slots_.push_back(slot);
  }

  // ---- periodic housekeeping ----

  void on_mobility_tick()
  {
    const auto& p = *config_.mobility;
    std::vector<MobilityState> states;
    states.reserve(nodes_.size());
    for (const auto& node : nodes_)
      states.push_back(node.mobility);
    states = advance_all(states, p, scenario_.area, *mobility_rng_);
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      nodes_[i].mobility = states[i];
    update_geometry();
    trace_positions();
    queue_.push(now_ + p.update_interval, EventKind::MobilityTick, 0);
    // Ranges changed, so deferrals decided on the old geometry are stale.
    auto& wake = wake_;
    wake.clear();
    for (NodeId j = 0; j < nodes_.size(); ++j)
      wake.push_back(j);
    wake_in_order(wake);
  }

  void on_table_sweep()
  {
    for (auto& node : nodes_) {
      expire(node.routing.table, now_);
      node.decision_fresh = false;
    }
    double sweep = config_.table_sweep_interval > 0 ? config_.table_sweep_interval : config_.beacon_period;
    queue_.push(now_ + sweep, EventKind::TableSweep, 0);
  }

  void trace_positions()
  {
    if (!sinks_.mobility)
      return;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      *sinks_.mobility << text::join_csv(now_, i, nodes_[i].mobility.position.x, nodes_[i].mobility.position.y);
  }

  void finish()
  {
    for (const auto& item : uplink_)
      ++stats_.nodes[item.packet.source].in_flight;
    for (const auto& tx : active_)
      if (tx.in_use && !tx.frame.is_beacon)
        ++stats_.nodes[tx.frame.packet.source].in_flight;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      auto& node = nodes_[i];
      for (const auto& f : node.sr_queue)
        if (!f.is_beacon)
          ++stats_.nodes[f.packet.source].in_flight;
      node.ledger.close(config_.duration);
      auto& st = stats_.nodes[i];
      for (auto k : kInterfaces)
        for (auto s : kRadioStates)
          st.seconds[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)] = node.ledger.seconds(k, s);
      st.energy_lr_j = interface_energy(node.ledger, InterfaceKind::LongRange, config_.power.long_range);
      st.energy_sr_j = interface_energy(node.ledger, InterfaceKind::ShortRange, config_.power.short_range);
    }
  }

  SimConfig config_;
  const Scenario& scenario_;
  std::uint32_t run_index_;
  TraceSinks sinks_;
  std::uint64_t run_seed_ = 0;
  std::uint32_t hop_budget_ = 0;
  bool cooperative_ = true;
  bool batching_ = false;
  double now_ = 0;

  std::vector<Node> nodes_;
  std::vector<std::uint8_t> in_tx_;
  EventQueue queue_;
  std::deque<UplinkItem> uplink_;
  bool uplink_busy_ = false;
  std::vector<ActiveTx> active_;
  std::vector<std::uint32_t> free_slots_;
  std::vector<NodeId> wake_;
  std::optional<Rng> mobility_rng_;
  RunStats stats_;
};

inline RunStats run(const SimConfig& config, const Scenario& scenario, std::uint32_t run_index, TraceSinks sinks = {})
{
  Simulator sim(config, scenario, run_index, sinks);
  return sim.run();
}

} // namespace cesr

#endif // CESR_SIM_HPP
