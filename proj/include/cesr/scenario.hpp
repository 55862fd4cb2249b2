#ifndef CESR_SCENARIO_HPP
#define CESR_SCENARIO_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cesr/error.hpp"
#include "cesr/rng.hpp"
#include "cesr/text.hpp"
#include "cesr/types.hpp"

namespace cesr {

struct Area
{
  double width = 0;  // m
  double height = 0; // m

  bool contains(double x, double y) const { return x >= 0 && x <= width && y >= 0 && y <= height; }
  friend bool operator==(const Area&, const Area&) = default;
};

inline void validate(const Area& area)
{
  if (!(area.width > 0) || !(area.height > 0) || !std::isfinite(area.width) || !std::isfinite(area.height))
    throw InvalidArgument("area dimensions must be positive");
}

struct Position
{
  double x = 0; // m
  double y = 0; // m
  friend bool operator==(const Position&, const Position&) = default;
};

inline double distance(Position a, Position b)
{
  return std::hypot(a.x - b.x, a.y - b.y);
}

enum class MtClass { ClassA, ClassB };

inline char class_letter(MtClass c)
{
  return c == MtClass::ClassA ? 'A' : 'B';
}

/// Link rates in Mb/s. ClassA devices have the good long-range link.
struct RateProfile
{
  double sr_rate = 54;
  double lr_rate_class_a = 74;
  double lr_rate_class_b = 16;

  double lr_rate(MtClass c) const { return c == MtClass::ClassA ? lr_rate_class_a : lr_rate_class_b; }
};

struct NodeSpec
{
  NodeId id = 0;
  Position position;
  MtClass cls = MtClass::ClassB;
  friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

struct Scenario
{
  Area area;
  std::vector<NodeSpec> nodes;
  double tx_range = 20;
  Position bs_position; // logical only; the BS reaches the whole area
  std::uint64_t seed = 0;
  std::uint32_t attempts = 0;

  std::size_t size() const { return nodes.size(); }

  std::size_t count_class_a() const
  {
    std::size_t n = 0;
    for (const auto& node : nodes)
      n += node.cls == MtClass::ClassA;
    return n;
  }

  std::vector<Position> positions() const
  {
    std::vector<Position> out;
    out.reserve(nodes.size());
    for (const auto& node : nodes)
      out.push_back(node.position);
    return out;
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

using Adjacency = std::vector<std::vector<NodeId>>;

/// Uniform placement. Draws x then y for each node: exactly 2n draws.
inline std::vector<Position> place_random(const Area& area, std::size_t n, Rng& rng)
{
  std::vector<Position> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = rng.uniform() * area.width;
    double y = rng.uniform() * area.height;
    out.push_back({x, y});
  }
  return out;
}

/// Undirected unit-disk graph; an edge at exactly max_range is kept.
inline Adjacency connectivity_graph(std::span<const Position> positions, double max_range)
{
  Adjacency adj(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = i + 1; j < positions.size(); ++j) {
      if (distance(positions[i], positions[j]) <= max_range) {
        adj[i].push_back(static_cast<NodeId>(j));
        adj[j].push_back(static_cast<NodeId>(i));
      }
    }
  }
  return adj;
}

/// Single-source Dijkstra on the unit-weight graph. Unreachable nodes are
/// +inf.
inline std::vector<double> dijkstra(const Adjacency& adj, NodeId source)
{
  std::vector<double> dist(adj.size(), kInfinity);
  if (source >= adj.size())
    return dist;
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source] = 0;
  queue.emplace(0.0, source);
  while (!queue.empty()) {
    auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u])
      continue;
    for (NodeId v : adj[u]) {
      double nd = d + 1.0;
      if (nd < dist[v]) {
        dist[v] = nd;
        queue.emplace(nd, v);
      }
    }
  }
  return dist;
}

/// Every node reachable from node 0; equivalent to any-to-any reachability
/// because the graph is undirected.
inline bool is_fully_connected(const Adjacency& adj)
{
  if (adj.empty())
    return true;
  for (double d : dijkstra(adj, 0))
    if (d == kInfinity)
      return false;
  return true;
}

struct ScenarioRequest
{
  Area area;
  std::size_t n_total = 0;
  std::size_t n_class_a = 0;
  double tx_range = 20;
  std::uint32_t max_attempts = 10000;
};

/// Rejection sampling: redraw the whole placement until the unit-disk graph
/// is connected. The first n_class_a ids are ClassA.
inline Scenario generate_scenario(const ScenarioRequest& req, Rng& rng)
{
  validate(req.area);
  if (req.n_total < 1)
    throw InvalidArgument("scenario needs at least one node");
  if (req.n_class_a > req.n_total)
    throw InvalidArgument("n_class_a exceeds n_total");
  if (req.max_attempts < 1)
    throw InvalidArgument("max_attempts must be at least 1");
  if (!(req.tx_range > 0))
    throw InvalidArgument("tx_range must be positive");

  for (std::uint32_t attempt = 1; attempt <= req.max_attempts; ++attempt) {
    auto positions = place_random(req.area, req.n_total, rng);
    if (!is_fully_connected(connectivity_graph(positions, req.tx_range)))
      continue;
    Scenario s;
    s.area = req.area;
    s.tx_range = req.tx_range;
    s.bs_position = {req.area.width / 2, req.area.height / 2};
    s.attempts = attempt;
    s.nodes.reserve(req.n_total);
    for (std::size_t i = 0; i < positions.size(); ++i) {
      auto cls = i < req.n_class_a ? MtClass::ClassA : MtClass::ClassB;
      s.nodes.push_back({static_cast<NodeId>(i), positions[i], cls});
    }
    return s;
  }
  throw ExhaustedAttempts(req.max_attempts);
}

inline Scenario generate_scenario(const ScenarioRequest& req, std::uint64_t seed)
{
  Rng rng(seed);
  auto s = generate_scenario(req, rng);
  s.seed = seed;
  return s;
}

// Scenario text format, one item per line:
//
//   cesr-scenario 1
//   area <width> <height>
//   tx_range <meters>
//   seed <seed>
//   attempts <count>
//   bs <x> <y>
//   nodes <count>
//   <id> <x> <y> <A|B>          (one line per node, ascending id)
//
// Numbers use the shortest round-trip decimal form.
inline std::string serialize(const Scenario& s)
{
  using text::format_double;
  std::string out = "cesr-scenario 1\n";
  out += "area " + format_double(s.area.width) + " " + format_double(s.area.height) + "\n";
  out += "tx_range " + format_double(s.tx_range) + "\n";
  out += "seed " + std::to_string(s.seed) + "\n";
  out += "attempts " + std::to_string(s.attempts) + "\n";
  out += "bs " + format_double(s.bs_position.x) + " " + format_double(s.bs_position.y) + "\n";
  out += "nodes " + std::to_string(s.nodes.size()) + "\n";
  for (const auto& n : s.nodes) {
    out += std::to_string(n.id) + " " + format_double(n.position.x) + " " + format_double(n.position.y) + " " +
           class_letter(n.cls) + "\n";
  }
  return out;
}

inline Scenario parse_scenario(std::string_view doc, const std::string& source = "scenario")
{
  auto all = text::lines(doc);
  std::size_t i = 0;
  auto fail = [&](const std::string& msg) -> ConfigError {
    return ConfigError("", msg, static_cast<int>(i + 1), source);
  };
  auto next = [&](std::string_view key, std::size_t arity) {
    if (i >= all.size())
      throw fail("unexpected end of file, expected '" + std::string(key) + "'");
    auto tok = text::tokens(all[i]);
    if (tok.size() != arity + 1 || tok[0] != key)
      throw fail("expected '" + std::string(key) + "' with " + std::to_string(arity) + " value(s)");
    return tok;
  };
  auto num = [&](std::string_view t) {
    auto v = text::parse_double(t);
    if (!v || !std::isfinite(*v))
      throw fail("bad number '" + std::string(t) + "'");
    return *v;
  };
  auto uint = [&](std::string_view t) {
    auto v = text::parse_uint(t);
    if (!v)
      throw fail("bad integer '" + std::string(t) + "'");
    return *v;
  };

  Scenario s;
  auto head = next("cesr-scenario", 1);
  if (head[1] != "1")
    throw fail("unsupported scenario version");
  ++i;
  auto area = next("area", 2);
  s.area = {num(area[1]), num(area[2])};
  ++i;
  s.tx_range = num(next("tx_range", 1)[1]);
  ++i;
  s.seed = uint(next("seed", 1)[1]);
  ++i;
  s.attempts = static_cast<std::uint32_t>(uint(next("attempts", 1)[1]));
  ++i;
  auto bs = next("bs", 2);
  s.bs_position = {num(bs[1]), num(bs[2])};
  ++i;
  auto count = uint(next("nodes", 1)[1]);
  ++i;
  for (std::uint64_t k = 0; k < count; ++k, ++i) {
    if (i >= all.size())
      throw fail("missing node record " + std::to_string(k));
    auto tok = text::tokens(all[i]);
    if (tok.size() != 4)
      throw fail("node record needs: id x y class");
    NodeSpec n;
    n.id = static_cast<NodeId>(uint(tok[0]));
    if (n.id != k)
      throw fail("node ids must be contiguous from 0");
    n.position = {num(tok[1]), num(tok[2])};
    if (tok[3] == "A")
      n.cls = MtClass::ClassA;
    else if (tok[3] == "B")
      n.cls = MtClass::ClassB;
    else
      throw fail("class must be A or B");
    if (!s.area.contains(n.position.x, n.position.y))
      throw fail("node outside area");
    s.nodes.push_back(n);
  }
  for (; i < all.size(); ++i)
    if (!text::trim(all[i]).empty())
      throw fail("trailing content");
  try {
    validate(s.area);
  } catch (const InvalidArgument& e) {
    throw ConfigError("area", e.what(), 2, source);
  }
  if (s.nodes.empty())
    throw ConfigError("nodes", "scenario has no nodes", 0, source);
  if (!(s.tx_range > 0))
    throw ConfigError("tx_range", "must be positive", 3, source);
  return s;
}

inline void write_scenario(const Scenario& s, const std::string& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error("cannot write " + path);
  out << serialize(s);
}

inline Scenario read_scenario(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

} // namespace cesr

#endif // CESR_SCENARIO_HPP
