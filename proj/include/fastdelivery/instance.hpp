#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fastdelivery/geometry.hpp"
#include "fastdelivery/rational.hpp"

namespace fastdelivery {

using NodeId = std::int32_t;
using EdgeId = std::int32_t;

struct Edge {
  NodeId a = -1;
  NodeId b = -1;
  Rational length;  // > 0

  NodeId other(NodeId node) const { return node == a ? b : a; }
};

/// Undirected graph with positive rational edge lengths, no self-loops and
/// at most one edge per node pair.
struct Graph {
  NodeId node_count = 0;
  std::vector<Edge> edges;
  std::vector<std::vector<EdgeId>> adjacency;  // per node, incident edge ids

  void rebuild_adjacency() {
    adjacency.assign(static_cast<std::size_t>(node_count), {});
    for (EdgeId e = 0; e < static_cast<EdgeId>(edges.size()); ++e) {
      adjacency[static_cast<std::size_t>(edges[e].a)].push_back(e);
      adjacency[static_cast<std::size_t>(edges[e].b)].push_back(e);
    }
  }
};

struct Agent {
  AgentId id = -1;
  NodeId start = -1;
  Rational velocity;  // > 0
};

struct Instance {
  Graph graph;
  std::vector<Agent> agents;
  NodeId source = -1;
  NodeId target = -1;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string token;
  while (in >> token) tokens.push_back(token);
  return tokens;
}

inline Rational parse_positive_rational(const std::string& text, int line,
                                        const char* what) {
  auto value = Rational::parse(text);
  if (!value) throw ParseError(line, std::string("malformed ") + what + " '" + text + "'");
  if (!(*value > Rational(0)))
    throw ParseError(line, std::string("non-positive ") + what + " '" + text + "'");
  return *value;
}

inline std::int64_t parse_int(const std::string& text, int line, const char* what) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, std::string("malformed ") + what + " '" + text + "'");
  }
}

inline NodeId parse_node(const std::string& text, int line, NodeId node_count) {
  std::int64_t v = parse_int(text, line, "node id");
  if (v < 0 || v >= node_count)
    throw ParseError(line, "node id " + text + " out of range [0, " +
                               std::to_string(node_count) + ")");
  return static_cast<NodeId>(v);
}

}  // namespace detail

/// Reads the line-oriented instance text format:
///
///   nodes <n>
///   edge <a> <b> <length>          # length: integer | decimal | p/q
///   agent <id> <node> <velocity>
///   package <s> <y>
///
/// '#' starts a comment; blank lines are ignored. Every problem is reported
/// with its line number.
inline Instance parse_instance(std::istream& in) {
  Instance inst;
  bool have_nodes = false;
  bool have_package = false;
  std::set<std::pair<NodeId, NodeId>> edge_keys;
  std::set<AgentId> agent_ids;

  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    auto tokens = detail::split_tokens(raw);
    if (tokens.empty()) continue;
    const std::string& kind = tokens[0];

    if (kind == "nodes") {
      if (have_nodes) throw ParseError(line_no, "duplicate nodes line");
      if (tokens.size() != 2) throw ParseError(line_no, "expected: nodes <n>");
      std::int64_t n = detail::parse_int(tokens[1], line_no, "node count");
      if (n < 1) throw ParseError(line_no, "node count must be >= 1");
      inst.graph.node_count = static_cast<NodeId>(n);
      have_nodes = true;
      continue;
    }
    if (!have_nodes)
      throw ParseError(line_no, "the nodes line must come first");

    if (kind == "edge") {
      if (tokens.size() != 4)
        throw ParseError(line_no, "expected: edge <a> <b> <length>");
      NodeId a = detail::parse_node(tokens[1], line_no, inst.graph.node_count);
      NodeId b = detail::parse_node(tokens[2], line_no, inst.graph.node_count);
      if (a == b) throw ParseError(line_no, "self-loop edge on node " + tokens[1]);
      auto key = std::minmax(a, b);
      if (!edge_keys.insert({key.first, key.second}).second)
        throw ParseError(line_no, "duplicate edge " + tokens[1] + " " + tokens[2]);
      Rational len = detail::parse_positive_rational(tokens[3], line_no, "edge length");
      inst.graph.edges.push_back({a, b, len});
    } else if (kind == "agent") {
      if (tokens.size() != 4)
        throw ParseError(line_no, "expected: agent <id> <node> <velocity>");
      AgentId id = detail::parse_int(tokens[1], line_no, "agent id");
      if (id < 0) throw ParseError(line_no, "agent id must be >= 0");
      if (!agent_ids.insert(id).second)
        throw ParseError(line_no, "duplicate agent id " + tokens[1]);
      NodeId node = detail::parse_node(tokens[2], line_no, inst.graph.node_count);
      Rational vel = detail::parse_positive_rational(tokens[3], line_no, "velocity");
      inst.agents.push_back({id, node, vel});
    } else if (kind == "package") {
      if (have_package) throw ParseError(line_no, "duplicate package line");
      if (tokens.size() != 3)
        throw ParseError(line_no, "expected: package <s> <y>");
      inst.source = detail::parse_node(tokens[1], line_no, inst.graph.node_count);
      inst.target = detail::parse_node(tokens[2], line_no, inst.graph.node_count);
      have_package = true;
    } else {
      throw ParseError(line_no, "unknown directive '" + kind + "'");
    }
  }
  if (!have_nodes) throw ParseError(line_no, "missing nodes line");
  if (!have_package) throw ParseError(line_no, "missing package line");
  inst.graph.rebuild_adjacency();
  return inst;
}

inline Instance parse_instance(const std::string& text) {
  std::istringstream in(text);
  return parse_instance(in);
}

/// Canonical text form; parse_instance(serialize_instance(x)) reproduces x.
inline std::string serialize_instance(const Instance& inst) {
  std::ostringstream out;
  out << "nodes " << inst.graph.node_count << "\n";
  for (const Edge& e : inst.graph.edges)
    out << "edge " << e.a << " " << e.b << " " << e.length.to_string() << "\n";
  for (const Agent& a : inst.agents)
    out << "agent " << a.id << " " << a.start << " " << a.velocity.to_string()
        << "\n";
  out << "package " << inst.source << " " << inst.target << "\n";
  return out.str();
}

/// Keeps at most one agent per node: among collocated agents only a fastest
/// one survives, ties broken toward the smallest agent id. Afterwards the
/// fleet size is at most the node count.
inline Instance collapse_collocated_agents(const Instance& inst) {
  std::map<NodeId, Agent> best;
  for (const Agent& a : inst.agents) {
    auto it = best.find(a.start);
    if (it == best.end()) {
      best.emplace(a.start, a);
      continue;
    }
    Agent& cur = it->second;
    if (a.velocity > cur.velocity ||
        (a.velocity == cur.velocity && a.id < cur.id)) {
      cur = a;
    }
  }
  Instance out = inst;
  out.agents.clear();
  for (const Agent& a : inst.agents) {
    auto it = best.find(a.start);
    if (it != best.end() && it->second.id == a.id) out.agents.push_back(a);
  }
  return out;
}

struct GenerateParams {
  NodeId nodes = 2;
  std::int64_t edges = 1;
  int agents = 1;
  std::uint64_t seed = 1;
  std::int64_t min_length = 1, max_length = 100;
  std::int64_t min_velocity = 1, max_velocity = 100;
};

namespace detail {

// Bounded draw from mt19937_64 kept independent of the standard library's
// distribution implementations so generated instances are stable.
inline std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = bound * (UINT64_MAX / bound);
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

inline std::int64_t draw_range(std::mt19937_64& rng, std::int64_t lo,
                               std::int64_t hi) {
  return lo + static_cast<std::int64_t>(
                  draw_below(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

}  // namespace detail

/// Deterministic random connected instance: a random attachment tree plus
/// extra distinct edges, integer lengths and velocities from the given
/// ranges, agents on distinct nodes, s != y.
inline Instance generate_instance(const GenerateParams& p) {
  const std::int64_t n = p.nodes;
  const std::int64_t max_edges = n * (n - 1) / 2;
  if (n < 2) throw std::invalid_argument("generator needs at least 2 nodes");
  if (p.edges < n - 1 || p.edges > max_edges)
    throw std::invalid_argument("edge count must lie in [n-1, n(n-1)/2]");
  if (p.agents < 0 || p.agents > n)
    throw std::invalid_argument("agent count must lie in [0, n]");
  if (p.min_length < 1 || p.min_length > p.max_length ||
      p.min_velocity < 1 || p.min_velocity > p.max_velocity)
    throw std::invalid_argument("invalid length/velocity range");

  std::mt19937_64 rng(p.seed);
  Instance inst;
  inst.graph.node_count = p.nodes;

  std::set<std::pair<NodeId, NodeId>> used;
  auto add_edge = [&](NodeId a, NodeId b) {
    auto key = std::minmax(a, b);
    if (!used.insert({key.first, key.second}).second) return false;
    Rational len(detail::draw_range(rng, p.min_length, p.max_length));
    inst.graph.edges.push_back({a, b, len});
    return true;
  };

  for (NodeId v = 1; v < p.nodes; ++v)
    add_edge(v, static_cast<NodeId>(detail::draw_below(rng, v)));

  std::int64_t extra = p.edges - (n - 1);
  if (extra > 0 && p.edges * 3 >= max_edges * 2) {
    // Dense request: enumerate the unused pairs and shuffle.
    std::vector<std::pair<NodeId, NodeId>> pool;
    for (NodeId a = 0; a < p.nodes; ++a)
      for (NodeId b = a + 1; b < p.nodes; ++b)
        if (!used.count({a, b})) pool.emplace_back(a, b);
    for (std::size_t i = pool.size(); i > 1; --i)
      std::swap(pool[i - 1], pool[detail::draw_below(rng, i)]);
    for (std::int64_t i = 0; i < extra; ++i) add_edge(pool[i].first, pool[i].second);
  } else {
    while (extra > 0) {
      NodeId a = static_cast<NodeId>(detail::draw_below(rng, n));
      NodeId b = static_cast<NodeId>(detail::draw_below(rng, n));
      if (a == b) continue;
      if (add_edge(a, b)) --extra;
    }
  }
  inst.graph.rebuild_adjacency();

  std::vector<NodeId> nodes(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < p.nodes; ++v) nodes[static_cast<std::size_t>(v)] = v;
  for (std::size_t i = nodes.size(); i > 1; --i)
    std::swap(nodes[i - 1], nodes[detail::draw_below(rng, i)]);
  for (int i = 0; i < p.agents; ++i) {
    Rational vel(detail::draw_range(rng, p.min_velocity, p.max_velocity));
    inst.agents.push_back({i, nodes[static_cast<std::size_t>(i)], vel});
  }

  inst.source = static_cast<NodeId>(detail::draw_below(rng, n));
  do {
    inst.target = static_cast<NodeId>(detail::draw_below(rng, n));
  } while (inst.target == inst.source);
  return inst;
}

}  // namespace fastdelivery
