#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "fastdelivery/instance.hpp"
#include "fastdelivery/rational.hpp"

namespace fastdelivery {

/// A point of the graph: a node, or an interior point of an edge at a
/// given offset from the edge's first declared endpoint.
struct Location {
  enum class Kind { node, edge_point };

  Kind kind = Kind::node;
  NodeId node = -1;
  EdgeId edge = -1;
  Rational offset;  // from Edge::a, in (0, length) once normalized

  static Location at_node(NodeId n) {
    Location l;
    l.kind = Kind::node;
    l.node = n;
    return l;
  }
  static Location on_edge(EdgeId e, Rational offset_from_a) {
    Location l;
    l.kind = Kind::edge_point;
    l.edge = e;
    l.offset = std::move(offset_from_a);
    return l;
  }

  /// Edge endpoints collapse to their nodes so equal points compare equal.
  Location normalized(const Graph& g) const {
    if (kind == Kind::node) return *this;
    const Edge& e = g.edges[static_cast<std::size_t>(edge)];
    if (offset == Rational(0)) return at_node(e.a);
    if (offset == e.length) return at_node(e.b);
    return *this;
  }

  friend bool operator==(const Location& a, const Location& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == Kind::node) return a.node == b.node;
    return a.edge == b.edge && a.offset == b.offset;
  }
};

inline bool same_point(const Graph& g, const Location& a, const Location& b) {
  return a.normalized(g) == b.normalized(g);
}

/// Exact distance between two locations when they lie on one edge (or on a
/// node of it); nullopt when the pair is not measurably adjacent.
inline std::optional<Rational> leg_distance(const Graph& g, const Location& a,
                                            const Location& b) {
  const Location na = a.normalized(g);
  const Location nb = b.normalized(g);
  auto offset_on = [&](const Location& l, EdgeId e) -> std::optional<Rational> {
    const Edge& edge = g.edges[static_cast<std::size_t>(e)];
    if (l.kind == Location::Kind::edge_point)
      return l.edge == e ? std::optional<Rational>(l.offset) : std::nullopt;
    if (l.node == edge.a) return Rational(0);
    if (l.node == edge.b) return edge.length;
    return std::nullopt;
  };
  if (na.kind == Location::Kind::node && nb.kind == Location::Kind::node) {
    if (na.node == nb.node) return Rational(0);
    for (EdgeId e : g.adjacency[static_cast<std::size_t>(na.node)]) {
      auto oa = offset_on(na, e);
      auto ob = offset_on(nb, e);
      if (oa && ob) return *oa < *ob ? *ob - *oa : *oa - *ob;
    }
    return std::nullopt;
  }
  EdgeId e = na.kind == Location::Kind::edge_point ? na.edge : nb.edge;
  auto oa = offset_on(na, e);
  auto ob = offset_on(nb, e);
  if (!oa || !ob) return std::nullopt;
  return *oa < *ob ? *ob - *oa : *oa - *ob;
}

/// One uninterrupted straight move of an agent.
struct Leg {
  AgentId agent = -1;
  Location from;
  Location to;
  Rational depart;
  Rational arrive;
  bool carrying = false;
};

struct Handover {
  Rational time;
  Location location;
  std::optional<AgentId> giver;
  AgentId taker = -1;
};

/// The solver's certifiable output: every involved agent's motion plus the
/// package handover events. The package trajectory is the chain of
/// carrying legs from (s, 0) - waiting at s until the first carrier - to
/// (y, delivery_time).
struct Schedule {
  Rational delivery_time;
  std::vector<Leg> legs;  // grouped by agent, each group time-ordered
  std::vector<Handover> handovers;
};

}  // namespace fastdelivery
