#pragma once

#include <json.hpp>

#include <stdexcept>
#include <string>

#include "fastdelivery/instance.hpp"
#include "fastdelivery/schedule.hpp"

namespace fastdelivery {

using Json = nlohmann::json;

/// Rationals travel as exact "p/q" strings so verification stays lossless;
/// decimal renderings are advisory extras.
inline Json rational_to_json(const Rational& r) { return r.to_string(); }

inline Rational rational_from_json(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  auto parsed = Rational::parse(j.get<std::string>());
  if (!parsed) throw std::invalid_argument("bad rational '" + j.dump() + "'");
  return *parsed;
}

inline Json location_to_json(const Graph& g, const Location& loc) {
  Json j;
  if (loc.kind == Location::Kind::node) {
    j["node"] = loc.node;
  } else {
    const Edge& e = g.edges[static_cast<std::size_t>(loc.edge)];
    j["edge"] = {e.a, e.b};
    j["offset"] = rational_to_json(loc.offset);
  }
  return j;
}

inline NodeId checked_node(const Graph& g, NodeId n) {
  if (n < 0 || n >= g.node_count)
    throw std::invalid_argument("node id " + std::to_string(n) +
                                " does not exist in this instance");
  return n;
}

inline EdgeId find_edge(const Graph& g, NodeId a, NodeId b) {
  checked_node(g, a);
  checked_node(g, b);
  for (EdgeId e : g.adjacency[static_cast<std::size_t>(a)])
    if (g.edges[static_cast<std::size_t>(e)].other(a) == b) return e;
  throw std::invalid_argument("no edge between nodes " + std::to_string(a) +
                              " and " + std::to_string(b));
}

inline Location location_from_json(const Graph& g, const Json& j) {
  if (j.contains("node"))
    return Location::at_node(checked_node(g, j["node"].get<NodeId>()));
  NodeId a = j["edge"][0].get<NodeId>();
  NodeId b = j["edge"][1].get<NodeId>();
  EdgeId e = find_edge(g, a, b);
  Rational offset = rational_from_json(j["offset"]);
  const Edge& edge = g.edges[static_cast<std::size_t>(e)];
  if (offset < Rational(0) || offset > edge.length)
    throw std::invalid_argument("offset " + offset.to_string() +
                                " outside edge of length " +
                                edge.length.to_string());
  if (edge.a != a) offset = edge.length - offset;
  return Location::on_edge(e, std::move(offset));
}

inline Json schedule_to_json(const Instance& inst, const Schedule& schedule) {
  const Graph& g = inst.graph;
  Json j;
  j["delivery_time"] = rational_to_json(schedule.delivery_time);
  j["source"] = inst.source;
  j["target"] = inst.target;
  j["legs"] = Json::array();
  for (const Leg& leg : schedule.legs) {
    Json l;
    l["agent"] = leg.agent;
    l["from"] = location_to_json(g, leg.from);
    l["to"] = location_to_json(g, leg.to);
    l["depart"] = rational_to_json(leg.depart);
    l["arrive"] = rational_to_json(leg.arrive);
    l["carrying"] = leg.carrying;
    j["legs"].push_back(std::move(l));
  }
  j["handovers"] = Json::array();
  for (const Handover& h : schedule.handovers) {
    Json o;
    o["time"] = rational_to_json(h.time);
    const Location loc = h.location.normalized(g);
    if (loc.kind == Location::Kind::node) {
      o["node"] = loc.node;
    } else {
      const Edge& e = g.edges[static_cast<std::size_t>(loc.edge)];
      o["edge"] = {e.a, e.b};
      o["offset_from_first_endpoint"] = rational_to_json(loc.offset);
    }
    if (h.giver)
      o["giver"] = *h.giver;
    else
      o["giver"] = nullptr;
    o["taker"] = h.taker;
    j["handovers"].push_back(std::move(o));
  }
  return j;
}

inline Schedule schedule_from_json(const Instance& inst, const Json& j) {
  const Graph& g = inst.graph;
  Schedule schedule;
  schedule.delivery_time = rational_from_json(j.at("delivery_time"));
  for (const Json& l : j.at("legs")) {
    Leg leg;
    leg.agent = l.at("agent").get<AgentId>();
    leg.from = location_from_json(g, l.at("from"));
    leg.to = location_from_json(g, l.at("to"));
    leg.depart = rational_from_json(l.at("depart"));
    leg.arrive = rational_from_json(l.at("arrive"));
    leg.carrying = l.at("carrying").get<bool>();
    schedule.legs.push_back(std::move(leg));
  }
  if (j.contains("handovers")) {
    for (const Json& o : j.at("handovers")) {
      Handover h;
      h.time = rational_from_json(o.at("time"));
      if (o.contains("node")) {
        h.location = Location::at_node(checked_node(g, o.at("node").get<NodeId>()));
      } else {
        NodeId a = o.at("edge")[0].get<NodeId>();
        NodeId b = o.at("edge")[1].get<NodeId>();
        EdgeId e = find_edge(g, a, b);
        Rational offset = rational_from_json(o.at("offset_from_first_endpoint"));
        const Edge& edge = g.edges[static_cast<std::size_t>(e)];
        if (offset < Rational(0) || offset > edge.length)
          throw std::invalid_argument("handover offset outside its edge");
        if (edge.a != a) offset = edge.length - offset;
        h.location = Location::on_edge(e, std::move(offset));
      }
      if (o.contains("giver") && !o.at("giver").is_null())
        h.giver = o.at("giver").get<AgentId>();
      h.taker = o.at("taker").get<AgentId>();
      schedule.handovers.push_back(std::move(h));
    }
  }
  return schedule;
}

}  // namespace fastdelivery
