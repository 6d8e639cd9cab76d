#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fastdelivery/instance.hpp"
#include "fastdelivery/rational.hpp"
#include "fastdelivery/schedule.hpp"

namespace fastdelivery {

enum class ViolationKind {
  speed_exceeded,
  discontinuity,
  handover_mismatch,
  wrong_final_time,
  wrong_origin,
};

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::speed_exceeded: return "speed_exceeded";
    case ViolationKind::discontinuity: return "discontinuity";
    case ViolationKind::handover_mismatch: return "handover_mismatch";
    case ViolationKind::wrong_final_time: return "wrong_final_time";
    case ViolationKind::wrong_origin: return "wrong_origin";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  std::string detail;
  Rational time;
};

struct ViolationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  void add(ViolationKind kind, Rational time, const std::string& detail) {
    violations.push_back({kind, detail, std::move(time)});
  }
};

namespace detail {
inline std::string describe(const Location& l) {
  std::ostringstream out;
  if (l.kind == Location::Kind::node)
    out << "node " << l.node;
  else
    out << "edge " << l.edge << " offset " << l.offset.to_string();
  return out.str();
}
}  // namespace detail

/// Feasibility certificate for a schedule and its claimed delivery time.
/// Checks agent kinematics (origin, contiguity, speed bounds), the package
/// trajectory (starts at s waiting only before the first carrier, moves
/// continuously, ends at y at the claimed time) and that every carrier
/// change is backed by a co-located handover record. Violations are data,
/// not errors.
inline ViolationReport check_schedule(const Instance& inst,
                                      const Schedule& schedule,
                                      const Rational& claimed) {
  ViolationReport report;
  const Graph& g = inst.graph;

  std::map<AgentId, const Agent*> agents;
  for (const Agent& a : inst.agents) agents[a.id] = &a;

  std::map<AgentId, std::vector<const Leg*>> by_agent;
  for (const Leg& leg : schedule.legs) by_agent[leg.agent].push_back(&leg);

  for (auto& [id, legs] : by_agent) {
    auto it = agents.find(id);
    if (it == agents.end()) {
      report.add(ViolationKind::wrong_origin, Rational(0),
                 "unknown agent " + std::to_string(id));
      continue;
    }
    const Agent& agent = *it->second;
    std::stable_sort(legs.begin(), legs.end(),
                     [](const Leg* a, const Leg* b) {
                       return a->depart < b->depart;
                     });
    if (!same_point(g, legs.front()->from, Location::at_node(agent.start)))
      report.add(ViolationKind::wrong_origin, legs.front()->depart,
                 "agent " + std::to_string(id) + " starts at " +
                     detail::describe(legs.front()->from) + ", its base is node " +
                     std::to_string(agent.start));
    if (legs.front()->depart < Rational(0))
      report.add(ViolationKind::wrong_origin, legs.front()->depart,
                 "agent " + std::to_string(id) + " departs before time 0");

    const Leg* prev = nullptr;
    for (const Leg* leg : legs) {
      if (prev) {
        if (!same_point(g, prev->to, leg->from))
          report.add(ViolationKind::discontinuity, leg->depart,
                     "agent " + std::to_string(id) + " teleports from " +
                         detail::describe(prev->to) + " to " +
                         detail::describe(leg->from));
        if (leg->depart < prev->arrive)
          report.add(ViolationKind::discontinuity, leg->depart,
                     "agent " + std::to_string(id) + " departs before arriving");
      }
      if (leg->arrive < leg->depart)
        report.add(ViolationKind::discontinuity, leg->depart,
                   "agent " + std::to_string(id) + " has a leg running backwards");
      auto dist = leg_distance(g, leg->from, leg->to);
      if (!dist) {
        report.add(ViolationKind::discontinuity, leg->depart,
                   "agent " + std::to_string(id) + " leg between unrelated points " +
                       detail::describe(leg->from) + " and " +
                       detail::describe(leg->to));
      } else if (*dist > Rational(0)) {
        if (leg->arrive == leg->depart ||
            *dist / (leg->arrive - leg->depart) > agent.velocity)
          report.add(ViolationKind::speed_exceeded, leg->depart,
                     "agent " + std::to_string(id) + " exceeds velocity " +
                         agent.velocity.to_string());
      }
      prev = leg;
    }
  }

  // Package trajectory: the chain of carrying legs.
  std::vector<const Leg*> carrying;
  for (const Leg& leg : schedule.legs)
    if (leg.carrying) carrying.push_back(&leg);
  std::stable_sort(carrying.begin(), carrying.end(),
                   [](const Leg* a, const Leg* b) {
                     return a->depart < b->depart;
                   });

  if (carrying.empty()) {
    if (inst.source != inst.target)
      report.add(ViolationKind::wrong_final_time, claimed,
                 "no carrying legs but source differs from target");
    else if (claimed != Rational(0))
      report.add(ViolationKind::wrong_final_time, claimed,
                 "package already at the target but claimed time is not 0");
    return report;
  }

  if (!same_point(g, carrying.front()->from, Location::at_node(inst.source)))
    report.add(ViolationKind::wrong_origin, carrying.front()->depart,
               "package picked up at " +
                   detail::describe(carrying.front()->from) +
                   " instead of the source node");
  if (carrying.front()->depart < Rational(0))
    report.add(ViolationKind::wrong_origin, carrying.front()->depart,
               "package picked up before time 0");

  for (std::size_t i = 0; i + 1 < carrying.size(); ++i) {
    const Leg* a = carrying[i];
    const Leg* b = carrying[i + 1];
    if (!same_point(g, a->to, b->from) || a->arrive != b->depart) {
      report.add(ViolationKind::discontinuity, a->arrive,
                 "package trajectory breaks after " + detail::describe(a->to));
      continue;
    }
    if (a->agent == b->agent) continue;
    // Carrier change: a matching handover record must exist and both
    // parties must be there.
    bool matched = false;
    for (const Handover& h : schedule.handovers) {
      if (h.time == a->arrive && h.taker == b->agent && h.giver &&
          *h.giver == a->agent && same_point(g, h.location, a->to)) {
        matched = true;
        break;
      }
    }
    if (!matched)
      report.add(ViolationKind::handover_mismatch, a->arrive,
                 "carrier change " + std::to_string(a->agent) + " -> " +
                     std::to_string(b->agent) + " at " +
                     detail::describe(a->to) + " lacks a handover record");
  }

  for (const Handover& h : schedule.handovers) {
    bool taker_there = false;
    auto it = by_agent.find(h.taker);
    if (it != by_agent.end()) {
      for (const Leg* leg : it->second) {
        const bool departs_here =
            leg->depart == h.time && same_point(g, leg->from, h.location);
        const bool arrives_here =
            leg->arrive == h.time && same_point(g, leg->to, h.location);
        if (departs_here || arrives_here) {
          taker_there = true;
          break;
        }
      }
    }
    if (!taker_there)
      report.add(ViolationKind::handover_mismatch, h.time,
                 "taker " + std::to_string(h.taker) + " is not at " +
                     detail::describe(h.location) + " when the handover happens");
  }

  const Leg* last = carrying.back();
  if (!same_point(g, last->to, Location::at_node(inst.target)))
    report.add(ViolationKind::wrong_final_time, last->arrive,
               "package ends at " + detail::describe(last->to) +
                   " instead of the target");
  else if (last->arrive != claimed)
    report.add(ViolationKind::wrong_final_time, last->arrive,
               "package reaches the target at " + last->arrive.to_string() +
                   ", claimed " + claimed.to_string());
  return report;
}

}  // namespace fastdelivery
