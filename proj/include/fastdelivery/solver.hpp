#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <utility>
#include <vector>

#include "fastdelivery/arrangement.hpp"
#include "fastdelivery/envelope.hpp"
#include "fastdelivery/instance.hpp"
#include "fastdelivery/line_delivery.hpp"
#include "fastdelivery/profiles.hpp"
#include "fastdelivery/schedule.hpp"

namespace fastdelivery {

enum class SolveStatus {
  ok,
  infeasible_no_agent_at_source,
  infeasible_target_unreachable,
};

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::ok:
      return "ok";
    case SolveStatus::infeasible_no_agent_at_source:
      return "infeasible: no agent reaches the source";
    case SolveStatus::infeasible_target_unreachable:
      return "infeasible: target unreachable from the source";
  }
  return "?";
}

struct SolveStats {
  std::int64_t queue_pushes = 0;
  std::int64_t queue_pops = 0;
  std::int64_t nodes_finalized = 0;
  std::int64_t pop_order_violations = 0;  // finalized dists must not decrease
  std::int64_t edge_calls = 0;
  TraceCounters trace_totals;
  std::int64_t initial_pieces_total = 0;
  // Amortized-cost certificate: per call, trace_steps + removals must stay
  // within 4 * (arrangement segments + initial envelope pieces).
  std::int64_t counter_bound_violations = 0;
  std::int64_t worst_call_steps = 0;
  std::int64_t worst_call_budget = 0;

  std::int64_t queue_ops() const { return queue_pushes + queue_pops; }
};

/// Per-node state of the time-dependent Dijkstra.
struct NodeLabel {
  std::optional<Rational> dist;
  bool final = false;
  AgentId carrier = -1;
  Rational carrier_velocity;
  NodeId pred = -1;
  EdgeId pred_edge = -1;
  std::optional<EdgeDeliveryResult> pred_result;
};

struct SolveOptions {
  bool early_exit = true;      // stop as soon as the target is finalized
  bool build_schedule = true;
};

struct SolveResult {
  SolveStatus status = SolveStatus::ok;
  Rational delivery_time;
  Schedule schedule;
  SolveStats stats;
  std::vector<NodeLabel> labels;  // final node states, for inspection
};

namespace detail {

struct HopContext {
  NodeId from = -1;
  NodeId to = -1;
  EdgeId edge = -1;
  const EdgeDeliveryResult* result = nullptr;
};

/// Emits node-to-node legs along an agent's shortest path, departing at
/// time 0 and arriving at distance/velocity per hop.
inline void emit_approach_legs(const ShortestPathTree& tree, AgentId agent,
                               const Rational& velocity, NodeId goal,
                               std::vector<Leg>& legs) {
  const auto nodes = tree.path_to(goal);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const Rational d0 = *tree.dist[static_cast<std::size_t>(nodes[i])];
    const Rational d1 = *tree.dist[static_cast<std::size_t>(nodes[i + 1])];
    legs.push_back({agent, Location::at_node(nodes[i]),
                    Location::at_node(nodes[i + 1]), d0 / velocity,
                    d1 / velocity, false});
  }
}

}  // namespace detail

/// Rebuilds the full agent schedule from the predecessor chain. The
/// package follows each hop's final envelope; approach legs of every
/// involved agent come from its shortest-path tree.
inline Schedule reconstruct_schedule(
    const Instance& inst, const std::vector<NodeLabel>& labels,
    const std::vector<ArrivalProfile>& profiles, const AgentPaths& paths,
    NodeId source, NodeId target) {
  Schedule schedule;
  schedule.delivery_time = *labels[static_cast<std::size_t>(target)].dist;
  if (source == target) return schedule;

  std::map<AgentId, std::size_t> agent_index;
  for (std::size_t i = 0; i < inst.agents.size(); ++i)
    agent_index[inst.agents[i].id] = i;
  auto tree_of = [&](AgentId a) -> const ShortestPathTree& {
    return paths.trees[agent_index.at(a)];
  };
  auto velocity_of = [&](AgentId a) {
    return inst.agents[agent_index.at(a)].velocity;
  };

  std::vector<detail::HopContext> hops;
  for (NodeId v = target; v != source;) {
    const NodeLabel& label = labels[static_cast<std::size_t>(v)];
    if (label.pred < 0 || !label.pred_result)
      throw InvariantViolation("broken predecessor chain");
    hops.push_back({label.pred, v, label.pred_edge, &*label.pred_result});
    v = label.pred;
  }
  std::reverse(hops.begin(), hops.end());

  // Initial carrier: first profile entry at s (its arrival is dist(s)).
  const ProfileEntry& first =
      profiles[static_cast<std::size_t>(source)].entries.front();
  std::map<AgentId, std::vector<Leg>> agent_legs;
  std::set<AgentId> involved;
  detail::emit_approach_legs(tree_of(first.agent), first.agent,
                             first.velocity, source, agent_legs[first.agent]);
  involved.insert(first.agent);
  AgentId incoming = first.agent;

  for (const auto& hop : hops) {
    const Edge& edge = inst.graph.edges[static_cast<std::size_t>(hop.edge)];
    const Rational& l_e = edge.length;
    const LowerEnvelope& env = hop.result->final_envelope;
    const bool forward = edge.a == hop.from;  // offsets measured from edge.a

    auto locate = [&](const Rational& x) {
      // x is the distance from the receiving node hop.to.
      if (x == Rational(0)) return Location::at_node(hop.to);
      if (x == l_e) return Location::at_node(hop.from);
      return Location::on_edge(hop.edge, forward ? l_e - x : x);
    };

    std::map<AgentId, const Pickup*> pickup_of;
    for (const Pickup& p : hop.result->pickups) pickup_of[p.agent] = &p;

    const auto& pieces = env.pieces();
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const auto& piece = pieces[i];
      const Rational y_hi = piece.value_at(piece.x_hi, l_e);
      const Rational y_lo = piece.value_at(piece.x_lo, l_e);
      if (!involved.count(piece.agent)) {
        involved.insert(piece.agent);
        auto it = pickup_of.find(piece.agent);
        if (it != pickup_of.end()) {
          // Receiver-side: reach hop.to, run into the edge, pick up, turn.
          detail::emit_approach_legs(tree_of(piece.agent), piece.agent,
                                      piece.velocity, hop.to,
                                      agent_legs[piece.agent]);
          const Point& q = it->second->point;
          agent_legs[piece.agent].push_back(
              {piece.agent, Location::at_node(hop.to), locate(q.x),
               q.y - q.x * piece.inv_speed, q.y, false});
        } else {
          // Sender-side: reach hop.from, then chase the package.
          detail::emit_approach_legs(tree_of(piece.agent), piece.agent,
                                      piece.velocity, hop.from,
                                      agent_legs[piece.agent]);
          if (piece.x_hi < l_e) {
            agent_legs[piece.agent].push_back(
                {piece.agent, Location::at_node(hop.from), locate(piece.x_hi),
                 piece.time_at_anchor, y_hi, false});
          }
        }
      }
      agent_legs[piece.agent].push_back({piece.agent, locate(piece.x_hi),
                                         locate(piece.x_lo), y_hi, y_lo,
                                         true});
      if (i == 0) {
        if (piece.agent != incoming)
          schedule.handovers.push_back(
              {y_hi, Location::at_node(hop.from), incoming, piece.agent});
      } else {
        schedule.handovers.push_back({y_hi, locate(piece.x_hi),
                                      pieces[i - 1].agent, piece.agent});
      }
    }

    AgentId arriving = pieces.back().agent;
    if (hop.result->carrier != arriving && hop.to != target) {
      // Exchange exactly at the receiving node: a tied faster agent takes
      // the package onward. Pointless on the final hop, so skipped there.
      const AgentId taker = hop.result->carrier;
      detail::emit_approach_legs(tree_of(taker), taker, velocity_of(taker),
                                  hop.to, agent_legs[taker]);
      involved.insert(taker);
      schedule.handovers.push_back({hop.result->arrival,
                                    Location::at_node(hop.to), arriving,
                                    taker});
      arriving = taker;
    }
    incoming = arriving;
  }

  for (auto& [agent, legs] : agent_legs)
    schedule.legs.insert(schedule.legs.end(), legs.begin(), legs.end());
  std::stable_sort(
      schedule.handovers.begin(), schedule.handovers.end(),
      [](const Handover& a, const Handover& b) { return a.time < b.time; });
  return schedule;
}

/// Time-dependent Dijkstra over the nodes: pops are final, every popped
/// node preprocesses its sender list once and relaxes all non-final
/// neighbors through fast_line_delivery.
inline SolveResult solve(const Instance& original,
                         const SolveOptions& opts = {}) {
  SolveResult result;
  if (original.source == original.target) {
    result.status = SolveStatus::ok;
    result.delivery_time = Rational(0);
    result.schedule.delivery_time = Rational(0);
    return result;
  }

  const Instance inst = collapse_collocated_agents(original);
  const AgentPaths paths = compute_agent_paths(inst);
  const auto profiles = arrival_profiles(inst, paths);
  const std::size_t n = static_cast<std::size_t>(inst.graph.node_count);

  if (profiles[static_cast<std::size_t>(inst.source)].empty()) {
    result.status = SolveStatus::infeasible_no_agent_at_source;
    return result;
  }

  std::vector<RelevantArrangement> arrangements(n);
  for (NodeId v = 0; v < inst.graph.node_count; ++v)
    if (v != inst.source)
      arrangements[static_cast<std::size_t>(v)] =
          preprocess_receiver(profiles[static_cast<std::size_t>(v)]);

  std::vector<NodeLabel> labels(n);
  SolveStats& stats = result.stats;

  const ProfileEntry& first =
      profiles[static_cast<std::size_t>(inst.source)].entries.front();
  {
    NodeLabel& ls = labels[static_cast<std::size_t>(inst.source)];
    ls.dist = first.arrival;  // t_s: 0 when an agent starts at s
    ls.carrier = first.agent;
    ls.carrier_velocity = first.velocity;
  }

  using QueueEntry = std::pair<Rational, NodeId>;
  auto later = [](const QueueEntry& a, const QueueEntry& b) {
    return a.first > b.first || (a.first == b.first && a.second > b.second);
  };
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, decltype(later)>
      queue(later);
  queue.push({first.arrival, inst.source});
  ++stats.queue_pushes;

  std::optional<Rational> last_finalized;
  while (!queue.empty()) {
    auto [d, u] = queue.top();
    queue.pop();
    ++stats.queue_pops;
    NodeLabel& lu = labels[static_cast<std::size_t>(u)];
    if (lu.final || d != *lu.dist) continue;  // lazy deletion
    lu.final = true;
    ++stats.nodes_finalized;
    if (last_finalized && d < *last_finalized) ++stats.pop_order_violations;
    last_finalized = d;
    if (u == inst.target && opts.early_exit) break;

    const Rational& t = *lu.dist;
    const SenderList senders = preprocess_sender(
        profiles[static_cast<std::size_t>(u)], lu.carrier,
        lu.carrier_velocity, t);
    const SenderEnvelope sender_env = build_sender_envelope(senders);

    for (EdgeId e : inst.graph.adjacency[static_cast<std::size_t>(u)]) {
      const Edge& edge = inst.graph.edges[static_cast<std::size_t>(e)];
      const NodeId v = edge.other(u);
      NodeLabel& lv = labels[static_cast<std::size_t>(v)];
      if (lv.final) continue;

      LowerEnvelope env = anchor_envelope(sender_env, edge.length);
      const std::int64_t initial_pieces =
          static_cast<std::int64_t>(env.size());
      EdgeDeliveryResult res = fast_line_delivery(
          edge.length, t, std::move(env),
          arrangements[static_cast<std::size_t>(v)]);

      ++stats.edge_calls;
      stats.trace_totals += res.counters;
      stats.initial_pieces_total += initial_pieces;
      const std::int64_t cost = res.counters.trace_steps + res.counters.removals;
      const std::int64_t budget =
          4 * (static_cast<std::int64_t>(
                   arrangements[static_cast<std::size_t>(v)].size()) +
               initial_pieces);
      if (cost > budget) ++stats.counter_bound_violations;
      if (stats.worst_call_budget == 0 ||
          cost * stats.worst_call_budget > stats.worst_call_steps * budget) {
        stats.worst_call_steps = cost;
        stats.worst_call_budget = budget;
      }

      const bool better =
          !lv.dist || res.arrival < *lv.dist ||
          (res.arrival == *lv.dist &&
           res.carrier_velocity > lv.carrier_velocity);
      if (better) {
        lv.dist = res.arrival;
        lv.carrier = res.carrier;
        lv.carrier_velocity = res.carrier_velocity;
        lv.pred = u;
        lv.pred_edge = e;
        lv.pred_result = std::move(res);
        queue.push({*lv.dist, v});
        ++stats.queue_pushes;
      }
    }
  }

  NodeLabel& ly = labels[static_cast<std::size_t>(inst.target)];
  if (!ly.final) {
    result.status = SolveStatus::infeasible_target_unreachable;
    result.labels = std::move(labels);
    return result;
  }
  result.status = SolveStatus::ok;
  result.delivery_time = *ly.dist;
  if (opts.build_schedule)
    result.schedule = reconstruct_schedule(inst, labels, profiles, paths,
                                           inst.source, inst.target);
  result.labels = std::move(labels);
  return result;
}

}  // namespace fastdelivery
