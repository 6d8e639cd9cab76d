#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fastdelivery/envelope.hpp"
#include "fastdelivery/instance.hpp"
#include "fastdelivery/profiles.hpp"
#include "fastdelivery/rational.hpp"

namespace fastdelivery {

/// One step of a brute-force carrier chain: who takes the package, where
/// and when. meet_x measures distance from the receiving node.
struct CarrierStep {
  AgentId agent = -1;
  Rational velocity;
  bool receiver_side = false;
  Rational meet_x;
  Rational meet_time;
};

struct CarrierSequence {
  std::vector<CarrierStep> steps;
};

struct EdgeOracleResult {
  Rational arrival;
  Rational final_velocity;
  AgentId final_carrier = -1;
  CarrierSequence best;
};

/// Exhaustive single-edge ground truth. Enumerates every strictly
/// increasing-velocity subsequence of sender and receiver agents that
/// begins sender-side, simulates it greedily (each agent takes the package
/// at the earliest physical meeting point) and returns the exact minimum
/// arrival at the receiver. Arrival ties prefer the fastest final carrier.
/// Built on plain kinematics only; shares nothing with the envelope trace.
inline EdgeOracleResult edge_oracle(const SenderList& senders,
                                    const ArrivalProfile& receivers,
                                    const Rational& edge_length,
                                    const Rational& t,
                                    std::size_t agent_cap = 12) {
  if (senders.empty())
    throw std::invalid_argument("edge oracle needs at least one sender");
  if (senders.entries.size() + receivers.entries.size() > agent_cap)
    throw std::invalid_argument("edge oracle agent cap exceeded");

  struct Candidate {
    AgentId agent;
    Rational velocity;
    Rational time;  // sender: departure from u (clamped); receiver: at v
    bool receiver_side;
  };
  std::vector<Candidate> all;
  for (const SenderEntry& e : senders.entries)
    all.push_back({e.agent, e.velocity, e.depart < t ? t : e.depart, false});
  for (const ProfileEntry& e : receivers.entries)
    all.push_back({e.agent, e.velocity, e.arrival, true});
  std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
    return a.velocity < b.velocity;
  });

  std::optional<EdgeOracleResult> best;
  CarrierSequence chain;

  // Package state while simulating: taken at (pos, when) moving toward the
  // receiver at `speed`.
  struct State {
    Rational pos;
    Rational when;
    Rational speed;
  };

  auto consider = [&](const State& s, AgentId agent) {
    Rational arrival = s.when + s.pos / s.speed;
    if (!best || arrival < best->arrival ||
        (arrival == best->arrival && s.speed > best->final_velocity)) {
      EdgeOracleResult r;
      r.arrival = std::move(arrival);
      r.final_velocity = s.speed;
      r.final_carrier = agent;
      r.best = chain;
      best = std::move(r);
    }
  };

  auto extend = [&](auto&& self, const State& s, std::size_t next_idx) -> void {
    for (std::size_t i = next_idx; i < all.size(); ++i) {
      const Candidate& c = all[i];
      if (!(c.velocity > s.speed)) continue;
      std::optional<State> taken;
      if (c.receiver_side) {
        // Runs from the receiver toward the package: pos_c = (tau - time) v.
        Rational tau =
            (s.pos + s.when * s.speed + c.time * c.velocity) /
            (c.velocity + s.speed);
        if (tau >= s.when && tau >= c.time) {
          Rational x = (tau - c.time) * c.velocity;
          if (x >= Rational(0) && x <= edge_length)
            taken = State{std::move(x), std::move(tau), c.velocity};
        }
        if (!taken && s.pos == edge_length &&
            c.time + edge_length / c.velocity <= s.when) {
          // Reached the sender before the package left: wait and take there.
          taken = State{edge_length, s.when, c.velocity};
        }
      } else {
        // Chases from the sender: pos_c = l_e - (tau - depart) v.
        // Meet where l_e - (tau - c.time) v_c equals s.pos - (tau - s.when) v_s.
        Rational tau = (edge_length + c.time * c.velocity - s.pos +
                        s.when * s.speed) /
                       (c.velocity - s.speed);
        if (tau >= s.when && tau >= c.time) {
          Rational x = s.pos - (tau - s.when) * s.speed;
          if (x >= Rational(0) && x <= edge_length)
            taken = State{std::move(x), std::move(tau), c.velocity};
        }
      }
      if (!taken) continue;
      chain.steps.push_back(
          {c.agent, c.velocity, c.receiver_side, taken->pos, taken->when});
      consider(*taken, c.agent);
      self(self, *taken, i + 1);
      chain.steps.pop_back();
    }
  };

  for (std::size_t i = 0; i < all.size(); ++i) {
    const Candidate& c = all[i];
    if (c.receiver_side) continue;  // chains begin with a sender-side agent
    State s{edge_length, c.time, c.velocity};
    chain.steps.push_back({c.agent, c.velocity, false, edge_length, c.time});
    consider(s, c.agent);
    extend(extend, s, i + 1);
    chain.steps.pop_back();
  }
  return *best;
}

/// Composes edge_oracle along every simple source-target path, threading
/// the package's arrival time and carrier forward as in the sender
/// preprocessing: the carrier is prepended with its time reset, faster
/// profile agents chase. Exact minimum over all paths; nullopt when the
/// package cannot reach the target.
inline std::optional<EdgeOracleResult> path_oracle(const Instance& original,
                                                   NodeId max_nodes = 8) {
  if (original.graph.node_count > max_nodes)
    throw std::invalid_argument("path oracle node cap exceeded");
  if (original.source == original.target) {
    EdgeOracleResult r;
    r.arrival = Rational(0);
    return r;
  }
  const Instance inst = collapse_collocated_agents(original);
  const auto profiles = arrival_profiles(inst);
  const auto& source_profile =
      profiles[static_cast<std::size_t>(inst.source)];
  if (source_profile.empty()) return std::nullopt;

  std::optional<EdgeOracleResult> best;
  std::vector<char> on_path(static_cast<std::size_t>(inst.graph.node_count), 0);

  struct Carrier {
    AgentId agent;
    Rational velocity;
  };

  auto dfs = [&](auto&& self, NodeId u, const Rational& t,
                 const Carrier& carrier) -> void {
    if (u == inst.target) return;  // extended past the target: pointless
    for (EdgeId e : inst.graph.adjacency[static_cast<std::size_t>(u)]) {
      const Edge& edge = inst.graph.edges[static_cast<std::size_t>(e)];
      const NodeId v = edge.other(u);
      if (on_path[static_cast<std::size_t>(v)]) continue;

      SenderList senders;
      senders.entries.push_back({carrier.agent, t, carrier.velocity});
      for (const ProfileEntry& pe :
           profiles[static_cast<std::size_t>(u)].entries)
        if (pe.velocity > carrier.velocity)
          senders.entries.push_back({pe.agent, pe.arrival, pe.velocity});

      EdgeOracleResult hop = edge_oracle(
          senders, profiles[static_cast<std::size_t>(v)], edge.length, t);
      if (v == inst.target) {
        if (!best || hop.arrival < best->arrival) best = hop;
        continue;
      }
      // Every further edge costs positive time, so a prefix already at the
      // incumbent arrival cannot beat it.
      if (best && hop.arrival >= best->arrival) continue;
      on_path[static_cast<std::size_t>(v)] = 1;
      self(self, v, hop.arrival, {hop.final_carrier, hop.final_velocity});
      on_path[static_cast<std::size_t>(v)] = 0;
    }
  };

  on_path[static_cast<std::size_t>(inst.source)] = 1;
  dfs(dfs, inst.source, source_profile.entries.front().arrival,
      {source_profile.entries.front().agent,
       source_profile.entries.front().velocity});
  return best ? best : std::nullopt;
}

}  // namespace fastdelivery
