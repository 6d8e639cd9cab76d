#pragma once

#include <algorithm>
#include <vector>

#include "fastdelivery/instance.hpp"
#include "fastdelivery/rational.hpp"
#include "fastdelivery/shortest_paths.hpp"

namespace fastdelivery {

struct ProfileEntry {
  AgentId agent = -1;
  Rational arrival;   // d(p_i, v) / v_i
  Rational velocity;  // v_i
};

/// Dominance-filtered list A(v) of agents that can reach node v, strictly
/// increasing in both arrival time and velocity. An omitted agent either
/// arrives at the same time as or after a strictly faster kept agent, or
/// no earlier than an equally fast kept agent.
struct ArrivalProfile {
  NodeId node = -1;
  std::vector<ProfileEntry> entries;

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
};

/// Applies the dominance filter to raw (agent, arrival, velocity) triples.
/// Sorting puts faster agents first among arrival ties, then a single scan
/// keeps an agent only when it is strictly faster than everything kept so
/// far; the id tie-break makes the result deterministic.
inline ArrivalProfile make_profile(NodeId node,
                                   std::vector<ProfileEntry> raw) {
  std::sort(raw.begin(), raw.end(),
            [](const ProfileEntry& a, const ProfileEntry& b) {
              if (a.arrival != b.arrival) return a.arrival < b.arrival;
              if (a.velocity != b.velocity) return a.velocity > b.velocity;
              return a.agent < b.agent;
            });
  ArrivalProfile profile;
  profile.node = node;
  const Rational* fastest = nullptr;
  for (ProfileEntry& e : raw) {
    if (fastest && !(e.velocity > *fastest)) continue;
    profile.entries.push_back(std::move(e));
    fastest = &profile.entries.back().velocity;
  }
  return profile;
}

/// Shortest-path trees for every agent of a (collapse-preprocessed)
/// instance, in agent order. Kept around for schedule reconstruction.
struct AgentPaths {
  std::vector<ShortestPathTree> trees;

  const ShortestPathTree& for_agent(std::size_t agent_index) const {
    return trees[agent_index];
  }
};

inline AgentPaths compute_agent_paths(const Instance& inst) {
  AgentPaths paths;
  paths.trees.reserve(inst.agents.size());
  for (const Agent& a : inst.agents)
    paths.trees.push_back(shortest_path_tree(inst.graph, a.start));
  return paths;
}

/// A(v) for every node; agents that cannot reach a node are skipped.
inline std::vector<ArrivalProfile> arrival_profiles(const Instance& inst,
                                                    const AgentPaths& paths) {
  const std::size_t n = static_cast<std::size_t>(inst.graph.node_count);
  std::vector<ArrivalProfile> profiles(n);
  std::vector<ProfileEntry> raw;
  for (NodeId v = 0; v < inst.graph.node_count; ++v) {
    raw.clear();
    for (std::size_t i = 0; i < inst.agents.size(); ++i) {
      const auto& d = paths.trees[i].dist[static_cast<std::size_t>(v)];
      if (!d) continue;
      raw.push_back({inst.agents[i].id, *d / inst.agents[i].velocity,
                     inst.agents[i].velocity});
    }
    profiles[static_cast<std::size_t>(v)] = make_profile(v, raw);
  }
  return profiles;
}

inline std::vector<ArrivalProfile> arrival_profiles(const Instance& inst) {
  return arrival_profiles(inst, compute_agent_paths(inst));
}

}  // namespace fastdelivery
