#pragma once

#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "fastdelivery/instance.hpp"
#include "fastdelivery/rational.hpp"

namespace fastdelivery {

/// Exact single-source shortest paths. Unreachable nodes carry nullopt.
struct ShortestPathTree {
  NodeId root = -1;
  std::vector<std::optional<Rational>> dist;
  std::vector<NodeId> parent;  // -1 for the root and unreachable nodes

  bool reachable(NodeId v) const {
    return dist[static_cast<std::size_t>(v)].has_value();
  }

  /// Node sequence root -> v; empty when v is unreachable.
  std::vector<NodeId> path_to(NodeId v) const {
    if (!reachable(v)) return {};
    std::vector<NodeId> nodes;
    for (NodeId cur = v; cur != -1; cur = parent[static_cast<std::size_t>(cur)])
      nodes.push_back(cur);
    std::reverse(nodes.begin(), nodes.end());
    return nodes;
  }
};

/// Dijkstra with a binary heap and lazy deletion; exact rational distances.
inline ShortestPathTree shortest_path_tree(const Graph& graph, NodeId root) {
  const std::size_t n = static_cast<std::size_t>(graph.node_count);
  ShortestPathTree tree;
  tree.root = root;
  tree.dist.assign(n, std::nullopt);
  tree.parent.assign(n, -1);

  using QueueEntry = std::pair<Rational, NodeId>;
  auto later = [](const QueueEntry& a, const QueueEntry& b) {
    return a.first > b.first || (a.first == b.first && a.second > b.second);
  };
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, decltype(later)>
      queue(later);

  std::vector<char> done(n, 0);
  tree.dist[static_cast<std::size_t>(root)] = Rational(0);
  queue.push({Rational(0), root});
  while (!queue.empty()) {
    auto [d, u] = queue.top();
    queue.pop();
    if (done[static_cast<std::size_t>(u)]) continue;
    done[static_cast<std::size_t>(u)] = 1;
    for (EdgeId e : graph.adjacency[static_cast<std::size_t>(u)]) {
      const Edge& edge = graph.edges[static_cast<std::size_t>(e)];
      NodeId v = edge.other(u);
      if (done[static_cast<std::size_t>(v)]) continue;
      Rational nd = d + edge.length;
      auto& dv = tree.dist[static_cast<std::size_t>(v)];
      if (!dv || nd < *dv) {
        dv = nd;
        tree.parent[static_cast<std::size_t>(v)] = u;
        queue.push({std::move(nd), v});
      }
    }
  }
  return tree;
}

}  // namespace fastdelivery
