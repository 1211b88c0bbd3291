#pragma once

#include <cstddef>
#include <optional>
#include <unordered_map>
#include <vector>

#include "s4pr/net.hpp"

namespace s4pr {

inline constexpr std::size_t default_node_cap = 1'000'000;

struct reachability_graph {
  struct edge {
    std::size_t from;
    std::size_t transition;
    std::size_t to;
  };

  std::vector<marking> nodes; // BFS discovery order; nodes[0] is the root
  std::vector<edge> edges;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> succ; // (t, node)
  std::unordered_map<marking, std::size_t, marking_hash> index;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t edge_count() const { return edges.size(); }
};

// Deterministic breadth-first exploration. An optional per-transition mask
// restricts firing to transitions with allowed[t] != 0. Exceeding node_cap
// raises NODE_CAP_EXCEEDED.
reachability_graph build_graph(const petri_net& net, const marking& m0,
                               std::size_t node_cap = default_node_cap,
                               const std::vector<char>* allowed = nullptr);

// Nodes with no enabled transition, in discovery order.
std::vector<marking> deadlocks(const reachability_graph& g, const petri_net& net);

// Per-place maximum token count over all nodes.
std::vector<int> bounds(const reachability_graph& g);

struct scc_partition {
  std::vector<std::size_t> comp; // node -> component id
  std::size_t count = 0;
  std::vector<char> terminal;    // component -> has no edge leaving it
};

scc_partition strongly_connected_components(const reachability_graph& g);

struct liveness_report {
  struct entry {
    std::size_t transition;
    bool live;
    std::optional<marking> witness; // a node from which t can never fire again
  };
  std::vector<entry> entries;

  bool all_live() const {
    for (const entry& e : entries)
      if (!e.live) return false;
    return true;
  }
};

// t is live iff every terminal strongly connected component contains a node
// enabling t (equivalently: from every node a firing of t stays reachable).
liveness_report liveness(const reachability_graph& g, const petri_net& net,
                         const std::vector<std::size_t>& ts);

} // namespace s4pr
