#include "s4pr/reachability.hpp"

#include <algorithm>
#include <deque>

namespace s4pr {

reachability_graph build_graph(const petri_net& net, const marking& m0,
                               std::size_t node_cap,
                               const std::vector<char>* allowed) {
  reachability_graph g;
  g.nodes.push_back(m0);
  g.index.emplace(m0, 0);
  g.succ.emplace_back();
  std::deque<std::size_t> frontier{0};
  while (!frontier.empty()) {
    std::size_t cur = frontier.front();
    frontier.pop_front();
    marking m = g.nodes[cur]; // copy: g.nodes may reallocate below
    for (std::size_t t = 0; t < net.transition_count(); ++t) {
      if (allowed && !(*allowed)[t]) continue;
      if (!is_enabled(net, m, t)) continue;
      marking next = fire(net, m, t);
      auto [it, fresh] = g.index.emplace(next, g.nodes.size());
      if (fresh) {
        if (g.nodes.size() >= node_cap)
          throw error("NODE_CAP_EXCEEDED",
                      "state space exceeds the node cap of " +
                          std::to_string(node_cap) +
                          " markings; the net may be unbounded");
        g.nodes.push_back(std::move(next));
        g.succ.emplace_back();
        frontier.push_back(it->second);
      }
      g.edges.push_back({cur, t, it->second});
      g.succ[cur].emplace_back(t, it->second);
    }
  }
  return g;
}

std::vector<marking> deadlocks(const reachability_graph& g, const petri_net& net) {
  std::vector<marking> out;
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    if (enabled_transitions(net, g.nodes[i]).empty()) out.push_back(g.nodes[i]);
  return out;
}

std::vector<int> bounds(const reachability_graph& g) {
  if (g.nodes.empty()) return {};
  std::vector<int> out(g.nodes[0].size(), 0);
  for (const marking& m : g.nodes)
    for (std::size_t p = 0; p < out.size(); ++p)
      out[p] = std::max(out[p], m[p]);
  return out;
}

// Iterative Tarjan over the successor lists.
scc_partition strongly_connected_components(const reachability_graph& g) {
  std::size_t n = g.nodes.size();
  scc_partition out;
  out.comp.assign(n, 0);
  std::vector<std::size_t> low(n, 0), num(n, 0);
  std::vector<char> on_stack(n, 0), seen(n, 0);
  std::vector<std::size_t> stack;
  std::size_t counter = 1;

  struct frame {
    std::size_t node;
    std::size_t next_edge;
  };
  std::vector<frame> call;

  for (std::size_t root = 0; root < n; ++root) {
    if (seen[root]) continue;
    call.push_back({root, 0});
    while (!call.empty()) {
      auto& [v, ei] = call.back();
      if (ei == 0) {
        seen[v] = 1;
        num[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = 1;
      }
      if (ei < g.succ[v].size()) {
        std::size_t w = g.succ[v][ei++].second;
        if (!seen[w])
          call.push_back({w, 0});
        else if (on_stack[w])
          low[v] = std::min(low[v], num[w]);
      } else {
        if (low[v] == num[v]) {
          std::size_t c = out.count++;
          while (true) {
            std::size_t w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            out.comp[w] = c;
            if (w == v) break;
          }
        }
        std::size_t done = v;
        call.pop_back();
        if (!call.empty())
          low[call.back().node] = std::min(low[call.back().node], low[done]);
      }
    }
  }

  out.terminal.assign(out.count, 1);
  for (const auto& e : g.edges)
    if (out.comp[e.from] != out.comp[e.to]) out.terminal[out.comp[e.from]] = 0;
  return out;
}

liveness_report liveness(const reachability_graph& g, const petri_net& net,
                         const std::vector<std::size_t>& ts) {
  for (std::size_t t : ts)
    if (t >= net.transition_count())
      throw error("UNKNOWN_TRANSITION", "liveness queried for a transition "
                                        "outside the net");
  scc_partition p = strongly_connected_components(g);

  // union of transitions enabled somewhere inside each component
  std::vector<std::vector<char>> enabled_in(
      p.count, std::vector<char>(net.transition_count(), 0));
  for (std::size_t v = 0; v < g.nodes.size(); ++v)
    for (std::size_t t : enabled_transitions(net, g.nodes[v]))
      enabled_in[p.comp[v]][t] = 1;

  liveness_report out;
  for (std::size_t t : ts) {
    liveness_report::entry e{t, true, std::nullopt};
    for (std::size_t c = 0; c < p.count && e.live; ++c) {
      if (!p.terminal[c] || enabled_in[c][t]) continue;
      e.live = false;
      for (std::size_t v = 0; v < g.nodes.size(); ++v)
        if (p.comp[v] == c) {
          e.witness = g.nodes[v];
          break;
        }
    }
    out.entries.push_back(std::move(e));
  }
  return out;
}

} // namespace s4pr
