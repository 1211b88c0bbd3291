#include "s4pr/structure.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace s4pr {

namespace {

bool is_process_place(place_role r) {
  return r == place_role::idle || r == place_role::operation;
}

bool touches_recovery(const petri_net& net, std::size_t t) {
  for (auto [p, w] : net.pre(t))
    if (net.place_at(p).role == place_role::recovery) return true;
  for (auto [p, w] : net.post(t))
    if (net.place_at(p).role == place_role::recovery) return true;
  return false;
}

} // namespace

s4pr_structure extract_structure(const petri_net& net,
                                 const std::vector<std::size_t>& unreliable) {
  s4pr_structure s;
  std::set<int> ids;
  for (std::size_t p = 0; p < net.place_count(); ++p) {
    const place& pl = net.place_at(p);
    switch (pl.role) {
      case place_role::idle:
        if (!s.idle_of.count(pl.subnet)) s.idle_of[pl.subnet] = p;
        if (pl.subnet > 0) ids.insert(pl.subnet);
        break;
      case place_role::operation:
        s.operations_of[pl.subnet].push_back(p);
        if (pl.subnet > 0) ids.insert(pl.subnet);
        break;
      case place_role::resource:
        s.resource_places.push_back(p);
        break;
      default:
        break;
    }
  }
  for (std::size_t t = 0; t < net.transition_count(); ++t) {
    int sub = net.transition_at(t).subnet;
    if (sub > 0) {
      s.transitions_of[sub].push_back(t);
      ids.insert(sub);
    }
  }
  s.subnets.assign(ids.begin(), ids.end());
  for (std::size_t r : unreliable) {
    if (r >= net.place_count() || net.place_at(r).role != place_role::resource)
      throw error("NOT_RESOURCE", "unreliable id does not name a resource place");
    s.unreliable.push_back(r);
  }
  std::sort(s.unreliable.begin(), s.unreliable.end());
  return s;
}

std::vector<diagnostic> validate_s4pr(const petri_net& net, const s4pr_structure& s) {
  std::vector<diagnostic> out;

  // one idle place per subnet
  std::map<int, std::vector<std::size_t>> idles;
  for (std::size_t p = 0; p < net.place_count(); ++p)
    if (net.place_at(p).role == place_role::idle)
      idles[net.place_at(p).subnet].push_back(p);
  for (int i : s.subnets) {
    auto it = idles.find(i);
    std::size_t n = it == idles.end() ? 0 : it->second.size();
    if (n != 1)
      out.push_back({"IDLE_COUNT", "subnet " + std::to_string(i) + " has " +
                                       std::to_string(n) + " idle places"});
    if (s.transitions_of.count(i) == 0 || s.transitions_of.at(i).empty())
      out.push_back({"EMPTY_SUBNET",
                     "subnet " + std::to_string(i) + " has no transitions"});
  }

  // process places may only be touched by their own subnet's transitions
  for (const arc& a : net.arcs()) {
    const place& pl = net.place_at(a.place);
    if (!is_process_place(pl.role) || a.kind == arc_kind::inhibitor) continue;
    int tsub = net.transition_at(a.transition).subnet;
    if (tsub != pl.subnet)
      out.push_back({"OP_PLACE_SHARED",
                     "place '" + pl.id + "' of subnet " + std::to_string(pl.subnet) +
                         " is wired to transition '" +
                         net.transition_at(a.transition).id + "' of subnet " +
                         std::to_string(tsub)});
  }

  // state-machine shape: per subnet transition, exactly one weight-1 process
  // input and one weight-1 process output
  for (int i : s.subnets) {
    if (!s.transitions_of.count(i)) continue;
    for (std::size_t t : s.transitions_of.at(i)) {
      int ins = 0, outs = 0;
      bool unit = true;
      for (auto [p, w] : net.pre(t))
        if (is_process_place(net.place_at(p).role)) {
          ++ins;
          if (w != 1) unit = false;
        }
      for (auto [p, w] : net.post(t))
        if (is_process_place(net.place_at(p).role)) {
          ++outs;
          if (w != 1) unit = false;
        }
      if (ins != 1 || outs != 1 || !unit)
        out.push_back({"NOT_STATE_MACHINE",
                       "transition '" + net.transition_at(t).id + "' has " +
                           std::to_string(ins) + " process inputs and " +
                           std::to_string(outs) +
                           (unit ? " process outputs" :
                                   " process outputs with non-unit weight")});
    }
  }

  // per-subnet graph: strong connectivity, and acyclicity once idle is removed
  for (int i : s.subnets) {
    std::vector<std::size_t> nodes;
    if (idles.count(i)) nodes.insert(nodes.end(), idles[i].begin(), idles[i].end());
    if (s.operations_of.count(i))
      nodes.insert(nodes.end(), s.operations_of.at(i).begin(),
                   s.operations_of.at(i).end());
    if (nodes.empty() || !s.transitions_of.count(i)) continue;
    std::map<std::size_t, std::size_t> local;
    for (std::size_t k = 0; k < nodes.size(); ++k) local[nodes[k]] = k;
    std::vector<std::vector<std::size_t>> fwd(nodes.size()), bwd(nodes.size());
    for (std::size_t t : s.transitions_of.at(i)) {
      std::vector<std::size_t> from, to;
      for (auto [p, w] : net.pre(t))
        if (local.count(p)) from.push_back(local[p]);
      for (auto [p, w] : net.post(t))
        if (local.count(p)) to.push_back(local[p]);
      for (std::size_t u : from)
        for (std::size_t v : to) {
          fwd[u].push_back(v);
          bwd[v].push_back(u);
        }
    }
    auto reach = [&](const std::vector<std::vector<std::size_t>>& g) {
      std::vector<char> seen(nodes.size(), 0);
      std::deque<std::size_t> q{0};
      seen[0] = 1;
      while (!q.empty()) {
        std::size_t u = q.front();
        q.pop_front();
        for (std::size_t v : g[u])
          if (!seen[v]) {
            seen[v] = 1;
            q.push_back(v);
          }
      }
      return std::count(seen.begin(), seen.end(), 1) == (long)nodes.size();
    };
    if (!reach(fwd) || !reach(bwd)) {
      out.push_back({"NOT_STRONGLY_CONNECTED",
                     "subnet " + std::to_string(i) +
                         " is not a strongly connected state machine"});
      continue;
    }
    // drop idle nodes; any remaining cycle avoids the idle place
    std::vector<char> dropped(nodes.size(), 0);
    for (std::size_t k = 0; k < nodes.size(); ++k)
      if (net.place_at(nodes[k]).role == place_role::idle) dropped[k] = 1;
    std::vector<int> state(nodes.size(), 0); // 0 new, 1 on stack, 2 done
    bool cyclic = false;
    auto dfs = [&](auto&& self, std::size_t u) -> void {
      state[u] = 1;
      for (std::size_t v : fwd[u]) {
        if (dropped[v] || cyclic) continue;
        if (state[v] == 1) {
          cyclic = true;
          return;
        }
        if (state[v] == 0) self(self, v);
      }
      state[u] = 2;
    };
    for (std::size_t k = 0; k < nodes.size() && !cyclic; ++k)
      if (!dropped[k] && state[k] == 0) dfs(dfs, k);
    if (cyclic)
      out.push_back({"CYCLE_AVOIDS_IDLE",
                     "subnet " + std::to_string(i) +
                         " has a cycle that avoids its idle place"});
  }

  return out;
}

semiflow resource_semiflow(const petri_net& net, const s4pr_structure& s,
                           std::size_t r) {
  if (r >= net.place_count() || net.place_at(r).role != place_role::resource)
    throw error("NOT_RESOURCE", "semiflow requested for a non-resource place");

  incidence_matrix n = make_incidence_matrix(net);
  semiflow f;
  f.weights.assign(net.place_count(), 0);
  f.weights[r] = 1;

  // Per subnet, weights propagate along the state machine from the idle place
  // (weight 0): across transition t from input u to output w,
  //   -I(u) + I(w) + N[r][t] = 0.
  for (int i : s.subnets) {
    if (!s.transitions_of.count(i)) continue;
    std::vector<char> known(net.place_count(), 0);
    if (s.idle_of.count(i)) known[s.idle_of.at(i)] = 1;
    bool progress = true;
    while (progress) {
      progress = false;
      for (std::size_t t : s.transitions_of.at(i)) {
        std::size_t u = net.place_count(), w = net.place_count();
        for (auto [p, wt] : net.pre(t))
          if (is_process_place(net.place_at(p).role)) u = p;
        for (auto [p, wt] : net.post(t))
          if (is_process_place(net.place_at(p).role)) w = p;
        if (u == net.place_count() || w == net.place_count()) continue;
        int delta = n.entries[r][t];
        if (known[u] && !known[w]) {
          f.weights[w] = f.weights[u] - delta;
          known[w] = 1;
          progress = true;
        } else if (!known[u] && known[w]) {
          f.weights[u] = f.weights[w] + delta;
          known[u] = 1;
          progress = true;
        } else if (known[u] && known[w] && f.weights[w] != f.weights[u] - delta) {
          throw error("NO_SEMIFLOW", "net is not conservative in resource '" +
                                         net.place_at(r).id + "'");
        }
      }
    }
  }

  // exact verification over every transition outside the recovery pair
  for (std::size_t t = 0; t < net.transition_count(); ++t) {
    if (touches_recovery(net, t)) continue;
    long long dot = 0;
    for (std::size_t p = 0; p < net.place_count(); ++p)
      dot += static_cast<long long>(f.weights[p]) * n.entries[p][t];
    if (dot != 0)
      throw error("NO_SEMIFLOW", "net is not conservative in resource '" +
                                     net.place_at(r).id + "'");
  }
  bool has_op = false;
  for (std::size_t p = 0; p < net.place_count(); ++p) {
    if (f.weights[p] < 0)
      throw error("NO_SEMIFLOW", "resource '" + net.place_at(r).id +
                                     "' would need a negative weight on '" +
                                     net.place_at(p).id + "'");
    if (f.weights[p] > 0 && net.place_at(p).role == place_role::operation)
      has_op = true;
  }
  if (!has_op)
    throw error("NO_SEMIFLOW", "resource '" + net.place_at(r).id +
                                   "' is used by no operation place");
  return f;
}

void compute_semiflows(const petri_net& net, s4pr_structure& s) {
  for (std::size_t r : s.resource_places)
    s.semiflows[r] = resource_semiflow(net, s, r);
}

std::vector<diagnostic> check_initial_marking(const petri_net& net,
                                              const s4pr_structure& s,
                                              const marking& m0) {
  std::vector<diagnostic> out;
  if (m0.size() != net.place_count()) {
    out.push_back({"DIMENSION_MISMATCH", "marking size does not match the net"});
    return out;
  }
  for (auto [i, p] : s.idle_of)
    if (m0[p] <= 0)
      out.push_back({"IDLE_UNMARKED",
                     "idle place '" + net.place_at(p).id + "' must start > 0"});
  for (const auto& [i, ops] : s.operations_of)
    for (std::size_t p : ops)
      if (m0[p] != 0)
        out.push_back({"OPERATION_MARKED", "operation place '" +
                                               net.place_at(p).id +
                                               "' must start empty"});
  for (std::size_t r : s.resource_places) {
    auto it = s.semiflows.find(r);
    if (it == s.semiflows.end()) continue;
    int need = 0;
    for (std::size_t p = 0; p < net.place_count(); ++p)
      if (p != r && net.place_at(p).role == place_role::operation)
        need = std::max(need, it->second.weights[p]);
    if (m0[r] < need)
      out.push_back({"RESOURCE_CAPACITY_LOW",
                     "resource '" + net.place_at(r).id + "' starts with " +
                         std::to_string(m0[r]) + " tokens but stages need " +
                         std::to_string(need)});
  }
  return out;
}

std::vector<int> independent_subnets(const s4pr_structure& s, std::size_t r) {
  if (!std::binary_search(s.unreliable.begin(), s.unreliable.end(), r))
    throw error("NOT_UNRELIABLE", "place is not declared unreliable");
  auto it = s.semiflows.find(r);
  if (it == s.semiflows.end())
    throw error("NO_SEMIFLOW", "semiflow for the resource has not been computed");
  std::vector<int> out;
  for (int i : s.subnets) {
    bool touched = false;
    if (s.operations_of.count(i))
      for (std::size_t p : s.operations_of.at(i))
        if (it->second.weights[p] > 0) touched = true;
    if (!touched) out.push_back(i);
  }
  return out;
}

} // namespace s4pr
