#include "s4pr/robustness.hpp"

#include <algorithm>
#include <set>

namespace s4pr {

std::pair<petri_net, marking> failure_net(const petri_net& net, std::size_t r,
                                          const marking& m, int j) {
  if (j < 0 || m[r] < j)
    throw error("CANNOT_FAIL", "only idle units can fail: m(" +
                                   net.place_at(r).id + ") = " +
                                   std::to_string(m[r]) + " < " +
                                   std::to_string(j));
  marking out = m;
  out[r] -= j;
  return {net, std::move(out)};
}

std::vector<char> transitions_avoiding(const petri_net& net, std::size_t r) {
  std::vector<char> allowed(net.transition_count(), 1);
  for (std::size_t t = 0; t < net.transition_count(); ++t) {
    for (auto [p, w] : net.pre(t))
      if (p == r) allowed[t] = 0;
    for (auto [p, w] : net.post(t))
      if (p == r) allowed[t] = 0;
  }
  return allowed;
}

namespace {

std::vector<std::size_t> independent_transitions(const s4pr_structure& s,
                                                 std::size_t r) {
  std::vector<std::size_t> need;
  for (int i : independent_subnets(s, r))
    if (s.transitions_of.count(i))
      for (std::size_t t : s.transitions_of.at(i)) need.push_back(t);
  std::sort(need.begin(), need.end());
  return need;
}

} // namespace

bool is_robust(const petri_net& net, const s4pr_structure& s, std::size_t r,
               const marking& m, std::size_t node_cap) {
  std::vector<std::size_t> need = independent_transitions(s, r);
  std::vector<char> allowed = transitions_avoiding(net, r);
  auto [fnet, fm] = failure_net(net, r, m, m[r]);
  reachability_graph g = build_graph(fnet, fm, node_cap, &allowed);
  scc_partition p = strongly_connected_components(g);
  std::vector<std::set<std::size_t>> internal(p.count);
  for (const auto& e : g.edges)
    if (p.comp[e.from] == p.comp[e.to]) internal[p.comp[e.from]].insert(e.transition);
  for (std::size_t c = 0; c < p.count; ++c) {
    bool covers = true;
    for (std::size_t t : need)
      if (!internal[c].count(t)) {
        covers = false;
        break;
      }
    if (covers) return true;
  }
  return false;
}

classification classify(const petri_net& net, const s4pr_structure& s,
                        const reachability_graph& g, std::size_t r,
                        std::size_t node_cap) {
  classification c;
  for (const marking& m : g.nodes)
    (is_robust(net, s, r, m, node_cap) ? c.robust : c.unrobust).push_back(m);
  std::sort(c.robust.begin(), c.robust.end());
  std::sort(c.unrobust.begin(), c.unrobust.end());
  return c;
}

std::vector<marking> forbidden_set(const classification& c, forbidden_policy policy,
                                   std::size_t r, int i) {
  if (policy == forbidden_policy::full_unrobust) return c.unrobust;
  std::vector<marking> out;
  for (const marking& m : c.unrobust)
    if (m[r] >= i) out.push_back(m);
  return out;
}

namespace {

std::set<std::vector<int>> project(const std::vector<marking>& ms,
                                   const std::vector<std::size_t>& pe) {
  std::set<std::vector<int>> out;
  for (const marking& m : ms) {
    std::vector<int> v(pe.size());
    for (std::size_t k = 0; k < pe.size(); ++k) v[k] = m[pe[k]];
    out.insert(std::move(v));
  }
  return out;
}

bool disjoint_projections(const std::vector<marking>& a,
                          const std::vector<marking>& b,
                          const std::vector<std::size_t>& pe) {
  auto pa = project(a, pe);
  auto pb = project(b, pe);
  for (const auto& v : pb)
    if (pa.count(v)) return false;
  return true;
}

} // namespace

std::vector<std::size_t> select_projection_places(const petri_net&,
                                                  const s4pr_structure& s,
                                                  const classification& c,
                                                  std::size_t r) {
  std::vector<int> indep = independent_subnets(s, r);
  std::vector<std::size_t> candidate;
  for (int i : s.subnets) {
    if (std::binary_search(indep.begin(), indep.end(), i)) continue;
    if (s.operations_of.count(i))
      for (std::size_t p : s.operations_of.at(i)) candidate.push_back(p);
  }
  std::sort(candidate.begin(), candidate.end());

  if (c.unrobust.empty() || c.robust.empty()) return {};

  if (!disjoint_projections(c.robust, c.unrobust, candidate)) {
    // widen to every operation place before giving up
    candidate.clear();
    for (const auto& [i, ops] : s.operations_of)
      for (std::size_t p : ops) candidate.push_back(p);
    std::sort(candidate.begin(), candidate.end());
    if (!disjoint_projections(c.robust, c.unrobust, candidate))
      throw error("PROJECTION_OVERLAP",
                  "robust and non-robust markings coincide on every "
                  "operation-place projection");
  }

  std::vector<std::size_t> kept = candidate;
  for (std::size_t p : candidate) {
    std::vector<std::size_t> trial;
    for (std::size_t q : kept)
      if (q != p) trial.push_back(q);
    if (!trial.empty() && disjoint_projections(c.robust, c.unrobust, trial))
      kept = std::move(trial);
  }
  return kept;
}

reduced_sets reduce(const std::vector<marking>& admissible,
                    const std::vector<marking>& forbidden,
                    const std::vector<std::size_t>& pe) {
  auto pa = project(admissible, pe);
  auto pf = project(forbidden, pe);
  for (const auto& v : pf)
    if (pa.count(v))
      throw error("PROJECTION_OVERLAP",
                  "admissible and forbidden markings share a projection");

  auto dominates = [](const std::vector<int>& hi, const std::vector<int>& lo) {
    for (std::size_t k = 0; k < hi.size(); ++k)
      if (hi[k] < lo[k]) return false;
    return true;
  };

  reduced_sets out;
  out.projection_places = pe;
  for (const auto& v : pa) {
    bool maximal = true;
    for (const auto& u : pa)
      if (u != v && dominates(u, v)) {
        maximal = false;
        break;
      }
    if (maximal) out.admissible.push_back(v);
  }
  for (const auto& v : pf) {
    bool minimal = true;
    for (const auto& u : pf)
      if (u != v && dominates(v, u)) {
        minimal = false;
        break;
      }
    if (minimal) out.forbidden.push_back(v);
  }
  return out;
}

} // namespace s4pr
