#include "s4pr/net.hpp"

#include <algorithm>
#include <set>

namespace s4pr {

std::size_t petri_net::add_place(const std::string& id, place_role role, int subnet) {
  if (place_index_.count(id))
    throw error("DUP_PLACE", "duplicate place id '" + id + "'");
  if (transition_index_.count(id))
    throw error("DUP_PLACE", "id '" + id + "' already names a transition");
  places_.push_back({id, role, subnet});
  place_index_[id] = places_.size() - 1;
  return places_.size() - 1;
}

std::size_t petri_net::add_transition(const std::string& id, int subnet,
                                      bool controllable) {
  if (transition_index_.count(id))
    throw error("DUP_TRANSITION", "duplicate transition id '" + id + "'");
  if (place_index_.count(id))
    throw error("DUP_TRANSITION", "id '" + id + "' already names a place");
  transitions_.push_back({id, subnet, controllable});
  transition_index_[id] = transitions_.size() - 1;
  pre_.emplace_back();
  post_.emplace_back();
  inhib_.emplace_back();
  return transitions_.size() - 1;
}

void petri_net::add_arc(const std::string& from, const std::string& to, int weight,
                        arc_kind kind) {
  if (weight < 1)
    throw error("BAD_WEIGHT", "arc " + from + " -> " + to + " has weight < 1");
  auto fp = find_place(from);
  auto tp = find_place(to);
  auto ft = find_transition(from);
  auto tt = find_transition(to);
  arc a;
  if (fp && tt) {
    a = {*fp, *tt, true, weight, kind};
  } else if (ft && tp) {
    if (kind == arc_kind::inhibitor)
      throw error("BAD_ARC", "inhibitor arc " + from + " -> " + to +
                                 " must run place -> transition");
    a = {*tp, *ft, false, weight, kind};
  } else if (!fp && !ft) {
    throw error("BAD_ARC", "arc endpoint '" + from + "' is unknown");
  } else if (!tp && !tt) {
    throw error("BAD_ARC", "arc endpoint '" + to + "' is unknown");
  } else {
    throw error("BAD_ARC", "arc " + from + " -> " + to +
                               " must connect a place and a transition");
  }
  for (const arc& e : arcs_)
    if (e.place == a.place && e.transition == a.transition &&
        e.from_place == a.from_place && e.kind == a.kind)
      throw error("DUP_ARC", "duplicate arc " + from + " -> " + to);
  arcs_.push_back(a);
  auto& lane = a.kind == arc_kind::inhibitor ? inhib_[a.transition]
               : a.from_place               ? pre_[a.transition]
                                            : post_[a.transition];
  lane.emplace_back(a.place, a.weight);
  std::sort(lane.begin(), lane.end());
}

std::optional<std::size_t> petri_net::find_place(const std::string& id) const {
  auto it = place_index_.find(id);
  if (it == place_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> petri_net::find_transition(const std::string& id) const {
  auto it = transition_index_.find(id);
  if (it == transition_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t petri_net::place_index(const std::string& id) const {
  auto i = find_place(id);
  if (!i) throw error("UNKNOWN_PLACE", "no place named '" + id + "'");
  return *i;
}

std::size_t petri_net::transition_index(const std::string& id) const {
  auto i = find_transition(id);
  if (!i) throw error("UNKNOWN_TRANSITION", "no transition named '" + id + "'");
  return *i;
}

bool is_enabled(const petri_net& net, const marking& m, std::size_t t) {
  if (m.size() != net.place_count())
    throw error("DIMENSION_MISMATCH", "marking has " + std::to_string(m.size()) +
                                          " entries for a net with " +
                                          std::to_string(net.place_count()) +
                                          " places");
  for (auto [p, w] : net.pre(t))
    if (m[p] < w) return false;
  for (auto [p, w] : net.inhibitors(t))
    if (m[p] >= w) return false;
  return true;
}

std::vector<std::size_t> enabled_transitions(const petri_net& net, const marking& m) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < net.transition_count(); ++t)
    if (is_enabled(net, m, t)) out.push_back(t);
  return out;
}

marking fire(const petri_net& net, const marking& m, std::size_t t) {
  if (!is_enabled(net, m, t))
    throw error("DISABLED_TRANSITION",
                "transition '" + net.transition_at(t).id + "' is not enabled");
  marking out = m;
  for (auto [p, w] : net.pre(t)) out[p] -= w;
  for (auto [p, w] : net.post(t)) out[p] += w;
  return out;
}

incidence_matrix make_incidence_matrix(const petri_net& net) {
  incidence_matrix n;
  n.places = net.place_count();
  n.transitions = net.transition_count();
  n.entries.assign(n.places, std::vector<int>(n.transitions, 0));
  for (std::size_t t = 0; t < n.transitions; ++t) {
    for (auto [p, w] : net.pre(t)) n.entries[p][t] -= w;
    for (auto [p, w] : net.post(t)) n.entries[p][t] += w;
  }
  return n;
}

std::pair<petri_net, marking> add_monitor(const petri_net& net, const gmec& g,
                                          const marking& m_ref) {
  for (auto [p, w] : g.weights) {
    if (p >= net.place_count())
      throw error("DIMENSION_MISMATCH", "constraint weight on unknown place index");
    if (w < 0) throw error("BAD_WEIGHT", "constraint weights must be non-negative");
  }
  long long lm = g.value(m_ref);
  if (lm > g.bound)
    throw error("INADMISSIBLE_MARKING",
                "reference marking violates the constraint (l.m = " +
                    std::to_string(lm) + " > " + std::to_string(g.bound) + ")");

  incidence_matrix n = make_incidence_matrix(net);
  std::vector<int> row(net.transition_count(), 0);
  for (std::size_t t = 0; t < net.transition_count(); ++t) {
    long long s = 0;
    for (auto [p, w] : g.weights) s += static_cast<long long>(w) * n.entries[p][t];
    row[t] = static_cast<int>(-s);
    if (row[t] != 0 && !net.transition_at(t).controllable)
      throw error("UNCONTROLLABLE_ARC",
                  "constraint would attach the monitor to uncontrollable "
                  "transition '" + net.transition_at(t).id + "'");
  }

  std::size_t monitors = 0;
  for (const place& p : net.places())
    if (p.role == place_role::monitor) ++monitors;
  std::string id = "pc" + std::to_string(monitors + 1);
  while (net.find_place(id) || net.find_transition(id)) id += "_";

  petri_net out = net;
  out.add_place(id, place_role::monitor, 0);
  for (std::size_t t = 0; t < net.transition_count(); ++t) {
    if (row[t] < 0)
      out.add_arc(id, net.transition_at(t).id, -row[t]);
    else if (row[t] > 0)
      out.add_arc(net.transition_at(t).id, id, row[t]);
  }
  marking m = m_ref;
  m.tokens.push_back(static_cast<int>(g.bound - lm));
  return {std::move(out), std::move(m)};
}

} // namespace s4pr
