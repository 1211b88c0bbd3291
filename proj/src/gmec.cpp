#include "s4pr/gmec.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

namespace s4pr {

std::vector<separator_candidate> enumerate_separators(const reduced_sets& rs,
                                                      int a_max, int b_max) {
  std::vector<separator_candidate> out;
  if (rs.forbidden.empty()) return out;
  std::size_t k = rs.projection_places.size();
  if (k == 0) return out;

  std::vector<int> l(k, 0);
  auto advance = [&]() {
    for (std::size_t i = k; i-- > 0;) {
      if (l[i] < a_max) {
        ++l[i];
        std::fill(l.begin() + i + 1, l.end(), 0);
        return true;
      }
    }
    return false;
  };

  while (advance()) { // skips the all-zero vector
    long long worst_admissible = 0;
    for (const auto& a : rs.admissible) {
      long long s = 0;
      for (std::size_t i = 0; i < k; ++i) s += (long long)l[i] * a[i];
      worst_admissible = std::max(worst_admissible, s);
    }
    for (int b = 0; b <= b_max; ++b) {
      if (worst_admissible > b) continue;
      separator_candidate c;
      for (std::size_t f = 0; f < rs.forbidden.size(); ++f) {
        long long s = 0;
        for (std::size_t i = 0; i < k; ++i)
          s += (long long)l[i] * rs.forbidden[f][i];
        if (s >= b + 1) c.covered.push_back(f);
      }
      if (c.covered.empty()) continue;
      for (std::size_t i = 0; i < k; ++i)
        if (l[i] > 0) c.constraint.weights.emplace_back(rs.projection_places[i], l[i]);
      c.constraint.bound = b;
      out.push_back(std::move(c));
    }
  }
  return out;
}

namespace {

int weight_sum(const gmec& g) {
  int s = 0;
  for (auto [p, w] : g.weights) s += w;
  return s;
}

bool subset_of(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

} // namespace

supervisor_plan select_minimal_cover(const std::vector<separator_candidate>& cands,
                                     std::size_t forbidden_count) {
  supervisor_plan plan;
  if (forbidden_count == 0) return plan;

  // canonical order: smaller weight sum, smaller bound, then enumeration order
  // (which is lexicographic in the weight vector)
  std::vector<std::size_t> order(cands.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    int sx = weight_sum(cands[x].constraint), sy = weight_sum(cands[y].constraint);
    if (sx != sy) return sx < sy;
    return cands[x].constraint.bound < cands[y].constraint.bound;
  });

  // dominance pruning: a candidate is useless if an already-kept one (hence
  // with no larger weight sum) excludes a superset of its forbidden vectors
  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    bool dominated = false;
    for (std::size_t k : kept)
      if (subset_of(cands[idx].covered, cands[k].covered)) {
        dominated = true;
        break;
      }
    if (!dominated) kept.push_back(idx);
  }

  std::vector<char> covered_any(forbidden_count, 0);
  for (std::size_t k : kept)
    for (std::size_t f : cands[k].covered) covered_any[f] = 1;
  std::vector<std::size_t> uncovered;
  for (std::size_t f = 0; f < forbidden_count; ++f)
    if (!covered_any[f]) uncovered.push_back(f);
  if (!uncovered.empty()) {
    std::string which;
    for (std::size_t f : uncovered) which += " #" + std::to_string(f);
    throw error("UNSEPARABLE",
                "no admissible-respecting constraint excludes forbidden "
                "representative(s)" + which);
  }

  std::vector<std::size_t> chosen;
  if (kept.size() <= 20) {
    // exact minimum cover: combinations by size, lexicographic over kept order
    for (std::size_t size = 1; size <= kept.size() && chosen.empty(); ++size) {
      std::vector<std::size_t> pick(size);
      auto search = [&](auto&& self, std::size_t slot, std::size_t from) -> bool {
        if (slot == size) {
          std::vector<char> cov(forbidden_count, 0);
          for (std::size_t s = 0; s < size; ++s)
            for (std::size_t f : cands[kept[pick[s]]].covered) cov[f] = 1;
          for (std::size_t f = 0; f < forbidden_count; ++f)
            if (!cov[f]) return false;
          return true;
        }
        for (std::size_t i = from; i + (size - slot) <= kept.size(); ++i) {
          pick[slot] = i;
          if (self(self, slot + 1, i + 1)) return true;
        }
        return false;
      };
      if (search(search, 0, 0))
        for (std::size_t i : pick) chosen.push_back(kept[i]);
    }
  } else {
    plan.exact = false;
    std::vector<char> cov(forbidden_count, 0);
    std::size_t remaining = forbidden_count, best_single = 0;
    for (std::size_t k : kept)
      best_single = std::max(best_single, cands[k].covered.size());
    while (remaining > 0) {
      std::size_t best = kept.size();
      std::size_t best_gain = 0;
      for (std::size_t i = 0; i < kept.size(); ++i) {
        std::size_t gain = 0;
        for (std::size_t f : cands[kept[i]].covered)
          if (!cov[f]) ++gain;
        if (gain > best_gain) {
          best_gain = gain;
          best = i;
        }
      }
      chosen.push_back(kept[best]);
      for (std::size_t f : cands[kept[best]].covered)
        if (!cov[f]) {
          cov[f] = 1;
          --remaining;
        }
    }
    std::size_t lower = (forbidden_count + best_single - 1) / best_single;
    plan.optimality_gap = chosen.size() > lower ? chosen.size() - lower : 0;
  }

  for (std::size_t idx : chosen) {
    plan.constraints.push_back(cands[idx].constraint);
    plan.covered.push_back(cands[idx].covered);
  }
  return plan;
}

controlled_net build_supervisor(const petri_net& net, const supervisor_plan& plan,
                                const marking& m_ref) {
  controlled_net out{net, m_ref, {}, net.place_count()};
  for (const gmec& g : plan.constraints) {
    auto [next, m] = add_monitor(out.net, g, out.m0);
    out.net = std::move(next);
    out.m0 = std::move(m);
    out.monitors.push_back({g, out.net.place_count() - 1});
  }
  return out;
}

verification_report verify_supervisor(const controlled_net& c,
                                      const std::vector<marking>& admissible_full,
                                      const std::vector<marking>& forbidden_full,
                                      std::size_t node_cap) {
  reachability_graph g = build_graph(c.net, c.m0, node_cap);

  verification_report rep;
  rep.reachable_count = g.node_count();

  std::set<std::vector<int>> forbidden, admissible, seen;
  for (const marking& m : forbidden_full) forbidden.insert(m.tokens);
  for (const marking& m : admissible_full) admissible.insert(m.tokens);

  rep.forbidden_excluded = true;
  rep.monitor_equality = true;
  for (const marking& m : g.nodes) {
    std::vector<int> base(m.tokens.begin(), m.tokens.begin() + c.base_places);
    if (forbidden.count(base)) {
      rep.forbidden_excluded = false;
      rep.reachable_forbidden.push_back(marking{base});
    }
    seen.insert(std::move(base));
    for (const monitor_binding& b : c.monitors)
      if (b.constraint.value(m) + m[b.place] != b.constraint.bound)
        rep.monitor_equality = false;
  }

  rep.admissible_reachable = true;
  for (const auto& a : admissible)
    if (!seen.count(a)) {
      rep.admissible_reachable = false;
      rep.unreached_admissible.push_back(marking{a});
    }

  std::sort(rep.reachable_forbidden.begin(), rep.reachable_forbidden.end());
  std::sort(rep.unreached_admissible.begin(), rep.unreached_admissible.end());
  return rep;
}

} // namespace s4pr
