#pragma once

#include <cstddef>
#include <vector>

#include "s4pr/reachability.hpp"
#include "s4pr/robustness.hpp"

namespace s4pr {

struct separator_candidate {
  gmec constraint;
  std::vector<std::size_t> covered; // indices into reduced_sets::forbidden
};

struct supervisor_plan {
  std::vector<gmec> constraints;
  std::vector<std::vector<std::size_t>> covered; // per constraint
  bool exact = true;          // false when the cover came from the greedy path
  std::size_t optimality_gap = 0;
};

// Every l in [0, a_max]^|P_E| x b in [0, b_max] with l.a <= b for all reduced
// admissible vectors, paired with the reduced forbidden vectors it excludes
// (l.f >= b + 1). Candidates excluding nothing are dropped. Deterministic
// order: lexicographic l, then b.
std::vector<separator_candidate> enumerate_separators(const reduced_sets& rs,
                                                      int a_max, int b_max);

// Fewest constraints whose covered sets union to all forbidden representatives.
// Exact search after dominance pruning when few candidates remain, greedy with
// a reported gap otherwise; ties broken by smaller weight sum, then smaller
// bound, then lexicographic weights.
supervisor_plan select_minimal_cover(const std::vector<separator_candidate>& cands,
                                     std::size_t forbidden_count);

struct monitor_binding {
  gmec constraint;
  std::size_t place; // monitor place index in the controlled net
};

struct controlled_net {
  petri_net net;
  marking m0;
  std::vector<monitor_binding> monitors;
  std::size_t base_places = 0; // places of the uncontrolled net
};

// One monitor place per plan constraint, initialized against m_ref.
controlled_net build_supervisor(const petri_net& net, const supervisor_plan& plan,
                                const marking& m_ref);

struct verification_report {
  bool forbidden_excluded = false;
  bool admissible_reachable = false;
  bool monitor_equality = false;
  std::size_t reachable_count = 0;
  std::vector<marking> reachable_forbidden;   // failures of (a)
  std::vector<marking> unreached_admissible;  // failures of (b)

  bool ok() const {
    return forbidden_excluded && admissible_reachable && monitor_equality;
  }
};

// Checks, over the controlled net's reachability graph: (a) no reachable
// marking projects onto a forbidden marking, (b) every admissible marking is
// reached (maximal permissiveness), (c) l.m + m(p_c) = b everywhere.
verification_report verify_supervisor(const controlled_net& c,
                                      const std::vector<marking>& admissible_full,
                                      const std::vector<marking>& forbidden_full,
                                      std::size_t node_cap = default_node_cap);

} // namespace s4pr
