#pragma once

#include <utility>
#include <vector>

#include "s4pr/reachability.hpp"
#include "s4pr/structure.hpp"

namespace s4pr {

// Reachable markings split by whether the failure-independent subnets can keep
// cycling after total failure of the unreliable resource. Lists are sorted
// lexicographically over the place order.
struct classification {
  std::vector<marking> robust;
  std::vector<marking> unrobust;
};

enum class forbidden_policy {
  full_unrobust, // forbid every non-robust marking (default)
  threshold      // forbid non-robust markings with m(r) >= i
};

// Marking after j idle units of r move to recovery; the net itself is
// unchanged. Requires m(r) >= j (units in use cannot fail).
std::pair<petri_net, marking> failure_net(const petri_net& net, std::size_t r,
                                          const marking& m, int j);

// Transitions with no arc touching r. While r is failed its neighbourhood is
// frozen: consumers starve on the emptied place and producers may not return
// units of a failed resource.
std::vector<char> transitions_avoiding(const petri_net& net, std::size_t r);

// True iff the restricted reachability graph from m (with m(r) zeroed and
// r-adjacent transitions frozen) contains a strongly connected component whose
// internal edges fire every transition of every independent subnet.
bool is_robust(const petri_net& net, const s4pr_structure& s, std::size_t r,
               const marking& m, std::size_t node_cap = default_node_cap);

classification classify(const petri_net& net, const s4pr_structure& s,
                        const reachability_graph& g, std::size_t r,
                        std::size_t node_cap = default_node_cap);

// Policy-selected subset of the non-robust markings.
std::vector<marking> forbidden_set(const classification& c, forbidden_policy policy,
                                   std::size_t r, int i);

// Operation places of the subnets dependent on r, greedily pruned (in place
// order) while the robust/non-robust projections stay disjoint. Falls back to
// all operation places if the dependent candidate set alone cannot separate.
std::vector<std::size_t> select_projection_places(const petri_net& net,
                                                  const s4pr_structure& s,
                                                  const classification& c,
                                                  std::size_t r);

struct reduced_sets {
  std::vector<std::size_t> projection_places;     // P_E, place order
  std::vector<std::vector<int>> admissible;       // maximal representatives
  std::vector<std::vector<int>> forbidden;        // minimal representatives
};

// Projects both sets onto pe, deduplicates, and keeps componentwise-maximal
// admissible and componentwise-minimal forbidden vectors. Overlapping
// projections raise PROJECTION_OVERLAP.
reduced_sets reduce(const std::vector<marking>& admissible,
                    const std::vector<marking>& forbidden,
                    const std::vector<std::size_t>& pe);

} // namespace s4pr
