#pragma once

#include <map>
#include <vector>

#include "s4pr/net.hpp"

namespace s4pr {

// Place-invariant vector I_r: dense weights over the net's places.
// I_r . m is constant over every reachable marking.
struct semiflow {
  std::vector<int> weights;

  long long value(const marking& m) const {
    long long s = 0;
    std::size_t n = weights.size() < m.size() ? weights.size() : m.size();
    for (std::size_t p = 0; p < n; ++p)
      s += static_cast<long long>(weights[p]) * m[p];
    return s;
  }
};

// Structural view of a net made of state-machine process subnets sharing
// conservative resource places.
struct s4pr_structure {
  std::vector<int> subnets;                                // sorted, subnet > 0
  std::map<int, std::size_t> idle_of;                      // subnet -> idle place
  std::map<int, std::vector<std::size_t>> operations_of;   // subnet -> op places
  std::map<int, std::vector<std::size_t>> transitions_of;  // subnet -> transitions
  std::vector<std::size_t> resource_places;                // place order
  std::vector<std::size_t> unreliable;                     // subset of resources
  std::map<std::size_t, semiflow> semiflows;               // resource -> I_r
};

// Groups places/transitions by role and subnet tag. Shape violations are left
// for validate_s4pr to report; extraction itself only throws when a referenced
// unreliable id is not a resource place.
s4pr_structure extract_structure(const petri_net& net,
                                 const std::vector<std::size_t>& unreliable);

// Empty result iff every subnet (resources removed) is a strongly connected
// state machine whose every cycle passes through its idle place, and the
// subnet partitions are disjoint.
std::vector<diagnostic> validate_s4pr(const petri_net& net, const s4pr_structure& s);

// Minimal non-negative integer vector I with I(r) = 1 and I.N = 0 whose
// support holds r, no other resource, no idle place, and >= 1 operation place.
semiflow resource_semiflow(const petri_net& net, const s4pr_structure& s,
                           std::size_t r);

// Computes and stores the semiflow of every resource place.
void compute_semiflows(const petri_net& net, s4pr_structure& s);

// Initial-marking validity: idle places marked, operation places empty,
// resource capacity at least the largest semiflow weight it must cover.
std::vector<diagnostic> check_initial_marking(const petri_net& net,
                                              const s4pr_structure& s,
                                              const marking& m0);

// Subnets whose operation places are disjoint from the support of I_r.
std::vector<int> independent_subnets(const s4pr_structure& s, std::size_t r);

} // namespace s4pr
