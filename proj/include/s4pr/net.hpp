#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "s4pr/error.hpp"

namespace s4pr {

enum class place_role { idle, operation, resource, recovery, monitor };

enum class arc_kind { normal, inhibitor };

struct place {
  std::string id;
  place_role role = place_role::operation;
  int subnet = 0; // 0 = shared / none
};

struct transition {
  std::string id;
  int subnet = 0;
  bool controllable = true;
};

// Arcs are stored place-side: from_place marks orientation p->t vs t->p.
// Inhibitor arcs are always p->t; their weight is a disabling threshold.
struct arc {
  std::size_t place = 0;
  std::size_t transition = 0;
  bool from_place = true;
  int weight = 1;
  arc_kind kind = arc_kind::normal;
};

// Token vector in canonical place order; immutable value semantics.
struct marking {
  std::vector<int> tokens;

  marking() = default;
  explicit marking(std::vector<int> t) : tokens(std::move(t)) {}

  std::size_t size() const { return tokens.size(); }
  int operator[](std::size_t i) const { return tokens[i]; }
  int& operator[](std::size_t i) { return tokens[i]; }

  bool operator==(const marking&) const = default;
  auto operator<=>(const marking&) const = default;
};

struct marking_hash {
  std::size_t operator()(const marking& m) const {
    std::uint64_t h = 14695981039346656037ull;
    for (int v : m.tokens) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

// Linear constraint l . m <= bound with sparse non-negative weights.
struct gmec {
  std::vector<std::pair<std::size_t, int>> weights; // (place index, weight > 0), sorted
  int bound = 0;

  long long value(const marking& m) const {
    long long s = 0;
    for (auto [p, w] : weights) s += static_cast<long long>(w) * m[p];
    return s;
  }
  bool satisfied(const marking& m) const { return value(m) <= bound; }
};

struct incidence_matrix {
  std::size_t places = 0;
  std::size_t transitions = 0;
  std::vector<std::vector<int>> entries; // [place][transition]
};

class petri_net {
public:
  std::size_t add_place(const std::string& id, place_role role, int subnet = 0);
  std::size_t add_transition(const std::string& id, int subnet = 0,
                             bool controllable = true);
  // Orientation is inferred from which endpoint names a place.
  void add_arc(const std::string& from, const std::string& to, int weight = 1,
               arc_kind kind = arc_kind::normal);

  std::size_t place_count() const { return places_.size(); }
  std::size_t transition_count() const { return transitions_.size(); }
  const place& place_at(std::size_t i) const { return places_[i]; }
  const transition& transition_at(std::size_t i) const { return transitions_[i]; }
  const std::vector<place>& places() const { return places_; }
  const std::vector<transition>& transitions() const { return transitions_; }
  const std::vector<arc>& arcs() const { return arcs_; }

  std::optional<std::size_t> find_place(const std::string& id) const;
  std::optional<std::size_t> find_transition(const std::string& id) const;
  std::size_t place_index(const std::string& id) const;       // throws UNKNOWN_PLACE
  std::size_t transition_index(const std::string& id) const;  // throws UNKNOWN_TRANSITION

  // Sparse per-transition adjacency, sorted by place index.
  const std::vector<std::pair<std::size_t, int>>& pre(std::size_t t) const { return pre_[t]; }
  const std::vector<std::pair<std::size_t, int>>& post(std::size_t t) const { return post_[t]; }
  const std::vector<std::pair<std::size_t, int>>& inhibitors(std::size_t t) const { return inhib_[t]; }

private:
  std::vector<place> places_;
  std::vector<transition> transitions_;
  std::vector<arc> arcs_;
  std::unordered_map<std::string, std::size_t> place_index_;
  std::unordered_map<std::string, std::size_t> transition_index_;
  std::vector<std::vector<std::pair<std::size_t, int>>> pre_, post_, inhib_;
};

bool is_enabled(const petri_net& net, const marking& m, std::size_t t);
std::vector<std::size_t> enabled_transitions(const petri_net& net, const marking& m);
marking fire(const petri_net& net, const marking& m, std::size_t t);

incidence_matrix make_incidence_matrix(const petri_net& net);

// Adds one monitor place enforcing g as a place invariant: incidence row
// -l.N restricted to the constraint's support, initial tokens bound - l.m_ref.
// The new place id is pc1, pc2, ... by count of existing monitor places.
std::pair<petri_net, marking> add_monitor(const petri_net& net, const gmec& g,
                                          const marking& m_ref);

} // namespace s4pr
