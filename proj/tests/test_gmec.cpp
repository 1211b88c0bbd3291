#include <doctest.h>

#include <algorithm>
#include <set>

#include "s4pr/gmec.hpp"
#include "support/workcell.hpp"

using namespace s4pr;
using fixture::mk;

namespace {

struct prepared {
  fixture::workcell w;
  s4pr_structure s;
  classification c;
  reduced_sets rs;
};

prepared prepare() {
  prepared p{fixture::build_workcell(), {}, {}, {}};
  p.s = extract_structure(p.w.net, {p.w.resource});
  compute_semiflows(p.w.net, p.s);
  reachability_graph g = build_graph(p.w.net, p.w.m0);
  p.c = classify(p.w.net, p.s, g, p.w.resource);
  std::vector<std::size_t> pe =
      select_projection_places(p.w.net, p.s, p.c, p.w.resource);
  p.rs = reduce(p.c.robust, p.c.unrobust, pe);
  return p;
}

// Simple two-place reduced sets for synthetic cover scenarios.
reduced_sets synthetic(std::vector<std::vector<int>> adm,
                       std::vector<std::vector<int>> forb) {
  reduced_sets rs;
  rs.projection_places = {0, 1};
  rs.admissible = std::move(adm);
  rs.forbidden = std::move(forb);
  return rs;
}

} // namespace

TEST_CASE("separator enumeration is bounded, deterministic, and sound") {
  auto p = prepare();
  std::vector<separator_candidate> cands = enumerate_separators(p.rs, 3, 9);
  CHECK(!cands.empty());

  for (const separator_candidate& c : cands) {
    // Admissible representatives all satisfy the constraint...
    for (const auto& a : p.rs.admissible) {
      long long v = 0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        for (auto [pl, wt] : c.constraint.weights)
          if (pl == p.rs.projection_places[k]) v += (long long)wt * a[k];
      }
      CHECK(v <= c.constraint.bound);
    }
    // ...and each covered forbidden representative violates it.
    CHECK(!c.covered.empty());
    for (std::size_t fi : c.covered) {
      const auto& f = p.rs.forbidden[fi];
      long long v = 0;
      for (std::size_t k = 0; k < f.size(); ++k)
        for (auto [pl, wt] : c.constraint.weights)
          if (pl == p.rs.projection_places[k]) v += (long long)wt * f[k];
      CHECK(v >= c.constraint.bound + 1);
    }
  }

  // The known full separator is among the candidates.
  bool found = false;
  for (const separator_candidate& c : cands) {
    std::vector<int> l(3, 0);
    for (auto [pl, wt] : c.constraint.weights)
      for (std::size_t k = 0; k < 3; ++k)
        if (pl == p.rs.projection_places[k]) l[k] = wt;
    if (l == std::vector<int>{1, 1, 2} && c.constraint.bound == 1) {
      found = true;
      CHECK(c.covered == std::vector<std::size_t>{0, 1, 2});
    }
  }
  CHECK(found);
}

TEST_CASE("the minimal cover is a single canonical constraint") {
  auto p = prepare();
  std::vector<separator_candidate> cands = enumerate_separators(p.rs, 3, 9);
  supervisor_plan plan = select_minimal_cover(cands, p.rs.forbidden.size());

  REQUIRE(plan.constraints.size() == 1);
  CHECK(plan.exact);
  CHECK(plan.optimality_gap == 0);
  const gmec& g = plan.constraints[0];
  CHECK(g.bound == 1);
  REQUIRE(g.weights.size() == 3);
  CHECK(g.weights[0] == std::pair<std::size_t, int>{p.w.net.place_index("p2"), 1});
  CHECK(g.weights[1] == std::pair<std::size_t, int>{p.w.net.place_index("p3"), 1});
  CHECK(g.weights[2] == std::pair<std::size_t, int>{p.w.net.place_index("p4"), 2});
}

TEST_CASE("tight bounds still admit a cover; missing bounds fail loudly") {
  auto p = prepare();

  // a_max=2, b_max=2 still contains a full cover for these sets.
  supervisor_plan small =
      select_minimal_cover(enumerate_separators(p.rs, 2, 2), p.rs.forbidden.size());
  CHECK(!small.constraints.empty());

  // a_max=0 allows only l=0 which is dropped: nothing can be covered.
  CHECK_THROWS_AS((void)select_minimal_cover(enumerate_separators(p.rs, 0, 9),
                                             p.rs.forbidden.size()),
                  error);
  try {
    (void)select_minimal_cover(enumerate_separators(p.rs, 0, 9),
                               p.rs.forbidden.size());
  } catch (const error& e) {
    CHECK(std::string(e.code()) == "UNSEPARABLE");
  }
}

TEST_CASE("unseparable sets are reported, not silently dropped") {
  // The forbidden vector (0,0) can never violate l.m >= b+1 with b >= 0.
  reduced_sets rs = synthetic({{1, 1}}, {{0, 0}});
  std::vector<separator_candidate> cands = enumerate_separators(rs, 2, 4);
  CHECK_THROWS_AS((void)select_minimal_cover(cands, rs.forbidden.size()), error);
}

TEST_CASE("covers needing several constraints are found exactly") {
  // adm (1,1) pins l1+l2 <= b; forb (2,0) and (0,2) then cannot both be cut by
  // one constraint: 2*l1 >= b+1 and 2*l2 >= b+1 would force l1+l2 > b.
  reduced_sets rs = synthetic({{1, 1}}, {{2, 0}, {0, 2}});
  std::vector<separator_candidate> cands = enumerate_separators(rs, 2, 4);
  supervisor_plan plan = select_minimal_cover(cands, rs.forbidden.size());

  CHECK(plan.constraints.size() == 2);
  CHECK(plan.exact);
  CHECK(plan.optimality_gap == 0);
  std::set<std::size_t> covered;
  for (const auto& cv : plan.covered)
    covered.insert(cv.begin(), cv.end());
  CHECK(covered == std::set<std::size_t>{0, 1});
}

TEST_CASE("an empty forbidden set needs no constraints") {
  reduced_sets rs = synthetic({{1, 0}}, {});
  CHECK(enumerate_separators(rs, 2, 2).empty());
  supervisor_plan plan = select_minimal_cover({}, 0);
  CHECK(plan.constraints.empty());
  CHECK(plan.exact);
}

TEST_CASE("monitors exclude exactly the forbidden markings") {
  auto p = prepare();
  std::vector<separator_candidate> cands = enumerate_separators(p.rs, 3, 9);
  supervisor_plan plan = select_minimal_cover(cands, p.rs.forbidden.size());
  controlled_net ctl = build_supervisor(p.w.net, plan, p.w.m0);

  REQUIRE(ctl.monitors.size() == 1);
  CHECK(ctl.base_places == 12);
  CHECK(ctl.net.place_count() == 13);
  std::size_t pc = ctl.monitors[0].place;
  CHECK(ctl.net.place_at(pc).role == place_role::monitor);
  CHECK(ctl.m0[pc] == 1);

  incidence_matrix nm = make_incidence_matrix(ctl.net);
  CHECK(nm.entries[pc] == std::vector<int>{-1, 0, -1, 2, 0, 0, 0, 0, 0});

  verification_report ver =
      verify_supervisor(ctl, p.c.robust, p.c.unrobust, default_node_cap);
  CHECK(ver.forbidden_excluded);
  CHECK(ver.admissible_reachable);
  CHECK(ver.monitor_equality);
  CHECK(ver.ok());
  CHECK(ver.reachable_count == 12);
  CHECK(ver.reachable_forbidden.empty());
  CHECK(ver.unreached_admissible.empty());
}

TEST_CASE("verification flags an under- and an over-restrictive supervisor") {
  auto p = prepare();

  // No constraints at all: every non-robust marking stays reachable.
  supervisor_plan none;
  controlled_net open = build_supervisor(p.w.net, none, p.w.m0);
  verification_report v1 =
      verify_supervisor(open, p.c.robust, p.c.unrobust, default_node_cap);
  CHECK_FALSE(v1.forbidden_excluded);
  CHECK(v1.admissible_reachable);
  CHECK(v1.reachable_count == 23);
  CHECK(v1.reachable_forbidden.size() == 11);

  // An overly tight constraint cuts admissible markings too.
  supervisor_plan tight;
  gmec g;
  g.weights = {{p.w.net.place_index("p2"), 1},
               {p.w.net.place_index("p3"), 1},
               {p.w.net.place_index("p4"), 1}};
  g.bound = 0;
  tight.constraints.push_back(g);
  tight.covered.push_back({0, 1, 2});
  controlled_net strict = build_supervisor(p.w.net, tight, p.w.m0);
  verification_report v2 =
      verify_supervisor(strict, p.c.robust, p.c.unrobust, default_node_cap);
  CHECK(v2.forbidden_excluded);
  CHECK_FALSE(v2.admissible_reachable);
  CHECK(!v2.unreached_admissible.empty());
}
