#include <doctest.h>

#include <algorithm>

#include "s4pr/robustness.hpp"
#include "support/workcell.hpp"

using namespace s4pr;
using fixture::mk;

namespace {

struct prepared {
  fixture::workcell w;
  s4pr_structure s;
  reachability_graph g;
};

prepared prepare() {
  prepared p{fixture::build_workcell(), {}, {}};
  p.s = extract_structure(p.w.net, {p.w.resource});
  compute_semiflows(p.w.net, p.s);
  p.g = build_graph(p.w.net, p.w.m0);
  return p;
}

} // namespace

TEST_CASE("failure removes idle units, not busy ones") {
  auto p = prepare();

  auto [net1, m1] = failure_net(p.w.net, p.w.resource, p.w.m0, 1);
  CHECK(m1[p.w.resource] == 1);
  CHECK(net1.place_count() == p.w.net.place_count());

  auto [net2, m2] = failure_net(p.w.net, p.w.resource, p.w.m0, 2);
  CHECK(m2[p.w.resource] == 0);

  CHECK_THROWS_AS(failure_net(p.w.net, p.w.resource, p.w.m0, 3), error);
  try {
    failure_net(p.w.net, p.w.resource, p.w.m0, 3);
  } catch (const error& e) {
    CHECK(std::string(e.code()) == "CANNOT_FAIL");
  }
}

TEST_CASE("the failed resource freezes its whole neighbourhood") {
  auto p = prepare();
  std::vector<char> allowed = transitions_avoiding(p.w.net, p.w.resource);

  std::vector<std::string> frozen, free_ids;
  for (std::size_t t = 0; t < p.w.net.transition_count(); ++t)
    (allowed[t] ? free_ids : frozen).push_back(p.w.net.transition_at(t).id);
  CHECK(frozen == std::vector<std::string>{"t3", "t4", "t5", "t6"});
  CHECK(free_ids == std::vector<std::string>{"t1", "t2", "t7", "t8", "t9"});
}

TEST_CASE("robustness of individual markings") {
  auto p = prepare();

  CHECK(is_robust(p.w.net, p.s, p.w.resource, p.w.m0));
  // Both line-1 tokens stuck in p2: line 3's p11 units are tied up forever.
  CHECK_FALSE(is_robust(p.w.net, p.s, p.w.resource,
                        mk({0, 2, 0, 0, 1, 0, 0, 1, 0, 1, 0, 2})));
  // Lines idle except one job in p3: p11 recycles through t8/t9 fine.
  CHECK(is_robust(p.w.net, p.s, p.w.resource,
                  mk({1, 0, 1, 0, 1, 0, 0, 1, 0, 0, 2, 2})));
}

TEST_CASE("classification reproduces the frozen partition") {
  auto p = prepare();
  classification c = classify(p.w.net, p.s, p.g, p.w.resource);

  CHECK(c.robust.size() == 12);
  CHECK(c.unrobust.size() == 11);
  CHECK(c.robust == fixture::sorted(fixture::expected_robust()));
  CHECK(c.unrobust == fixture::sorted(fixture::expected_unrobust()));
}

TEST_CASE("forbidden-set policies") {
  auto p = prepare();
  classification c = classify(p.w.net, p.s, p.g, p.w.resource);

  std::vector<marking> full =
      forbidden_set(c, forbidden_policy::full_unrobust, p.w.resource, 1);
  CHECK(full == c.unrobust);

  std::vector<marking> thr =
      forbidden_set(c, forbidden_policy::threshold, p.w.resource, 1);
  CHECK(thr.size() == 7);
  for (const marking& m : thr) CHECK(m[p.w.resource] >= 1);

  std::vector<marking> thr2 =
      forbidden_set(c, forbidden_policy::threshold, p.w.resource, 2);
  for (const marking& m : thr2) CHECK(m[p.w.resource] >= 2);
  CHECK(thr2.size() == 2);
}

TEST_CASE("projection places separate the two classes with minimal support") {
  auto p = prepare();
  classification c = classify(p.w.net, p.s, p.g, p.w.resource);

  std::vector<std::size_t> pe = select_projection_places(p.w.net, p.s, c, p.w.resource);
  std::vector<std::string> ids;
  for (std::size_t i : pe) ids.push_back(p.w.net.place_at(i).id);
  CHECK(ids == std::vector<std::string>{"p2", "p3", "p4"});
}

TEST_CASE("reduction keeps only boundary representatives") {
  auto p = prepare();
  classification c = classify(p.w.net, p.s, p.g, p.w.resource);

  SUBCASE("three-place projection") {
    std::vector<std::size_t> pe = {p.w.net.place_index("p2"),
                                   p.w.net.place_index("p3"),
                                   p.w.net.place_index("p4")};
    reduced_sets rs = reduce(c.robust, c.unrobust, pe);
    CHECK(rs.admissible ==
          std::vector<std::vector<int>>{{0, 1, 0}, {1, 0, 0}});
    CHECK(rs.forbidden ==
          std::vector<std::vector<int>>{{0, 0, 1}, {1, 1, 0}, {2, 0, 0}});
  }

  SUBCASE("four-place projection") {
    std::vector<std::size_t> pe = {p.w.net.place_index("p2"),
                                   p.w.net.place_index("p3"),
                                   p.w.net.place_index("p4"),
                                   p.w.net.place_index("p6")};
    reduced_sets rs = reduce(c.robust, c.unrobust, pe);
    CHECK(rs.admissible ==
          std::vector<std::vector<int>>{{0, 1, 0, 1}, {1, 0, 0, 1}});
    CHECK(rs.forbidden ==
          std::vector<std::vector<int>>{{0, 0, 1, 0}, {1, 1, 0, 0}, {2, 0, 0, 0}});
  }

  SUBCASE("overlapping projections are rejected") {
    std::vector<std::size_t> pe = {p.w.net.place_index("p9")};
    CHECK_THROWS_AS((void)reduce(c.robust, c.unrobust, pe), error);
  }

  SUBCASE("every reduced vector dominates or is dominated by a full projection") {
    std::vector<std::size_t> pe = {p.w.net.place_index("p2"),
                                   p.w.net.place_index("p3"),
                                   p.w.net.place_index("p4")};
    reduced_sets rs = reduce(c.robust, c.unrobust, pe);
    // Maximality: no admissible projection strictly dominates a kept one.
    for (const marking& m : c.robust) {
      std::vector<int> v = {m[pe[0]], m[pe[1]], m[pe[2]]};
      bool covered = false;
      for (const auto& a : rs.admissible)
        covered = covered || (v[0] <= a[0] && v[1] <= a[1] && v[2] <= a[2]);
      CHECK(covered);
    }
    // Minimality: every forbidden projection dominates a kept representative.
    for (const marking& m : c.unrobust) {
      std::vector<int> v = {m[pe[0]], m[pe[1]], m[pe[2]]};
      bool covers = false;
      for (const auto& f : rs.forbidden)
        covers = covers || (v[0] >= f[0] && v[1] >= f[1] && v[2] >= f[2]);
      CHECK(covers);
    }
  }
}
