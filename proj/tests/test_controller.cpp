#include <doctest.h>

#include <algorithm>
#include <set>

#include "s4pr/controller.hpp"
#include "support/workcell.hpp"

using namespace s4pr;
using fixture::mk;

namespace {

struct prepared {
  fixture::workcell w;
  s4pr_structure s;
};

prepared prepare() {
  prepared p{fixture::build_workcell(), {}};
  p.s = extract_structure(p.w.net, {p.w.resource});
  compute_semiflows(p.w.net, p.s);
  return p;
}

failure_scenario events(std::vector<scenario_event> evs, unsigned seed = 0) {
  failure_scenario sc;
  sc.events = std::move(evs);
  sc.seed = seed;
  return sc;
}

scenario_event fire_ev(const std::string& t) {
  scenario_event e;
  e.kind = event_kind::fire;
  e.transition = t;
  return e;
}

scenario_event fail_ev() {
  scenario_event e;
  e.kind = event_kind::fail;
  return e;
}

scenario_event repair_ev() {
  scenario_event e;
  e.kind = event_kind::repair;
  return e;
}

scenario_event auto_ev(int count, int seed = -1) {
  scenario_event e;
  e.kind = event_kind::auto_step;
  e.count = count;
  if (seed >= 0) {
    e.has_seed = true;
    e.seed = static_cast<unsigned>(seed);
  }
  return e;
}

} // namespace

TEST_CASE("recovery subnet attaches q, tf, tr around the resource") {
  auto p = prepare();
  auto [base, rec] = attach_recovery(p.w.net, p.s, p.w.resource);

  CHECK(base.place_count() == 13);
  CHECK(base.transition_count() == 11);
  CHECK(base.place_at(rec.recovery_place).id == "q");
  CHECK(base.place_at(rec.recovery_place).role == place_role::recovery);
  CHECK(base.transition_at(rec.fail_transition).id == "tf");
  CHECK(base.transition_at(rec.repair_transition).id == "tr");
  CHECK_FALSE(base.transition_at(rec.fail_transition).controllable);
  CHECK_FALSE(base.transition_at(rec.repair_transition).controllable);

  // r -> tf -> q -> tr -> r, all weight 1.
  incidence_matrix n = make_incidence_matrix(base);
  CHECK(n.entries[rec.resource][rec.fail_transition] == -1);
  CHECK(n.entries[rec.recovery_place][rec.fail_transition] == 1);
  CHECK(n.entries[rec.recovery_place][rec.repair_transition] == -1);
  CHECK(n.entries[rec.resource][rec.repair_transition] == 1);

  CHECK_THROWS_AS(attach_recovery(p.w.net, p.s, p.w.net.place_index("p11")), error);
  s4pr_structure s2 = extract_structure(base, {rec.resource});
  CHECK_THROWS_AS(attach_recovery(base, s2, rec.resource), error);
}

TEST_CASE("with the recovery pair masked the plant behaviour is unchanged") {
  auto p = prepare();
  auto [base, rec] = attach_recovery(p.w.net, p.s, p.w.resource);

  marking m0 = p.w.m0;
  m0.tokens.push_back(0); // q empty
  std::vector<char> allowed(base.transition_count(), 1);
  allowed[rec.fail_transition] = 0;
  allowed[rec.repair_transition] = 0;

  reachability_graph g = build_graph(base, m0, default_node_cap, &allowed);
  CHECK(g.node_count() == 23);

  std::set<marking> projected;
  for (const marking& m : g.nodes)
    projected.insert(marking{
        std::vector<int>(m.tokens.begin(), m.tokens.begin() + 12)});
  std::set<marking> plain;
  for (const marking& m : build_graph(p.w.net, p.w.m0).nodes) plain.insert(m);
  CHECK(projected == plain);
}

TEST_CASE("the total-failure model inhibits entry to dependent lines") {
  auto p = prepare();
  auto [base, rec] = attach_recovery(p.w.net, p.s, p.w.resource);
  petri_net mn = build_model_n(base, rec, p.s, 2);

  std::vector<std::pair<std::string, int>> inhib;
  for (const arc& a : mn.arcs())
    if (a.kind == arc_kind::inhibitor) {
      CHECK(mn.place_at(a.place).id == "q");
      inhib.emplace_back(mn.transition_at(a.transition).id, a.weight);
    }
  std::sort(inhib.begin(), inhib.end());
  CHECK(inhib == std::vector<std::pair<std::string, int>>{{"t1", 2}, {"t5", 2}});

  // All units failed: only line 3 (and nothing else) keeps running.
  marking m = p.w.m0;
  m[p.w.resource] = 0;
  m.tokens.push_back(2); // q holds both units
  std::vector<char> allowed(mn.transition_count(), 1);
  allowed[rec.fail_transition] = 0;
  allowed[rec.repair_transition] = 0;

  reachability_graph g = build_graph(mn, m, default_node_cap, &allowed);
  CHECK(g.node_count() == 2);
  for (std::size_t v = 0; v < g.node_count(); ++v)
    CHECK(!g.succ[v].empty()); // never deadlocked

  liveness_report live = liveness(
      g, mn, {mn.transition_index("t8"), mn.transition_index("t9")});
  CHECK(live.all_live());
}

TEST_CASE("monitor synthesis per failed-unit count") {
  auto p = prepare();
  reachability_graph g = build_graph(p.w.net, p.w.m0);
  classification cls = classify(p.w.net, p.s, g, p.w.resource);
  synthesis_options opts;

  SUBCASE("one failed unit") {
    model_artifacts art =
        build_model_j(p.w.net, p.s, p.w.resource, 1, 2, cls, opts);
    CHECK(art.forbidden.size() == 11);
    REQUIRE(art.projection.size() == 3);
    CHECK(p.w.net.place_at(art.projection[0]).id == "p2");
    CHECK(p.w.net.place_at(art.projection[1]).id == "p3");
    CHECK(p.w.net.place_at(art.projection[2]).id == "p4");
    CHECK(art.a_max == 3);
    CHECK(art.b_max == 9);
    CHECK(art.candidate_count > 0);
    REQUIRE(art.plan.constraints.size() == 1);
    CHECK(art.plan.constraints[0].bound == 1);
  }

  SUBCASE("threshold policy narrows the forbidden set") {
    synthesis_options thr = opts;
    thr.policy = forbidden_policy::threshold;
    model_artifacts art =
        build_model_j(p.w.net, p.s, p.w.resource, 1, 2, cls, thr);
    CHECK(art.forbidden.size() == 7);
    REQUIRE(!art.plan.constraints.empty());

    controlled_net ctl = build_supervisor(p.w.net, art.plan, p.w.m0);
    verification_report ver =
        verify_supervisor(ctl, cls.robust, art.forbidden, default_node_cap);
    CHECK(ver.forbidden_excluded);
    CHECK(ver.monitor_equality);
  }

  SUBCASE("model index bounds") {
    CHECK_THROWS_AS(
        (void)build_model_j(p.w.net, p.s, p.w.resource, 0, 2, cls, opts), error);
    try {
      (void)build_model_j(p.w.net, p.s, p.w.resource, 2, 2, cls, opts);
      FAIL("expected USE_MODEL_N");
    } catch (const error& e) {
      CHECK(std::string(e.code()) == "USE_MODEL_N");
    }
  }
}

TEST_CASE("the assembled controller holds one model per failure depth") {
  auto p = prepare();
  multi_model_controller mmc =
      build_controller(p.w.net, p.s, p.w.resource, p.w.m0);

  CHECK(mmc.capacity == 2);
  CHECK(mmc.cls.robust.size() == 12);
  CHECK(mmc.cls.unrobust.size() == 11);
  REQUIRE(mmc.models.size() == 1);
  CHECK(mmc.models.count(1) == 1);
  CHECK(mmc.base.place_count() == 13);

  std::size_t inhibitors = 0;
  for (const arc& a : mmc.model_n.arcs())
    if (a.kind == arc_kind::inhibitor) ++inhibitors;
  CHECK(inhibitors == 2);
}

TEST_CASE("failure and repair walk the model ladder") {
  auto p = prepare();
  multi_model_controller mmc =
      build_controller(p.w.net, p.s, p.w.resource, p.w.m0);

  simulation_trace tr =
      simulate(mmc, p.w.m0, events({fail_ev(), repair_ev()}));
  REQUIRE(tr.steps.size() == 2);

  const trace_step& fail = tr.steps[0];
  CHECK(fail.accepted);
  CHECK(fail.fired == "tf");
  CHECK(fail.model == 1);
  CHECK(fail.state[p.w.resource] == 1);
  CHECK(fail.state[12] == 1); // q
  REQUIRE(fail.monitors.size() == 1);
  CHECK(fail.monitors[0] == 1); // bound 1 - l.m0 = 1

  const trace_step& rep = tr.steps[1];
  CHECK(rep.accepted);
  CHECK(rep.fired == "tr");
  CHECK(rep.model == 0);
  CHECK(rep.state[p.w.resource] == 2);
  CHECK(rep.state[12] == 0);
  CHECK(rep.monitors.empty());

  CHECK(tr.accepted == 2);
  CHECK(tr.rejected == 0);
  CHECK(tr.final_model == 0);
  CHECK(tr.fired_counts.at("tf") == 1);
  CHECK(tr.fired_counts.at("tr") == 1);
}

TEST_CASE("the active monitor throttles the dependent line") {
  auto p = prepare();
  multi_model_controller mmc =
      build_controller(p.w.net, p.s, p.w.resource, p.w.m0);

  simulation_trace tr = simulate(
      mmc, p.w.m0, events({fail_ev(), fire_ev("t1"), fire_ev("t1")}));
  REQUIRE(tr.steps.size() == 3);
  CHECK(tr.steps[1].accepted);
  CHECK(tr.steps[1].fired == "t1");
  CHECK(tr.steps[1].monitors == std::vector<int>{0});
  CHECK_FALSE(tr.steps[2].accepted);
  CHECK(tr.steps[2].note.find("monitor") != std::string::npos);
  CHECK(tr.steps[2].fired.empty());
}

TEST_CASE("infeasible events are rejected with reasons, not applied") {
  auto p = prepare();
  multi_model_controller mmc =
      build_controller(p.w.net, p.s, p.w.resource, p.w.m0);

  SUBCASE("uncontrollable transition by FIRE") {
    simulation_trace tr = simulate(mmc, p.w.m0, events({fire_ev("tf")}));
    CHECK(tr.rejected == 1);
    CHECK(tr.steps[0].note.find("uncontrollable") != std::string::npos);
    CHECK(tr.steps[0].state == [&] {
      marking m = p.w.m0;
      m.tokens.push_back(0);
      return m;
    }());
  }

  SUBCASE("disabled transition") {
    simulation_trace tr = simulate(mmc, p.w.m0, events({fire_ev("t2")}));
    CHECK(tr.rejected == 1);
    CHECK(tr.steps[0].note.find("disabled") != std::string::npos);
  }

  SUBCASE("repair without failure") {
    simulation_trace tr = simulate(mmc, p.w.m0, events({repair_ev()}));
    CHECK(tr.rejected == 1);
    CHECK(tr.steps[0].note.find("recovery place is empty") != std::string::npos);
  }

  SUBCASE("failure at a non-robust marking") {
    simulation_trace tr = simulate(
        mmc, p.w.m0, events({fire_ev("t1"), fire_ev("t1"), fail_ev()}));
    REQUIRE(tr.steps.size() == 3);
    CHECK(tr.steps[0].accepted);
    CHECK(tr.steps[1].accepted);
    CHECK_FALSE(tr.steps[2].accepted);
    CHECK(tr.steps[2].note.find("not robust") != std::string::npos);
    CHECK(tr.final_model == 0);
  }

  SUBCASE("failure beyond capacity") {
    simulation_trace tr = simulate(
        mmc, p.w.m0, events({fail_ev(), fail_ev(), fail_ev()}));
    REQUIRE(tr.steps.size() == 3);
    CHECK(tr.steps[0].accepted);
    CHECK(tr.steps[1].accepted);
    CHECK(tr.steps[1].model == 2);
    CHECK_FALSE(tr.steps[2].accepted);
    CHECK(tr.steps[2].note.find("no idle unit") != std::string::npos);
  }
}

TEST_CASE("total failure blocks entry to dependent lines but not line 3") {
  auto p = prepare();
  multi_model_controller mmc =
      build_controller(p.w.net, p.s, p.w.resource, p.w.m0);

  simulation_trace tr = simulate(
      mmc, p.w.m0,
      events({fail_ev(), fail_ev(), fire_ev("t1"), fire_ev("t5"),
              fire_ev("t8")}));
  REQUIRE(tr.steps.size() == 5);
  CHECK(tr.steps[1].model == 2);
  CHECK_FALSE(tr.steps[2].accepted);
  CHECK(tr.steps[2].note.find("total-failure") != std::string::npos);
  CHECK_FALSE(tr.steps[3].accepted);
  CHECK(tr.steps[4].accepted);
  CHECK(tr.steps[4].fired == "t8");
}

TEST_CASE("automatic stepping is deterministic under a seed") {
  auto p = prepare();
  multi_model_controller mmc =
      build_controller(p.w.net, p.s, p.w.resource, p.w.m0);

  failure_scenario sc = events(
      {auto_ev(10, 3), fail_ev(), auto_ev(10, 5), repair_ev(), auto_ev(10, 7)},
      42);
  simulation_trace a = simulate(mmc, p.w.m0, sc);
  simulation_trace b = simulate(mmc, p.w.m0, sc);

  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    CHECK(a.steps[i].fired == b.steps[i].fired);
    CHECK(a.steps[i].accepted == b.steps[i].accepted);
    CHECK(a.steps[i].state == b.steps[i].state);
  }
  CHECK(a.final_state == b.final_state);
}

TEST_CASE("token invariants hold along any simulated run") {
  auto p = prepare();
  multi_model_controller mmc =
      build_controller(p.w.net, p.s, p.w.resource, p.w.m0);

  simulation_trace tr = simulate(
      mmc, p.w.m0,
      events({auto_ev(25, 1), fail_ev(), auto_ev(25, 2), fail_ev(),
              auto_ev(25, 3), repair_ev(), auto_ev(25, 4), repair_ev(),
              auto_ev(25, 5)}));

  const semiflow& f10 = p.s.semiflows.at(p.w.net.place_index("p10"));
  const semiflow& f11 = p.s.semiflows.at(p.w.net.place_index("p11"));
  const semiflow& f12 = p.s.semiflows.at(p.w.net.place_index("p12"));

  for (const trace_step& st : tr.steps) {
    REQUIRE(st.state.size() == 13);
    for (int v : st.state.tokens) CHECK(v >= 0);
    CHECK(f10.value(st.state) == 1);
    CHECK(f11.value(st.state) == 2);
    // q holds the failed units of p12, so the invariant extends over q.
    CHECK(f12.value(st.state) + st.state[12] == 2);
    CHECK(st.model == st.state[12]);
  }
}

TEST_CASE("structurally impossible scenarios raise errors") {
  auto p = prepare();
  multi_model_controller mmc =
      build_controller(p.w.net, p.s, p.w.resource, p.w.m0);

  CHECK_THROWS_AS((void)simulate(mmc, p.w.m0, events({fire_ev("nope")})), error);

  scenario_event bad;
  bad.kind = event_kind::auto_step;
  bad.count = -1;
  CHECK_THROWS_AS((void)simulate(mmc, p.w.m0, events({bad})), error);

  CHECK_THROWS_AS((void)simulate(mmc, mk({1, 2, 3}), events({})), error);
}
