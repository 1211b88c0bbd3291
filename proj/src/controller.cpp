#include "s4pr/controller.hpp"

#include <algorithm>

namespace s4pr {

std::pair<petri_net, recovery_subnet> attach_recovery(const petri_net& net,
                                                      const s4pr_structure& s,
                                                      std::size_t r) {
  if (!std::binary_search(s.unreliable.begin(), s.unreliable.end(), r))
    throw error("NOT_UNRELIABLE", "recovery attaches to an unreliable resource");
  for (const place& p : net.places())
    if (p.role == place_role::recovery)
      throw error("RECOVERY_PRESENT",
                  "a recovery place ('" + p.id + "') already exists");

  auto unique_id = [&](std::string id) {
    while (net.find_place(id) || net.find_transition(id)) id += "_";
    return id;
  };
  std::string q = unique_id("q"), tf = unique_id("tf"), tr = unique_id("tr");

  petri_net out = net;
  recovery_subnet rec;
  rec.resource = r;
  rec.recovery_place = out.add_place(q, place_role::recovery, 0);
  rec.fail_transition = out.add_transition(tf, 0, false);
  rec.repair_transition = out.add_transition(tr, 0, false);
  out.add_arc(net.place_at(r).id, tf);
  out.add_arc(tf, q);
  out.add_arc(q, tr);
  out.add_arc(tr, net.place_at(r).id);
  return {std::move(out), rec};
}

namespace {

// transitions consuming from the idle place of a subnet dependent on r
std::vector<std::size_t> failure_inhibited_transitions(const petri_net& net,
                                                       const s4pr_structure& s,
                                                       std::size_t r) {
  std::vector<int> indep = independent_subnets(s, r);
  std::vector<std::size_t> out;
  for (int i : s.subnets) {
    if (std::binary_search(indep.begin(), indep.end(), i)) continue;
    if (!s.idle_of.count(i)) continue;
    std::size_t idle = s.idle_of.at(i);
    for (std::size_t t = 0; t < net.transition_count(); ++t)
      for (auto [p, w] : net.pre(t))
        if (p == idle) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

} // namespace

petri_net build_model_n(const petri_net& base, const recovery_subnet& rec,
                        const s4pr_structure& s, int capacity) {
  petri_net out = base;
  const std::string& q = base.place_at(rec.recovery_place).id;
  for (std::size_t t : failure_inhibited_transitions(base, s, rec.resource))
    out.add_arc(q, base.transition_at(t).id, capacity, arc_kind::inhibitor);
  return out;
}

model_artifacts build_model_j(const petri_net& plant, const s4pr_structure& s,
                              std::size_t r, int j, int capacity,
                              const classification& cls,
                              const synthesis_options& opts) {
  if (j < 1)
    throw error("BAD_MODEL_INDEX",
                "model 0 is the uncontrolled net; monitors exist for 1..n-1");
  if (j >= capacity)
    throw error("USE_MODEL_N",
                "with all " + std::to_string(capacity) +
                    " units failed the inhibitor-arc model applies, not monitors");

  model_artifacts out;
  out.forbidden = forbidden_set(cls, opts.policy, r, j);
  if (out.forbidden.empty()) return out;

  out.projection = select_projection_places(plant, s, cls, r);
  out.reduced = reduce(cls.robust, out.forbidden, out.projection);

  int a_max = opts.a_max;
  if (a_max <= 0) {
    a_max = 1;
    for (const auto& f : out.reduced.forbidden)
      for (int v : f) a_max = std::max(a_max, v + 1);
  }
  int b_max = opts.b_max > 0
                  ? opts.b_max
                  : a_max * static_cast<int>(out.projection.size());
  out.a_max = a_max;
  out.b_max = b_max;

  std::vector<separator_candidate> cands =
      enumerate_separators(out.reduced, a_max, b_max);
  out.candidate_count = cands.size();
  out.plan = select_minimal_cover(cands, out.reduced.forbidden.size());
  return out;
}

multi_model_controller build_controller(const petri_net& plant,
                                        const s4pr_structure& s, std::size_t r,
                                        const marking& m0,
                                        const synthesis_options& opts) {
  multi_model_controller mmc;
  mmc.plant = plant;
  mmc.structure = s;
  mmc.resource = r;
  mmc.capacity = m0[r];
  mmc.m0 = m0;
  mmc.node_cap = opts.node_cap;

  reachability_graph g = build_graph(plant, m0, opts.node_cap);
  mmc.cls = classify(plant, s, g, r, opts.node_cap);

  auto [base, rec] = attach_recovery(plant, s, r);
  mmc.base = std::move(base);
  mmc.recovery = rec;
  for (int j = 1; j < mmc.capacity; ++j)
    mmc.models[j] = build_model_j(plant, s, r, j, mmc.capacity, mmc.cls, opts);
  mmc.model_n = build_model_n(mmc.base, rec, s, mmc.capacity);
  return mmc;
}

namespace {

struct active_monitors {
  std::vector<std::vector<int>> rows; // per constraint, over base transitions
  std::vector<int> tokens;
};

class simulator {
public:
  simulator(const multi_model_controller& mmc, const marking& m0)
      : mmc_(mmc), inhibited_(failure_inhibited_transitions(
                       mmc.base, mmc.structure, mmc.resource)) {
    if (m0.size() != mmc.plant.place_count())
      throw error("DIMENSION_MISMATCH",
                  "scenario start marking does not match the net");
    m_ = m0;
    m_.tokens.push_back(0); // q
    incidence_matrix n = make_incidence_matrix(mmc.base);
    for (const auto& [j, art] : mmc.models) {
      active_monitors am;
      for (const gmec& g : art.plan.constraints) {
        std::vector<int> row(mmc.base.transition_count(), 0);
        for (std::size_t t = 0; t < row.size(); ++t) {
          long long sum = 0;
          for (auto [p, w] : g.weights) sum += (long long)w * n.entries[p][t];
          row[t] = static_cast<int>(-sum);
        }
        am.rows.push_back(std::move(row));
      }
      monitors_[j] = std::move(am);
    }
  }

  simulation_trace run(const failure_scenario& sc) {
    engine_.seed(sc.seed);
    for (const scenario_event& ev : sc.events) {
      switch (ev.kind) {
        case event_kind::fire: {
          auto t = mmc_.base.find_transition(ev.transition);
          if (!t)
            throw error("SCENARIO_ERROR",
                        "scenario fires unknown transition '" + ev.transition + "'");
          step_fire(*t);
          break;
        }
        case event_kind::fail:
          step_fail();
          break;
        case event_kind::repair:
          step_repair();
          break;
        case event_kind::auto_step: {
          if (ev.count < 0)
            throw error("SCENARIO_ERROR", "AUTO event with negative count");
          if (ev.has_seed) engine_.seed(ev.seed);
          for (int k = 0; k < ev.count; ++k)
            if (!step_auto()) break;
          break;
        }
      }
    }
    trace_.final_state = m_;
    trace_.final_model = model_;
    return trace_;
  }

private:
  int capacity() const { return mmc_.capacity; }

  bool monitor_blocked(std::size_t t) const {
    auto it = monitors_.find(model_);
    if (it == monitors_.end()) return false;
    const active_monitors& am = it->second;
    for (std::size_t c = 0; c < am.rows.size(); ++c)
      if (am.rows[c][t] < 0 && am.tokens[c] < -am.rows[c][t]) return true;
    return false;
  }

  bool inhibitor_blocked(std::size_t t) const {
    return model_ == capacity() &&
           std::binary_search(inhibited_.begin(), inhibited_.end(), t);
  }

  bool active_enabled(std::size_t t) const {
    if (!is_enabled(mmc_.base, m_, t)) return false;
    std::size_t tf = mmc_.recovery.fail_transition;
    std::size_t tr = mmc_.recovery.repair_transition;
    if (t == tf || t == tr) return true; // never gated by the controller
    return !monitor_blocked(t) && !inhibitor_blocked(t);
  }

  void apply(std::size_t t) {
    m_ = fire(mmc_.base, m_, t);
    auto it = monitors_.find(model_);
    if (it != monitors_.end())
      for (std::size_t c = 0; c < it->second.rows.size(); ++c)
        it->second.tokens[c] += it->second.rows[c][t];
  }

  // tokens = bound - l.m for each constraint of the entered model
  void enter_model(int j) {
    model_ = j;
    auto it = monitors_.find(j);
    if (it == monitors_.end()) return;
    it->second.tokens.clear();
    const model_artifacts& art = mmc_.models.at(j);
    for (const gmec& g : art.plan.constraints)
      it->second.tokens.push_back(static_cast<int>(g.bound - g.value(m_)));
  }

  bool admissible_for(int j) const {
    auto it = mmc_.models.find(j);
    if (it == mmc_.models.end()) return true;
    for (const gmec& g : it->second.plan.constraints)
      if (!g.satisfied(m_)) return false;
    return true;
  }

  marking plant_view() const {
    return marking{std::vector<int>(m_.tokens.begin(),
                                    m_.tokens.begin() + mmc_.plant.place_count())};
  }

  void record(const std::string& event, const std::string& fired, bool accepted,
              const std::string& note) {
    trace_step st;
    st.index = trace_.steps.size();
    st.event = event;
    st.fired = fired;
    st.accepted = accepted;
    st.note = note;
    st.model = model_;
    st.state = m_;
    auto it = monitors_.find(model_);
    if (it != monitors_.end()) st.monitors = it->second.tokens;
    trace_.steps.push_back(std::move(st));
    if (accepted) {
      ++trace_.accepted;
      if (!fired.empty()) ++trace_.fired_counts[fired];
    } else {
      ++trace_.rejected;
    }
  }

  void step_fire(std::size_t t) {
    const std::string& id = mmc_.base.transition_at(t).id;
    if (!mmc_.base.transition_at(t).controllable) {
      record("FIRE", "", false,
             "'" + id + "' is uncontrollable; drive it with FAIL/REPAIR");
      return;
    }
    if (!is_enabled(mmc_.base, m_, t)) {
      record("FIRE", "", false, "'" + id + "' is disabled");
      return;
    }
    if (monitor_blocked(t)) {
      record("FIRE", "", false, "'" + id + "' is blocked by an active monitor");
      return;
    }
    if (inhibitor_blocked(t)) {
      record("FIRE", "", false,
             "'" + id + "' is blocked by the total-failure inhibitor");
      return;
    }
    apply(t);
    record("FIRE", id, true, "");
  }

  void step_fail() {
    if (m_[mmc_.resource] < 1) {
      record("FAIL", "", false, "resource has no idle unit to fail");
      return;
    }
    if (model_ + 1 > capacity()) {
      record("FAIL", "", false, "recovery place already holds every unit");
      return;
    }
    if (!is_robust(mmc_.plant, mmc_.structure, mmc_.resource, plant_view(),
                   mmc_.node_cap)) {
      record("FAIL", "", false, "marking is not robust; failure unsupported");
      return;
    }
    int target = model_ + 1;
    if (target < capacity() && !admissible_for(target)) {
      record("FAIL", "", false,
             "marking is inadmissible for the target control model");
      return;
    }
    m_ = fire(mmc_.base, m_, mmc_.recovery.fail_transition);
    enter_model(target);
    record("FAIL", mmc_.base.transition_at(mmc_.recovery.fail_transition).id, true,
           "");
  }

  void step_repair() {
    if (model_ < 1 || m_[mmc_.recovery.recovery_place] < 1) {
      record("REPAIR", "", false, "recovery place is empty");
      return;
    }
    int target = model_ - 1;
    if (target >= 1 && !admissible_for(target)) {
      record("REPAIR", "", false,
             "marking is inadmissible for the target control model");
      return;
    }
    m_ = fire(mmc_.base, m_, mmc_.recovery.repair_transition);
    enter_model(target);
    record("REPAIR", mmc_.base.transition_at(mmc_.recovery.repair_transition).id,
           true, "");
  }

  bool step_auto() {
    std::vector<std::size_t> choices;
    for (std::size_t t = 0; t < mmc_.base.transition_count(); ++t)
      if (mmc_.base.transition_at(t).controllable && active_enabled(t))
        choices.push_back(t);
    if (choices.empty()) {
      record("AUTO", "", false, "no controllable transition is enabled");
      return false;
    }
    std::size_t t = choices[engine_() % choices.size()];
    apply(t);
    record("AUTO", mmc_.base.transition_at(t).id, true, "");
    return true;
  }

  const multi_model_controller& mmc_;
  std::vector<std::size_t> inhibited_;
  std::map<int, active_monitors> monitors_;
  marking m_;
  int model_ = 0;
  simulation_trace trace_;
  std::mt19937 engine_;
};

} // namespace

simulation_trace simulate(const multi_model_controller& mmc, const marking& m0,
                          const failure_scenario& sc) {
  simulator sim(mmc, m0);
  return sim.run(sc);
}

} // namespace s4pr
