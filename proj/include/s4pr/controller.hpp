#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "s4pr/gmec.hpp"
#include "s4pr/robustness.hpp"
#include "s4pr/structure.hpp"

namespace s4pr {

struct recovery_subnet {
  std::size_t resource = 0;
  std::size_t recovery_place = 0;   // q
  std::size_t fail_transition = 0;  // t_f, uncontrollable
  std::size_t repair_transition = 0; // t_r, uncontrollable
};

// Adds q, t_f, t_r and the four weight-1 arcs r->t_f->q->t_r->r. With q empty
// and t_f never fired, the augmented net behaves exactly like the original.
std::pair<petri_net, recovery_subnet> attach_recovery(const petri_net& net,
                                                      const s4pr_structure& s,
                                                      std::size_t r);

// Total-failure structure: every transition consuming from the idle place of a
// subnet dependent on the resource gets an inhibitor arc from q with the
// resource capacity as threshold.
petri_net build_model_n(const petri_net& base, const recovery_subnet& rec,
                        const s4pr_structure& s, int capacity);

struct synthesis_options {
  forbidden_policy policy = forbidden_policy::full_unrobust;
  int a_max = 0; // <= 0 picks max forbidden-representative entry + 1
  int b_max = 0; // <= 0 picks a_max * |P_E|
  std::size_t node_cap = default_node_cap;
};

struct model_artifacts {
  std::vector<marking> forbidden;
  std::vector<std::size_t> projection;
  reduced_sets reduced;
  int a_max = 0;
  int b_max = 0;
  std::size_t candidate_count = 0;
  supervisor_plan plan;
};

// Monitor synthesis for the model with j failed units: forbidden-set policy,
// projection, reduction, bounded separator enumeration, minimal cover.
model_artifacts build_model_j(const petri_net& plant, const s4pr_structure& s,
                              std::size_t r, int j, int capacity,
                              const classification& cls,
                              const synthesis_options& opts);

struct multi_model_controller {
  petri_net plant;
  s4pr_structure structure;
  std::size_t resource = 0;
  int capacity = 0; // n = m0(r)
  marking m0;       // plant marking
  classification cls;
  petri_net base;   // plant + recovery subnet
  recovery_subnet recovery;
  std::map<int, model_artifacts> models; // j in 1..n-1
  petri_net model_n;
  std::size_t node_cap = default_node_cap;
};

multi_model_controller build_controller(const petri_net& plant,
                                        const s4pr_structure& s, std::size_t r,
                                        const marking& m0,
                                        const synthesis_options& opts = {});

enum class event_kind { fire, fail, repair, auto_step };

struct scenario_event {
  event_kind kind = event_kind::fire;
  std::string transition; // FIRE
  int count = 1;          // AUTO
  bool has_seed = false;
  unsigned seed = 0;      // AUTO reseed
};

struct failure_scenario {
  std::vector<scenario_event> events;
  unsigned seed = 0;
};

struct trace_step {
  std::size_t index = 0;
  std::string event;
  std::string fired;          // transition id, empty if nothing fired
  bool accepted = false;
  std::string note;           // rejection reason
  int model = 0;              // m(q) after the step
  marking state;              // plant places + q, after the step
  std::vector<int> monitors;  // active monitor tokens, empty outside 1..n-1
};

struct simulation_trace {
  std::vector<trace_step> steps;
  marking final_state;
  int final_model = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::map<std::string, std::size_t> fired_counts;
};

// Deterministic event-driven run. The active control structure follows m(q):
// model 0 is the bare net, models 1..n-1 overlay their monitors (tokens
// re-instantiated as bound - l.m at switch time), model n overlays the
// inhibitor arcs. Infeasible events are recorded as rejected steps, never
// applied; t_f/t_r only ever fire through FAIL/REPAIR and are never gated by
// monitors or inhibitors.
simulation_trace simulate(const multi_model_controller& mmc, const marking& m0,
                          const failure_scenario& sc);

} // namespace s4pr
