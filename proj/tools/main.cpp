#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "s4pr/controller.hpp"
#include "s4pr/gmec.hpp"
#include "s4pr/io.hpp"
#include "s4pr/net.hpp"
#include "s4pr/reachability.hpp"
#include "s4pr/robustness.hpp"
#include "s4pr/structure.hpp"
#include "s4pr/version.hpp"

using json = nlohmann::ordered_json;
using namespace s4pr;

namespace {

std::size_t resolve_cap(bool cap_set, std::size_t cap_flag) {
  if (cap_set) return cap_flag;
  if (const char* env = std::getenv("S4PR_NODE_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || v == 0)
      throw error("BAD_CAP", "S4PR_NODE_CAP must be a positive integer");
    return static_cast<std::size_t>(v);
  }
  return default_node_cap;
}

marking apply_overrides(const petri_net& net, const marking& m0,
                        const std::vector<std::string>& overrides) {
  marking m = m0;
  for (const std::string& o : overrides) {
    auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == o.size())
      throw error("BAD_OVERRIDE", "override '" + o + "' is not of the form place=tokens");
    std::string id = o.substr(0, eq);
    std::string val = o.substr(eq + 1);
    char* end = nullptr;
    long v = std::strtol(val.c_str(), &end, 10);
    if (end == val.c_str() || *end != '\0' || v < 0)
      throw error("BAD_OVERRIDE", "override '" + o + "' needs a non-negative token count");
    m[net.place_index(id)] = static_cast<int>(v);
  }
  return m;
}

std::size_t resolve_resource(const net_document& doc, const std::string& flag) {
  if (!flag.empty()) {
    std::size_t r = doc.net.place_index(flag);
    for (std::size_t u : doc.unreliable)
      if (u == r) return r;
    throw error("NOT_UNRELIABLE", "place '" + flag + "' is not declared unreliable");
  }
  if (doc.unreliable.empty())
    throw error("NO_UNRELIABLE", "the net declares no unreliable resource");
  if (doc.unreliable.size() > 1)
    throw error("AMBIGUOUS_RESOURCE",
                "several unreliable resources declared; pick one with --resource");
  return doc.unreliable[0];
}

json marking_json(const marking& m) {
  json a = json::array();
  for (int v : m.tokens) a.push_back(v);
  return a;
}

json marking_list_json(std::vector<marking> ms) {
  std::sort(ms.begin(), ms.end());
  json a = json::array();
  for (const marking& m : ms) a.push_back(marking_json(m));
  return a;
}

json places_json(const petri_net& net) {
  json a = json::array();
  for (const place& p : net.places()) a.push_back(p.id);
  return a;
}

json report_head(const std::string& command, const json& input_digest) {
  json r;
  r["command"] = command;
  r["tool_version"] = tool_version;
  r["input_digest"] = input_digest;
  return r;
}

json gmec_json(const petri_net& net, const gmec& g) {
  json w;
  for (auto [p, wt] : g.weights) w[net.place_at(p).id] = wt;
  json out;
  out["weights"] = std::move(w);
  out["bound"] = g.bound;
  return out;
}

s4pr_structure prepared_structure(const net_document& doc) {
  s4pr_structure s = extract_structure(doc.net, doc.unreliable);
  compute_semiflows(doc.net, s);
  return s;
}

int cmd_validate(const std::string& path) {
  std::string text = read_file(path);
  net_document doc = parse_net_document(text);
  s4pr_structure s = extract_structure(doc.net, doc.unreliable);
  std::vector<diagnostic> diags = validate_s4pr(doc.net, s);
  try {
    compute_semiflows(doc.net, s);
    for (const diagnostic& d : check_initial_marking(doc.net, s, doc.m0))
      diags.push_back(d);
  } catch (const error& e) {
    diags.push_back({e.code(), e.what()});
  }
  for (const diagnostic& d : diags) std::cout << d.code << ": " << d.message << "\n";
  return diags.empty() ? 0 : 1;
}

int cmd_reach(const std::string& path, const std::vector<std::string>& overrides,
              bool cap_set, std::size_t cap_flag, const std::string& dot_out) {
  std::string text = read_file(path);
  net_document doc = parse_net_document(text);
  std::size_t cap = resolve_cap(cap_set, cap_flag);
  marking m0 = apply_overrides(doc.net, doc.m0, overrides);

  reachability_graph g = build_graph(doc.net, m0, cap);
  std::vector<marking> dead = deadlocks(g, doc.net);
  std::vector<int> mx = bounds(g);
  std::vector<std::size_t> all_t(doc.net.transition_count());
  for (std::size_t t = 0; t < all_t.size(); ++t) all_t[t] = t;
  liveness_report live = liveness(g, doc.net, all_t);

  json r = report_head("reach", digest(text));
  json res;
  res["places"] = places_json(doc.net);
  res["initial_marking"] = marking_json(m0);
  res["node_count"] = g.node_count();
  res["edge_count"] = g.edge_count();
  json b;
  for (std::size_t p = 0; p < mx.size(); ++p)
    b[doc.net.place_at(p).id] = mx[p];
  res["bounds"] = std::move(b);
  res["deadlock_count"] = dead.size();
  res["deadlocks"] = marking_list_json(dead);
  json lv;
  for (const auto& e : live.entries)
    lv[doc.net.transition_at(e.transition).id] = e.live;
  res["liveness"] = std::move(lv);
  res["all_live"] = live.all_live();
  r["results"] = std::move(res);

  if (!dot_out.empty()) write_file(dot_out, to_dot(doc.net, g));
  std::cout << r.dump(2) << "\n";
  return 0;
}

int cmd_export_dot(const std::string& path, const std::vector<std::string>& overrides,
                   bool cap_set, std::size_t cap_flag, const std::string& out) {
  net_document doc = load_net_document(path);
  std::size_t cap = resolve_cap(cap_set, cap_flag);
  marking m0 = apply_overrides(doc.net, doc.m0, overrides);
  std::string dot = to_dot(doc.net, build_graph(doc.net, m0, cap));
  if (out.empty())
    std::cout << dot;
  else
    write_file(out, dot);
  return 0;
}

int cmd_classify(const std::string& path, const std::string& resource,
                 bool cap_set, std::size_t cap_flag) {
  std::string text = read_file(path);
  net_document doc = parse_net_document(text);
  std::size_t r = resolve_resource(doc, resource);
  std::size_t cap = resolve_cap(cap_set, cap_flag);
  s4pr_structure s = prepared_structure(doc);

  reachability_graph g = build_graph(doc.net, doc.m0, cap);
  classification c = classify(doc.net, s, g, r, cap);

  json rep = report_head("classify", digest(text));
  json res;
  res["places"] = places_json(doc.net);
  res["resource"] = doc.net.place_at(r).id;
  json indep = json::array();
  for (int i : independent_subnets(s, r)) indep.push_back(i);
  res["independent_subnets"] = std::move(indep);
  res["robust_count"] = c.robust.size();
  res["unrobust_count"] = c.unrobust.size();
  res["robust"] = marking_list_json(c.robust);
  res["unrobust"] = marking_list_json(c.unrobust);
  rep["results"] = std::move(res);
  std::cout << rep.dump(2) << "\n";
  return 0;
}

int cmd_synthesize(const std::string& path, const std::string& resource, int j,
                   const std::string& policy, int a_max, int b_max, bool cap_set,
                   std::size_t cap_flag) {
  std::string text = read_file(path);
  net_document doc = parse_net_document(text);
  std::size_t r = resolve_resource(doc, resource);
  std::size_t cap = resolve_cap(cap_set, cap_flag);
  s4pr_structure s = prepared_structure(doc);

  synthesis_options opts;
  opts.policy = policy == "threshold" ? forbidden_policy::threshold
                                      : forbidden_policy::full_unrobust;
  opts.a_max = a_max;
  opts.b_max = b_max;
  opts.node_cap = cap;

  int capacity = doc.m0[r];
  reachability_graph g = build_graph(doc.net, doc.m0, cap);
  classification cls = classify(doc.net, s, g, r, cap);
  model_artifacts art = build_model_j(doc.net, s, r, j, capacity, cls, opts);
  controlled_net controlled = build_supervisor(doc.net, art.plan, doc.m0);
  verification_report ver =
      verify_supervisor(controlled, cls.robust, art.forbidden, cap);

  json rep = report_head("synthesize", digest(text));
  json res;
  res["places"] = places_json(doc.net);
  res["resource"] = doc.net.place_at(r).id;
  res["capacity"] = capacity;
  res["j"] = j;
  res["policy"] = policy;
  res["robust_count"] = cls.robust.size();
  res["unrobust_count"] = cls.unrobust.size();
  res["forbidden_count"] = art.forbidden.size();
  json pe = json::array();
  for (std::size_t p : art.projection) pe.push_back(doc.net.place_at(p).id);
  res["projection_places"] = std::move(pe);
  json ar = json::array();
  for (const auto& v : art.reduced.admissible) ar.push_back(v);
  res["admissible_reduced"] = std::move(ar);
  json fr = json::array();
  for (const auto& v : art.reduced.forbidden) fr.push_back(v);
  res["forbidden_reduced"] = std::move(fr);
  res["a_max"] = art.a_max;
  res["b_max"] = art.b_max;
  res["candidate_count"] = art.candidate_count;

  json plan;
  plan["constraints"] = json::array();
  for (const gmec& c : art.plan.constraints)
    plan["constraints"].push_back(gmec_json(doc.net, c));
  plan["exact"] = art.plan.exact;
  plan["optimality_gap"] = art.plan.optimality_gap;
  res["plan"] = std::move(plan);

  incidence_matrix n = make_incidence_matrix(controlled.net);
  json mons = json::array();
  for (const monitor_binding& b : controlled.monitors) {
    json m;
    m["place"] = controlled.net.place_at(b.place).id;
    json row;
    for (std::size_t t = 0; t < controlled.net.transition_count(); ++t)
      row[controlled.net.transition_at(t).id] = n.entries[b.place][t];
    m["row"] = std::move(row);
    m["initial_tokens"] = controlled.m0[b.place];
    mons.push_back(std::move(m));
  }
  res["monitors"] = std::move(mons);

  {
    auto [base, rec] = attach_recovery(doc.net, s, r);
    petri_net mn = build_model_n(base, rec, s, capacity);
    json arcs = json::array();
    for (const arc& a : mn.arcs())
      if (a.kind == arc_kind::inhibitor) {
        json e;
        e["from"] = mn.place_at(a.place).id;
        e["to"] = mn.transition_at(a.transition).id;
        e["threshold"] = a.weight;
        arcs.push_back(std::move(e));
      }
    json m;
    m["inhibitor_arcs"] = std::move(arcs);
    res["model_n"] = std::move(m);
  }

  json v;
  v["forbidden_excluded"] = ver.forbidden_excluded;
  v["admissible_reachable"] = ver.admissible_reachable;
  v["monitor_equality"] = ver.monitor_equality;
  v["reachable_count"] = ver.reachable_count;
  v["ok"] = ver.ok();
  res["verification"] = std::move(v);

  rep["results"] = std::move(res);
  std::cout << rep.dump(2) << "\n";
  return 0;
}

int cmd_simulate(const std::string& path, const std::string& scenario_path,
                 const std::string& resource, const std::string& trace_out,
                 bool cap_set, std::size_t cap_flag) {
  std::string net_text = read_file(path);
  std::string sc_text = read_file(scenario_path);
  net_document doc = parse_net_document(net_text);
  failure_scenario sc = parse_scenario(sc_text);
  std::size_t r = resolve_resource(doc, resource);
  std::size_t cap = resolve_cap(cap_set, cap_flag);
  s4pr_structure s = prepared_structure(doc);

  synthesis_options opts;
  opts.node_cap = cap;
  multi_model_controller mmc = build_controller(doc.net, s, r, doc.m0, opts);
  simulation_trace tr = simulate(mmc, doc.m0, sc);

  std::vector<std::string> independent_ids;
  for (int i : independent_subnets(s, r))
    if (s.transitions_of.count(i))
      for (std::size_t t : s.transitions_of.at(i))
        independent_ids.push_back(doc.net.transition_at(t).id);

  json steps = json::array();
  for (const trace_step& st : tr.steps) {
    json e;
    e["step"] = st.index;
    e["event"] = st.event;
    e["fired"] = st.fired;
    e["accepted"] = st.accepted;
    if (!st.note.empty()) e["note"] = st.note;
    e["model"] = st.model;
    e["marking"] = marking_json(st.state);
    if (!st.monitors.empty()) e["monitor_tokens"] = st.monitors;
    steps.push_back(std::move(e));
  }

  json digests;
  digests["net"] = digest(net_text);
  digests["scenario"] = digest(sc_text);
  json rep = report_head("simulate", digests);
  json res;
  res["places"] = places_json(mmc.base);
  res["resource"] = doc.net.place_at(r).id;
  res["capacity"] = mmc.capacity;
  res["events"] = sc.events.size();
  res["steps"] = tr.steps.size();
  res["accepted"] = tr.accepted;
  res["rejected"] = tr.rejected;
  res["final_model"] = tr.final_model;
  res["final_marking"] = marking_json(tr.final_state);
  json fc;
  for (const auto& [id, k] : tr.fired_counts) fc[id] = k;
  res["fired_counts"] = std::move(fc);

  std::size_t window_steps = 0;
  std::map<std::string, std::size_t> window_fires;
  for (const std::string& id : independent_ids) window_fires[id] = 0;
  for (const trace_step& st : tr.steps)
    if (st.model >= 1) {
      ++window_steps;
      if (st.accepted && window_fires.count(st.fired)) ++window_fires[st.fired];
    }
  json fw;
  fw["steps"] = window_steps;
  json wf;
  for (const auto& [id, k] : window_fires) wf[id] = k;
  fw["independent_fires"] = std::move(wf);
  res["failure_window"] = std::move(fw);

  if (trace_out.empty()) {
    res["trace"] = std::move(steps);
  } else {
    json t;
    t["places"] = places_json(mmc.base);
    t["steps"] = std::move(steps);
    write_file(trace_out, t.dump(2) + "\n");
    res["trace_file"] = trace_out;
  }

  rep["results"] = std::move(res);
  std::cout << rep.dump(2) << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"S4PR manufacturing-net analysis and robust supervisor synthesis"};
  app.require_subcommand(1);

  std::string path, resource, policy = "full", scenario, trace_out, dot_out, out;
  std::vector<std::string> overrides;
  std::size_t cap_flag = default_node_cap;
  int j = 1, a_max = 0, b_max = 0;

  CLI::App* validate = app.add_subcommand("validate", "Check a net document");
  validate->add_option("net", path, "net document (JSON)")->required();

  CLI::App* reach = app.add_subcommand("reach", "Explore the state space");
  reach->add_option("net", path)->required();
  reach->add_option("--override-marking", overrides,
                    "set a place's initial tokens (place=count)");
  CLI::Option* reach_cap = reach->add_option("--cap", cap_flag, "node cap");
  reach->add_option("--dot", dot_out, "also write a graphviz file");

  CLI::App* classify = app.add_subcommand("classify", "Split markings by failure robustness");
  classify->add_option("net", path)->required();
  classify->add_option("--resource", resource, "unreliable resource place");
  CLI::Option* classify_cap = classify->add_option("--cap", cap_flag);

  CLI::App* synthesize = app.add_subcommand("synthesize", "Derive monitor places for j failed units");
  synthesize->add_option("net", path)->required();
  synthesize->add_option("--resource", resource);
  synthesize->add_option("--j", j, "failed-unit count (1..capacity-1)");
  synthesize->add_option("--policy", policy, "forbidden-set policy")
      ->check(CLI::IsMember({"full", "threshold"}));
  synthesize->add_option("--amax", a_max, "constraint weight bound (0 = auto)");
  synthesize->add_option("--bmax", b_max, "constraint bound limit (0 = auto)");
  CLI::Option* synth_cap = synthesize->add_option("--cap", cap_flag);

  CLI::App* simulate = app.add_subcommand("simulate", "Run a failure-injection scenario");
  simulate->add_option("net", path)->required();
  simulate->add_option("--scenario", scenario, "scenario file (JSON)")->required();
  simulate->add_option("--resource", resource);
  simulate->add_option("--trace", trace_out, "write the step trace to a file");
  CLI::Option* sim_cap = simulate->add_option("--cap", cap_flag);

  CLI::App* export_dot = app.add_subcommand("export-dot", "Write the state space as graphviz");
  export_dot->add_option("net", path)->required();
  export_dot->add_option("--override-marking", overrides);
  CLI::Option* export_cap = export_dot->add_option("--cap", cap_flag);
  export_dot->add_option("--out", out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "USAGE: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*validate) return cmd_validate(path);
    if (*reach)
      return cmd_reach(path, overrides, !reach_cap->empty(), cap_flag, dot_out);
    if (*classify)
      return cmd_classify(path, resource, !classify_cap->empty(), cap_flag);
    if (*synthesize)
      return cmd_synthesize(path, resource, j, policy, a_max, b_max,
                            !synth_cap->empty(), cap_flag);
    if (*simulate)
      return cmd_simulate(path, scenario, resource, trace_out,
                          !sim_cap->empty(), cap_flag);
    if (*export_dot)
      return cmd_export_dot(path, overrides, !export_cap->empty(), cap_flag, out);
  } catch (const parse_error& e) {
    std::cerr << e.code() << ": " << e.what() << "\n";
    return 2;
  } catch (const io_error& e) {
    std::cerr << e.code() << ": " << e.what() << "\n";
    return 2;
  } catch (const error& e) {
    std::cerr << e.code() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "INTERNAL: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
