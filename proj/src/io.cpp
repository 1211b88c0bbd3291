#include "s4pr/io.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace s4pr {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void syntax_error(const std::string& text,
                               const nlohmann::json::parse_error& e) {
  // e.byte is 1-based position past the offending character
  std::size_t line = 1, col = 1;
  std::size_t stop = e.byte > 0 ? e.byte - 1 : 0;
  for (std::size_t i = 0; i < stop && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  throw parse_error("line " + std::to_string(line) + ", column " +
                    std::to_string(col) + ": " + e.what());
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    syntax_error(text, e);
  }
}

place_role role_from(const std::string& s) {
  if (s == "idle") return place_role::idle;
  if (s == "operation") return place_role::operation;
  if (s == "resource") return place_role::resource;
  if (s == "recovery") return place_role::recovery;
  if (s == "monitor") return place_role::monitor;
  throw parse_error("unknown place role '" + s + "'");
}

std::string role_name(place_role r) {
  switch (r) {
    case place_role::idle: return "idle";
    case place_role::operation: return "operation";
    case place_role::resource: return "resource";
    case place_role::recovery: return "recovery";
    case place_role::monitor: return "monitor";
  }
  return "operation";
}

const json& field(const json& obj, const char* key, const char* where) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw parse_error(std::string(where) + " is missing required field '" + key +
                      "'");
  return *it;
}

std::string as_string(const json& v, const char* what) {
  if (!v.is_string()) throw parse_error(std::string(what) + " must be a string");
  return v.get<std::string>();
}

int as_int(const json& v, const char* what) {
  if (!v.is_number_integer())
    throw parse_error(std::string(what) + " must be an integer");
  return v.get<int>();
}

} // namespace

net_document parse_net_document(const std::string& text) {
  json doc = parse_json(text);
  if (!doc.is_object()) throw parse_error("net document must be a JSON object");

  net_document out;
  std::vector<int> tokens;

  const json& places = field(doc, "places", "net document");
  if (!places.is_array()) throw parse_error("'places' must be an array");
  for (const json& p : places) {
    if (!p.is_object()) throw parse_error("each place must be an object");
    std::string id = as_string(field(p, "id", "place"), "place id");
    place_role role = role_from(as_string(field(p, "role", "place"), "place role"));
    int subnet = p.contains("subnet") ? as_int(p["subnet"], "place subnet") : 0;
    int tk = p.contains("tokens") ? as_int(p["tokens"], "place tokens") : 0;
    if (tk < 0) throw parse_error("place '" + id + "' has negative tokens");
    out.net.add_place(id, role, subnet);
    tokens.push_back(tk);
  }

  const json& transitions = field(doc, "transitions", "net document");
  if (!transitions.is_array()) throw parse_error("'transitions' must be an array");
  for (const json& t : transitions) {
    if (!t.is_object()) throw parse_error("each transition must be an object");
    std::string id = as_string(field(t, "id", "transition"), "transition id");
    int subnet = t.contains("subnet") ? as_int(t["subnet"], "transition subnet") : 0;
    bool controllable = true;
    if (t.contains("controllable")) {
      if (!t["controllable"].is_boolean())
        throw parse_error("'controllable' must be a boolean");
      controllable = t["controllable"].get<bool>();
    }
    out.net.add_transition(id, subnet, controllable);
  }

  const json& arcs = field(doc, "arcs", "net document");
  if (!arcs.is_array()) throw parse_error("'arcs' must be an array");
  for (const json& a : arcs) {
    if (!a.is_object()) throw parse_error("each arc must be an object");
    std::string from = as_string(field(a, "from", "arc"), "arc endpoint");
    std::string to = as_string(field(a, "to", "arc"), "arc endpoint");
    int weight = a.contains("weight") ? as_int(a["weight"], "arc weight") : 1;
    arc_kind kind = arc_kind::normal;
    if (a.contains("kind")) {
      std::string k = as_string(a["kind"], "arc kind");
      if (k == "normal")
        kind = arc_kind::normal;
      else if (k == "inhibitor")
        kind = arc_kind::inhibitor;
      else
        throw parse_error("unknown arc kind '" + k + "'");
    }
    out.net.add_arc(from, to, weight, kind);
  }

  if (doc.contains("unreliable")) {
    if (!doc["unreliable"].is_array())
      throw parse_error("'unreliable' must be an array of place ids");
    for (const json& u : doc["unreliable"])
      out.unreliable.push_back(
          out.net.place_index(as_string(u, "unreliable entry")));
  }

  out.m0 = marking{std::move(tokens)};
  return out;
}

std::string serialize_net_document(const net_document& doc) {
  json j;
  j["places"] = json::array();
  for (std::size_t p = 0; p < doc.net.place_count(); ++p) {
    const place& pl = doc.net.place_at(p);
    json e;
    e["id"] = pl.id;
    e["role"] = role_name(pl.role);
    if (pl.subnet != 0) e["subnet"] = pl.subnet;
    if (doc.m0[p] != 0) e["tokens"] = doc.m0[p];
    j["places"].push_back(std::move(e));
  }
  j["transitions"] = json::array();
  for (const transition& t : doc.net.transitions()) {
    json e;
    e["id"] = t.id;
    if (t.subnet != 0) e["subnet"] = t.subnet;
    if (!t.controllable) e["controllable"] = false;
    j["transitions"].push_back(std::move(e));
  }
  j["arcs"] = json::array();
  for (const arc& a : doc.net.arcs()) {
    const std::string& pid = doc.net.place_at(a.place).id;
    const std::string& tid = doc.net.transition_at(a.transition).id;
    json e;
    e["from"] = a.from_place ? pid : tid;
    e["to"] = a.from_place ? tid : pid;
    if (a.weight != 1) e["weight"] = a.weight;
    if (a.kind == arc_kind::inhibitor) e["kind"] = "inhibitor";
    j["arcs"].push_back(std::move(e));
  }
  if (!doc.unreliable.empty()) {
    j["unreliable"] = json::array();
    for (std::size_t r : doc.unreliable)
      j["unreliable"].push_back(doc.net.place_at(r).id);
  }
  return j.dump(2) + "\n";
}

net_document load_net_document(const std::string& path) {
  return parse_net_document(read_file(path));
}

failure_scenario parse_scenario(const std::string& text) {
  json doc = parse_json(text);
  if (!doc.is_array())
    throw parse_error("scenario must be a JSON array of event objects");
  failure_scenario sc;
  for (const json& e : doc) {
    if (!e.is_object()) throw parse_error("each scenario event must be an object");
    std::string kind = as_string(field(e, "event", "scenario event"), "event kind");
    scenario_event ev;
    if (kind == "FIRE") {
      ev.kind = event_kind::fire;
      ev.transition =
          as_string(field(e, "transition", "FIRE event"), "FIRE transition");
    } else if (kind == "FAIL") {
      ev.kind = event_kind::fail;
    } else if (kind == "REPAIR") {
      ev.kind = event_kind::repair;
    } else if (kind == "AUTO") {
      ev.kind = event_kind::auto_step;
      ev.count = e.contains("count") ? as_int(e["count"], "AUTO count") : 1;
      if (ev.count < 0) throw parse_error("AUTO count must be >= 0");
      if (e.contains("seed")) {
        ev.has_seed = true;
        ev.seed = static_cast<unsigned>(as_int(e["seed"], "AUTO seed"));
      }
    } else {
      throw parse_error("unknown scenario event '" + kind + "'");
    }
    sc.events.push_back(std::move(ev));
  }
  return sc;
}

failure_scenario load_scenario(const std::string& path) {
  return parse_scenario(read_file(path));
}

std::string to_dot(const petri_net& net, const reachability_graph& g) {
  std::ostringstream os;
  os << "digraph reachability {\n";
  os << "  rankdir=LR;\n";
  os << "  node [shape=ellipse, fontsize=10];\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    os << "  n" << i << " [label=\"(";
    for (std::size_t p = 0; p < g.nodes[i].size(); ++p) {
      if (p) os << ",";
      os << g.nodes[i][p];
    }
    os << ")\"";
    if (i == 0) os << ", peripheries=2";
    if (enabled_transitions(net, g.nodes[i]).empty())
      os << ", shape=octagon, style=filled, fillcolor=lightgray";
    os << "];\n";
  }
  for (const auto& e : g.edges)
    os << "  n" << e.from << " -> n" << e.to << " [label=\""
       << net.transition_at(e.transition).id << "\"];\n";
  os << "}\n";
  return os.str();
}

std::string digest(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw io_error("failed while reading '" + path + "'");
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw io_error("failed while writing '" + path + "'");
}

} // namespace s4pr
