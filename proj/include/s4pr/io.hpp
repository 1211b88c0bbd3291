#pragma once

#include <string>
#include <vector>

#include "s4pr/controller.hpp"
#include "s4pr/net.hpp"
#include "s4pr/reachability.hpp"
#include "s4pr/structure.hpp"

namespace s4pr {

// In-memory form of a .net JSON document.
struct net_document {
  petri_net net;
  marking m0;
  std::vector<std::size_t> unreliable; // place indices
};

// JSON schema: {"places": [{"id", "role", "subnet"?, "tokens"?}],
//               "transitions": [{"id", "subnet"?, "controllable"?}],
//               "arcs": [{"from", "to", "weight"?, "kind"?}],
//               "unreliable": ["id", ...]?}
// Defaults: subnet 0, tokens 0, controllable true, weight 1, kind "normal".
// Malformed JSON or schema violations raise PARSE_ERROR (with line/column for
// syntax errors); semantically invalid nets raise their own domain codes.
net_document parse_net_document(const std::string& text);
std::string serialize_net_document(const net_document& doc);

net_document load_net_document(const std::string& path); // IO_ERROR on failure

// Scenario file: JSON array of {"event": "FIRE"|"FAIL"|"REPAIR"|"AUTO",
// "transition"?, "count"?, "seed"?}.
failure_scenario parse_scenario(const std::string& text);
failure_scenario load_scenario(const std::string& path);

// Graphviz view of a state space; deadlock nodes are drawn as filled octagons.
std::string to_dot(const petri_net& net, const reachability_graph& g);

// FNV-1a over the raw bytes, as 16 hex digits; identifies report inputs.
std::string digest(const std::string& bytes);

std::string read_file(const std::string& path);   // IO_ERROR
void write_file(const std::string& path, const std::string& text);

} // namespace s4pr
