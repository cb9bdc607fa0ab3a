#pragma once

#include <cctype>
#include <string>

#include "augfix/aug.hpp"

namespace augfix {

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

inline std::string dot_graph_id(const std::string& name) {
  bool plain = !name.empty() && (std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_');
  for (char c : name)
    plain = plain && (std::isalnum(static_cast<unsigned char>(c)) || c == '_');
  return plain ? name : "\"" + dot_escape(name) + "\"";
}

}  // namespace detail

// Graphviz rendering: actions as boxes, data as ellipses, epsilons as
// diamonds; data-flow edges solid, control-flow edges dashed.
inline std::string to_dot(const Aug& aug) {
  std::string out = "digraph " + detail::dot_graph_id(aug.method_name()) + " {\n";
  for (const Node& n : aug.nodes()) {
    const char* shape = n.kind == NodeKind::Action   ? "box"
                        : n.kind == NodeKind::Data   ? "ellipse"
                                                     : "diamond";
    out += "  n" + std::to_string(n.id) + " [shape=" + shape + ", label=\"" +
           detail::dot_escape(n.label) + "\"];\n";
  }
  for (const Edge& e : aug.edges()) {
    bool dashed = e.kind == EdgeKind::Order || e.kind == EdgeKind::Sel;
    out += "  n" + std::to_string(e.src) + " -> n" + std::to_string(e.dst) + " [label=\"" +
           to_string(e.kind) + "\"" + (dashed ? ", style=dashed" : "") + "];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace augfix
