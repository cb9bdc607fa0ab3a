#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "augfix/aug.hpp"

namespace augfix {

// Distinct non-empty apiType values over all nodes.
inline std::set<std::string> api_types_of(const Aug& aug) {
  std::set<std::string> out;
  for (const Node& n : aug.nodes())
    if (!n.api_type.empty()) out.insert(n.api_type);
  return out;
}

// Induced subgraph on nodes whose apiType is in the given set, with a mapping
// back to the original node ids. Subgraph ids are fresh and dense.
struct FilteredAug {
  Aug sub;
  std::map<int, int> to_original;  // sub node id -> original node id
};

inline FilteredAug filter_subgraph(const Aug& aug, const std::set<std::string>& types) {
  FilteredAug out;
  out.sub.set_method_name(aug.method_name());
  std::map<int, int> from_original;
  for (const Node& n : aug.nodes()) {
    if (!types.count(n.api_type)) continue;
    int sub_id = out.sub.add_node(n.kind, n.label, n.api_type);
    out.to_original[sub_id] = n.id;
    from_original[n.id] = sub_id;
  }
  for (const Edge& e : aug.edges()) {
    auto s = from_original.find(e.src);
    auto d = from_original.find(e.dst);
    if (s != from_original.end() && d != from_original.end())
      out.sub.add_edge(s->second, d->second, e.kind);
  }
  return out;
}

}  // namespace augfix
