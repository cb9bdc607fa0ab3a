#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "augfix/aug.hpp"
#include "augfix/common.hpp"

namespace augfix {

inline nlohmann::json to_json(const Aug& aug) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const Node& n : aug.nodes())
    nodes.push_back({{"id", n.id},
                     {"kind", to_string(n.kind)},
                     {"label", n.label},
                     {"apiType", n.api_type}});
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : aug.edges())
    edges.push_back({{"src", e.src}, {"dst", e.dst}, {"kind", to_string(e.kind)}});
  return {{"method", aug.method_name()}, {"nodes", nodes}, {"edges", edges}};
}

inline nlohmann::json to_json(const ChangeRule& rule) {
  nlohmann::json transforms = nlohmann::json::array();
  for (const TransformPair& t : rule.transforms)
    transforms.push_back({{"m", t.misuse_id}, {"f", t.fixed_id}});
  return {{"misuse", to_json(rule.misuse_part)},
          {"fixed", to_json(rule.fixed_part)},
          {"transforms", transforms}};
}

inline std::string to_json_text(const Aug& aug) { return to_json(aug).dump(2) + "\n"; }
inline std::string to_json_text(const ChangeRule& rule) { return to_json(rule).dump(2) + "\n"; }

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& j, const char* key,
                                      const char* what) {
  auto it = j.find(key);
  if (it == j.end())
    throw InputError(std::string(what) + ": missing field \"" + key + "\"");
  return *it;
}

inline nlohmann::json parse_document(std::string_view text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("JSON parse error: ") + e.what());
  }
}

}  // namespace detail

// Loads an AUG document and surfaces any invariant violations as errors.
inline Aug aug_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("AUG document must be a JSON object");
  const auto& method = detail::require(j, "method", "AUG document");
  if (!method.is_string()) throw InputError("AUG field \"method\" must be a string");
  Aug aug(method.get<std::string>());

  for (const auto& jn : detail::require(j, "nodes", "AUG document")) {
    int id = detail::require(jn, "id", "node").get<int>();
    std::string kind_s = detail::require(jn, "kind", "node").get<std::string>();
    auto kind = node_kind_from(kind_s);
    if (!kind) throw InputError("node " + std::to_string(id) + ": unknown kind \"" + kind_s + "\"");
    std::string label = detail::require(jn, "label", "node").get<std::string>();
    std::string api = detail::require(jn, "apiType", "node").get<std::string>();
    if (!aug.add_node_with_id(id, *kind, std::move(label), std::move(api)))
      throw InputError("duplicate node id " + std::to_string(id));
  }
  for (const auto& je : detail::require(j, "edges", "AUG document")) {
    int src = detail::require(je, "src", "edge").get<int>();
    int dst = detail::require(je, "dst", "edge").get<int>();
    std::string kind_s = detail::require(je, "kind", "edge").get<std::string>();
    auto kind = edge_kind_from(kind_s);
    if (!kind)
      throw InputError("edge " + std::to_string(src) + "->" + std::to_string(dst) +
                       ": unknown kind \"" + kind_s + "\"");
    if (!aug.has_node(src))
      throw InputError("edge references unknown node id " + std::to_string(src));
    if (!aug.has_node(dst))
      throw InputError("edge references unknown node id " + std::to_string(dst));
    if (!aug.add_edge(src, dst, *kind))
      throw InputError("duplicate " + kind_s + " edge " + std::to_string(src) + "->" +
                       std::to_string(dst));
  }

  std::vector<std::string> violations = validate(aug);
  if (!violations.empty()) {
    std::string msg = "invalid AUG:";
    for (const std::string& v : violations) msg += "\n  " + v;
    throw InputError(msg);
  }
  return aug;
}

inline Aug aug_from_json_text(std::string_view text) {
  return aug_from_json(detail::parse_document(text));
}

inline ChangeRule rule_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("rule document must be a JSON object");
  ChangeRule rule;
  rule.misuse_part = aug_from_json(detail::require(j, "misuse", "rule document"));
  rule.fixed_part = aug_from_json(detail::require(j, "fixed", "rule document"));
  for (const auto& jt : detail::require(j, "transforms", "rule document"))
    rule.transforms.push_back(TransformPair{detail::require(jt, "m", "transform").get<int>(),
                                            detail::require(jt, "f", "transform").get<int>()});
  std::vector<std::string> violations = validate(rule);
  if (!violations.empty()) {
    std::string msg = "invalid change rule:";
    for (const std::string& v : violations) msg += "\n  " + v;
    throw InputError(msg);
  }
  return rule;
}

inline ChangeRule rule_from_json_text(std::string_view text) {
  return rule_from_json(detail::parse_document(text));
}

}  // namespace augfix
