#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "augfix/common.hpp"

namespace augfix {

enum class NodeKind { Action, Data, Epsilon };
enum class EdgeKind { Recv, Para, Order, Sel, Transform };

inline constexpr int kEdgeKindCount = 5;

inline const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Action: return "action";
    case NodeKind::Data: return "data";
    case NodeKind::Epsilon: return "epsilon";
  }
  return "?";
}

inline const char* to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::Recv: return "recv";
    case EdgeKind::Para: return "para";
    case EdgeKind::Order: return "order";
    case EdgeKind::Sel: return "sel";
    case EdgeKind::Transform: return "transform";
  }
  return "?";
}

inline std::optional<NodeKind> node_kind_from(std::string_view s) {
  if (s == "action") return NodeKind::Action;
  if (s == "data") return NodeKind::Data;
  if (s == "epsilon") return NodeKind::Epsilon;
  return std::nullopt;
}

inline std::optional<EdgeKind> edge_kind_from(std::string_view s) {
  if (s == "recv") return EdgeKind::Recv;
  if (s == "para") return EdgeKind::Para;
  if (s == "order") return EdgeKind::Order;
  if (s == "sel") return EdgeKind::Sel;
  if (s == "transform") return EdgeKind::Transform;
  return std::nullopt;
}

struct Node {
  int id = 0;
  NodeKind kind = NodeKind::Action;
  std::string label;      // "B.bar()" for actions, type/constant name for data
  std::string api_type;   // owning type, e.g. "pkg.B"; empty for epsilon
};

struct Edge {
  int src = 0;
  int dst = 0;
  EdgeKind kind = EdgeKind::Order;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Directed labeled multigraph of one method's API usage. Node ids are opaque
// integers unique within one graph; parallel edges between the same node pair
// must differ in kind, so add_edge drops exact duplicates. Acyclicity is an
// invariant of *valid* graphs, checked by validate(), not by the container.
class Aug {
 public:
  Aug() = default;
  explicit Aug(std::string method_name) : method_name_(std::move(method_name)) {}

  const std::string& method_name() const { return method_name_; }
  void set_method_name(std::string name) { method_name_ = std::move(name); }

  int add_node(NodeKind kind, std::string label, std::string api_type) {
    int id = next_id_++;
    index_[id] = nodes_.size();
    nodes_.push_back(Node{id, kind, std::move(label), std::move(api_type)});
    return id;
  }

  bool add_node_with_id(int id, NodeKind kind, std::string label, std::string api_type) {
    if (index_.count(id)) return false;
    index_[id] = nodes_.size();
    nodes_.push_back(Node{id, kind, std::move(label), std::move(api_type)});
    next_id_ = std::max(next_id_, id + 1);
    return true;
  }

  // Drops exact (src, dst, kind) duplicates; endpoints are not checked here.
  bool add_edge(int src, int dst, EdgeKind kind) {
    auto key = std::make_tuple(src, dst, static_cast<int>(kind));
    if (!edge_keys_.insert(key).second) return false;
    edges_.push_back(Edge{src, dst, kind});
    return true;
  }

  bool remove_edge(int src, int dst, EdgeKind kind) {
    auto key = std::make_tuple(src, dst, static_cast<int>(kind));
    if (edge_keys_.erase(key) == 0) return false;
    edges_.erase(std::find(edges_.begin(), edges_.end(), Edge{src, dst, kind}));
    return true;
  }

  // Removes the node and every incident edge.
  void remove_node(int id) {
    auto it = index_.find(id);
    if (it == index_.end()) throw Error("internal: remove_node on unknown id " + std::to_string(id));
    std::size_t pos = it->second;
    nodes_.erase(nodes_.begin() + static_cast<std::ptrdiff_t>(pos));
    index_.erase(it);
    for (auto& [nid, idx] : index_)
      if (idx > pos) --idx;
    for (auto eit = edges_.begin(); eit != edges_.end();) {
      if (eit->src == id || eit->dst == id) {
        edge_keys_.erase(std::make_tuple(eit->src, eit->dst, static_cast<int>(eit->kind)));
        eit = edges_.erase(eit);
      } else {
        ++eit;
      }
    }
  }

  void update_node(int id, NodeKind kind, std::string label, std::string api_type) {
    Node& n = mutable_node(id);
    n.kind = kind;
    n.label = std::move(label);
    n.api_type = std::move(api_type);
  }

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  bool has_node(int id) const { return index_.count(id) != 0; }

  const Node* find_node(int id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &nodes_[it->second];
  }

  const Node& node(int id) const {
    const Node* n = find_node(id);
    if (!n) throw Error("internal: unknown node id " + std::to_string(id));
    return *n;
  }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return nodes_.empty(); }

  int degree(int id) const {
    int d = 0;
    for (const Edge& e : edges_)
      if (e.src == id || e.dst == id) ++d;
    return d;
  }

  std::vector<Edge> incident_edges(int id) const {
    std::vector<Edge> out;
    for (const Edge& e : edges_)
      if (e.src == id || e.dst == id) out.push_back(e);
    return out;
  }

  // Distinct neighbor ids over all incident edges.
  std::vector<int> neighbors(int id) const {
    std::set<int> seen;
    for (const Edge& e : edges_) {
      if (e.src == id) seen.insert(e.dst);
      if (e.dst == id) seen.insert(e.src);
    }
    return {seen.begin(), seen.end()};
  }

 private:
  Node& mutable_node(int id) {
    auto it = index_.find(id);
    if (it == index_.end()) throw Error("internal: unknown node id " + std::to_string(id));
    return nodes_[it->second];
  }

  std::string method_name_ = "m";
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<int, std::size_t> index_;
  std::set<std::tuple<int, int, int>> edge_keys_;
  int next_id_ = 0;
};

// All invariant violations of a plain usage graph; empty means valid.
inline std::vector<std::string> validate(const Aug& aug) {
  std::vector<std::string> out;
  for (const Node& n : aug.nodes()) {
    if (n.kind == NodeKind::Epsilon) {
      if (!n.label.empty())
        out.push_back("epsilon node " + std::to_string(n.id) + " has non-empty label");
      if (!n.api_type.empty())
        out.push_back("epsilon node " + std::to_string(n.id) + " has non-empty apiType");
    } else if (n.label.empty()) {
      out.push_back(std::string(to_string(n.kind)) + " node " + std::to_string(n.id) +
                    " has empty label");
    }
  }

  auto describe = [&](const Edge& e) {
    return std::string(to_string(e.kind)) + " edge " + std::to_string(e.src) + "->" +
           std::to_string(e.dst);
  };

  std::vector<Edge> resolved;
  for (const Edge& e : aug.edges()) {
    const Node* s = aug.find_node(e.src);
    const Node* d = aug.find_node(e.dst);
    if (!s) out.push_back(describe(e) + " references unknown node id " + std::to_string(e.src));
    if (!d) out.push_back(describe(e) + " references unknown node id " + std::to_string(e.dst));
    if (!s || !d) continue;
    resolved.push_back(e);
    switch (e.kind) {
      case EdgeKind::Recv:
      case EdgeKind::Para:
        if (s->kind != NodeKind::Data || d->kind != NodeKind::Action)
          out.push_back(describe(e) + " must connect a data node to an action node");
        break;
      case EdgeKind::Order:
      case EdgeKind::Sel:
        if (s->kind != NodeKind::Action || d->kind != NodeKind::Action)
          out.push_back(describe(e) + " must connect action nodes");
        break;
      case EdgeKind::Transform:
        out.push_back(describe(e) + " is not allowed inside a plain usage graph");
        break;
    }
  }

  // Cycle check over all edge kinds jointly (Kahn).
  std::unordered_map<int, int> indeg;
  for (const Node& n : aug.nodes()) indeg[n.id] = 0;
  for (const Edge& e : resolved) ++indeg[e.dst];
  std::vector<int> queue;
  for (const auto& [id, d] : indeg)
    if (d == 0) queue.push_back(id);
  std::size_t visited = 0;
  while (!queue.empty()) {
    int id = queue.back();
    queue.pop_back();
    ++visited;
    for (const Edge& e : resolved)
      if (e.src == id && --indeg[e.dst] == 0) queue.push_back(e.dst);
  }
  if (visited < aug.node_count()) {
    std::vector<int> stuck;
    for (const auto& [id, d] : indeg)
      if (d > 0) stuck.push_back(id);
    std::sort(stuck.begin(), stuck.end());
    std::string msg = "cycle among nodes:";
    for (int id : stuck) msg += " " + std::to_string(id);
    out.push_back(msg);
  }
  return out;
}

// Copy without epsilon nodes (and their incident edges); node ids preserved.
inline Aug strip_epsilon(const Aug& aug) {
  Aug out(aug.method_name());
  std::set<int> dropped;
  for (const Node& n : aug.nodes()) {
    if (n.kind == NodeKind::Epsilon)
      dropped.insert(n.id);
    else
      out.add_node_with_id(n.id, n.kind, n.label, n.api_type);
  }
  for (const Edge& e : aug.edges())
    if (!dropped.count(e.src) && !dropped.count(e.dst)) out.add_edge(e.src, e.dst, e.kind);
  return out;
}

namespace detail {

using ColorKey = std::tuple<int, std::string, std::string>;

inline ColorKey color_of(const Node& n) {
  return {static_cast<int>(n.kind), n.label, n.api_type};
}

struct IsoGraph {
  std::vector<int> ids;
  std::unordered_map<int, int> pos;                       // id -> dense index
  std::vector<ColorKey> color;                            // by dense index
  std::vector<std::array<int, kEdgeKindCount>> out_deg;   // per kind
  std::vector<std::array<int, kEdgeKindCount>> in_deg;
  std::map<std::pair<int, int>, std::array<std::uint8_t, kEdgeKindCount>> adj;
  std::vector<std::vector<int>> touching;                 // dense index -> dense neighbors

  explicit IsoGraph(const Aug& a) {
    ids.reserve(a.node_count());
    for (const Node& n : a.nodes()) {
      pos[n.id] = static_cast<int>(ids.size());
      ids.push_back(n.id);
      color.push_back(color_of(n));
    }
    out_deg.assign(ids.size(), {});
    in_deg.assign(ids.size(), {});
    touching.assign(ids.size(), {});
    for (const Edge& e : a.edges()) {
      int s = pos.at(e.src), d = pos.at(e.dst);
      int k = static_cast<int>(e.kind);
      ++out_deg[s][k];
      ++in_deg[d][k];
      ++adj[{s, d}][static_cast<std::size_t>(k)];
      touching[s].push_back(d);
      touching[d].push_back(s);
    }
  }

  std::array<std::uint8_t, kEdgeKindCount> kinds_between(int s, int d) const {
    auto it = adj.find({s, d});
    return it == adj.end() ? std::array<std::uint8_t, kEdgeKindCount>{} : it->second;
  }
};

}  // namespace detail

// Cheap necessary condition for semantic equality: method-body signatures
// (node colors and per-kind edge counts) coincide.
inline bool signatures_match(const Aug& a, const Aug& b) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count()) return false;
  std::map<detail::ColorKey, int> ca, cb;
  for (const Node& n : a.nodes()) ++ca[detail::color_of(n)];
  for (const Node& n : b.nodes()) ++cb[detail::color_of(n)];
  if (ca != cb) return false;
  std::array<int, kEdgeKindCount> ea{}, eb{};
  for (const Edge& e : a.edges()) ++ea[static_cast<std::size_t>(e.kind)];
  for (const Edge& e : b.edges()) ++eb[static_cast<std::size_t>(e.kind)];
  return ea == eb;
}

// True iff a (kind, label, apiType)-preserving node bijection exists under
// which the edge multisets (with kinds) coincide. Backtracking isomorphism
// seeded by color partitions; throws BudgetError once the step budget is
// exhausted, signalling that the comparison is inconclusive.
inline bool semantically_equal(const Aug& a, const Aug& b, long long step_budget = 1'000'000) {
  if (!signatures_match(a, b)) return false;
  if (a.node_count() == 0) return true;

  detail::IsoGraph ga(a), gb(b);
  const int n = static_cast<int>(ga.ids.size());

  std::map<detail::ColorKey, std::vector<int>> classes_b;
  for (int j = 0; j < n; ++j) classes_b[gb.color[static_cast<std::size_t>(j)]].push_back(j);

  // Rarest color class first, higher degree first within a class.
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  auto total_deg = [&](const detail::IsoGraph& g, int i) {
    int d = 0;
    for (int k = 0; k < kEdgeKindCount; ++k)
      d += g.out_deg[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] +
           g.in_deg[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    return d;
  };
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    std::size_t sx = classes_b[ga.color[static_cast<std::size_t>(x)]].size();
    std::size_t sy = classes_b[ga.color[static_cast<std::size_t>(y)]].size();
    if (sx != sy) return sx < sy;
    int dx = total_deg(ga, x), dy = total_deg(ga, y);
    if (dx != dy) return dx > dy;
    return x < y;
  });

  std::vector<int> map_ab(static_cast<std::size_t>(n), -1);
  std::vector<char> used_b(static_cast<std::size_t>(n), 0);
  long long steps = 0;

  auto consistent = [&](int ai, int bj) {
    if (ga.out_deg[static_cast<std::size_t>(ai)] != gb.out_deg[static_cast<std::size_t>(bj)] ||
        ga.in_deg[static_cast<std::size_t>(ai)] != gb.in_deg[static_cast<std::size_t>(bj)])
      return false;
    for (int prev = 0; prev < n; ++prev) {
      int bp = map_ab[static_cast<std::size_t>(prev)];
      if (bp < 0) continue;
      if (ga.kinds_between(ai, prev) != gb.kinds_between(bj, bp)) return false;
      if (ga.kinds_between(prev, ai) != gb.kinds_between(bp, bj)) return false;
    }
    return true;
  };

  auto backtrack = [&](auto&& self, int depth) -> bool {
    if (depth == n) return true;
    int ai = order[static_cast<std::size_t>(depth)];
    for (int bj : classes_b[ga.color[static_cast<std::size_t>(ai)]]) {
      if (used_b[static_cast<std::size_t>(bj)]) continue;
      if (++steps > step_budget)
        throw BudgetError("semantic equality inconclusive: step budget exceeded");
      if (!consistent(ai, bj)) continue;
      map_ab[static_cast<std::size_t>(ai)] = bj;
      used_b[static_cast<std::size_t>(bj)] = 1;
      if (self(self, depth + 1)) return true;
      map_ab[static_cast<std::size_t>(ai)] = -1;
      used_b[static_cast<std::size_t>(bj)] = 0;
    }
    return false;
  };
  return backtrack(backtrack, 0);
}

// Transform edge of a change rule: misuse-part node -> fixed-part node.
struct TransformPair {
  int misuse_id = 0;
  int fixed_id = 0;

  friend bool operator==(const TransformPair&, const TransformPair&) = default;
};

// A rule m -> f: the misuse part, the fixed part, and the transform edges
// linking them. Additions are epsilon holes in the misuse part, deletions
// epsilon nodes in the fixed part.
struct ChangeRule {
  Aug misuse_part;
  Aug fixed_part;
  std::vector<TransformPair> transforms;
};

inline std::vector<std::string> validate(const ChangeRule& rule) {
  std::vector<std::string> out;
  for (const std::string& v : validate(rule.misuse_part)) out.push_back("misuse part: " + v);
  for (const std::string& v : validate(rule.fixed_part)) out.push_back("fixed part: " + v);
  std::set<int> seen_m, seen_f;
  for (const TransformPair& t : rule.transforms) {
    const Node* m = rule.misuse_part.find_node(t.misuse_id);
    const Node* f = rule.fixed_part.find_node(t.fixed_id);
    std::string tag = "transform " + std::to_string(t.misuse_id) + "->" + std::to_string(t.fixed_id);
    if (!m) out.push_back(tag + ": unknown misuse-part node");
    if (!f) out.push_back(tag + ": unknown fixed-part node");
    if (!seen_m.insert(t.misuse_id).second) out.push_back(tag + ": misuse-part node mapped twice");
    if (!seen_f.insert(t.fixed_id).second) out.push_back(tag + ": fixed-part node mapped twice");
    if (m && f && m->kind == NodeKind::Epsilon && f->kind == NodeKind::Epsilon)
      out.push_back(tag + ": epsilon mapped to epsilon");
  }
  return out;
}

// A rule is degenerate when both parts are empty after stripping epsilons.
inline bool is_degenerate(const ChangeRule& rule) {
  auto real_nodes = [](const Aug& g) {
    for (const Node& n : g.nodes())
      if (n.kind != NodeKind::Epsilon) return true;
    return false;
  };
  return !real_nodes(rule.misuse_part) && !real_nodes(rule.fixed_part);
}

}  // namespace augfix
