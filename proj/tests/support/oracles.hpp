#pragma once

// Independent reference implementations used to cross-check the library:
// exhaustive assignment enumeration, a literal transcription of the node
// cost definition, and path-enumeration semantics for order/sel edges.

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "augfix/assignment.hpp"
#include "augfix/cost.hpp"
#include "augfix/usage_lang.hpp"

namespace oracle {

// All n! assignment costs, ascending; front() is the brute-force optimum.
inline std::vector<augfix::Cost> all_assignment_costs(
    const std::vector<std::vector<augfix::Cost>>& cost) {
  const int n = static_cast<int>(cost.size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<augfix::Cost> totals;
  do {
    augfix::Cost total = 0;
    for (int i = 0; i < n; ++i) total += cost[i][perm[i]];
    totals.push_back(total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::sort(totals.begin(), totals.end());
  return totals;
}

inline augfix::Cost min_assignment_cost(const std::vector<std::vector<augfix::Cost>>& cost) {
  if (cost.empty()) return 0;
  return all_assignment_costs(cost).front();
}

// Node cost, written directly from its definition: a relabel unit when label
// or kind differ, then per (direction, kind) group max(|a|,|b|) minus the
// number of neighbor labels the groups share.
inline augfix::Cost node_cost(const augfix::NodeProfile& a, const augfix::NodeProfile& b) {
  if (a.is_epsilon() && b.is_epsilon()) return 0;
  if (a.is_epsilon() || b.is_epsilon()) {
    const augfix::NodeProfile& real = a.is_epsilon() ? b : a;
    return 1 + static_cast<augfix::Cost>(real.incident.size());
  }
  augfix::Cost total = 0;
  if (a.node->label != b.node->label || a.node->kind != b.node->kind) total += 1;

  std::set<std::pair<bool, augfix::EdgeKind>> keys;
  for (const auto& d : a.incident) keys.insert({d.outgoing, d.kind});
  for (const auto& d : b.incident) keys.insert({d.outgoing, d.kind});
  for (const auto& key : keys) {
    std::map<std::string, int> ca, cb;
    int na = 0, nb = 0;
    for (const auto& d : a.incident)
      if (std::make_pair(d.outgoing, d.kind) == key) ++ca[d.neighbor_label], ++na;
    for (const auto& d : b.incident)
      if (std::make_pair(d.outgoing, d.kind) == key) ++cb[d.neighbor_label], ++nb;
    int shared = 0;
    for (const auto& [label, count] : ca) {
      auto it = cb.find(label);
      if (it != cb.end()) shared += std::min(count, it->second);
    }
    total += std::max(na, nb) - shared;
  }
  return total;
}

// Expected order/sel pairs of an AST, by explicit control-flow path
// enumeration. Actions are numbered in builder traversal order (condition
// before then-branch before else-branch), which matches ascending action
// node ids in the built graph.
struct FlowPairs {
  std::vector<std::pair<int, int>> order;  // (earlier, later) action indices
  std::vector<std::pair<int, int>> sel;    // (condition, body action)
  int action_count = 0;
};

namespace detail {

struct Walker {
  bool ctor_actions = false;
  int next = 0;
  std::vector<std::vector<int>> paths{{}};
  std::vector<std::pair<int, int>> sel;

  // Collects the action indices a statement list contributes, recursively.
  std::vector<int> walk(const std::vector<augfix::Stmt>& body) {
    std::vector<int> created;
    for (const augfix::Stmt& stmt : body) {
      if (const auto* decl = std::get_if<augfix::DeclStmt>(&stmt.node)) {
        if (decl->via_ctor && ctor_actions) created.push_back(emit());
      } else if (std::get_if<augfix::CallStmt>(&stmt.node)) {
        created.push_back(emit());
      } else if (const auto* ifstmt = std::get_if<augfix::IfStmt>(&stmt.node)) {
        int cond = emit();
        created.push_back(cond);
        std::vector<std::vector<int>> before = paths;
        std::vector<int> then_actions = walk(ifstmt->then_body);
        std::vector<std::vector<int>> after_then = paths;
        paths = before;
        std::vector<int> else_actions = walk(ifstmt->else_body);
        paths.insert(paths.end(), after_then.begin(), after_then.end());
        for (int a : then_actions) sel.emplace_back(cond, a);
        for (int a : else_actions) sel.emplace_back(cond, a);
        created.insert(created.end(), then_actions.begin(), then_actions.end());
        created.insert(created.end(), else_actions.begin(), else_actions.end());
      }
    }
    return created;
  }

  int emit() {
    int index = next++;
    for (auto& path : paths) path.push_back(index);
    return index;
  }
};

}  // namespace detail

inline FlowPairs flow_pairs(const augfix::UsageAst& ast, bool ctor_actions = false) {
  detail::Walker walker;
  walker.ctor_actions = ctor_actions;
  walker.walk(ast.body);

  std::set<std::pair<int, int>> order;
  for (const auto& path : walker.paths)
    for (std::size_t i = 0; i < path.size(); ++i)
      for (std::size_t j = i + 1; j < path.size(); ++j) order.insert({path[i], path[j]});

  FlowPairs out;
  out.order.assign(order.begin(), order.end());
  out.sel = walker.sel;
  out.action_count = walker.next;
  return out;
}

}  // namespace oracle
