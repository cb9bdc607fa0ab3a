#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "augfix/assignment.hpp"
#include "augfix/aug.hpp"

namespace augfix {

// One incident edge of a node, reduced to what the transform cost sees:
// direction, kind, and the label of the node at the far end.
struct EdgeDescriptor {
  bool outgoing = false;
  EdgeKind kind = EdgeKind::Order;
  std::string neighbor_label;
};

// A node together with its incident descriptors; node == nullptr stands for
// an epsilon placeholder with no edges.
struct NodeProfile {
  const Node* node = nullptr;
  std::vector<EdgeDescriptor> incident;

  bool is_epsilon() const { return node == nullptr; }
};

inline NodeProfile profile_of(const Aug& aug, int node_id) {
  NodeProfile p;
  p.node = &aug.node(node_id);
  for (const Edge& e : aug.edges()) {
    if (e.src == node_id)
      p.incident.push_back(EdgeDescriptor{true, e.kind, aug.node(e.dst).label});
    if (e.dst == node_id)
      p.incident.push_back(EdgeDescriptor{false, e.kind, aug.node(e.src).label});
  }
  return p;
}

// Cost to transform node a into node b: one unit when labels or kinds differ,
// plus the minimal number of edge additions, deletions, and relabelings that
// align the incident descriptor multisets. Descriptors pair up within each
// (direction, kind) group; a label mismatch inside a group is one relabel.
// Matching a real node to an epsilon costs one deletion plus its degree.
inline Cost node_cost(const NodeProfile& a, const NodeProfile& b) {
  if (a.is_epsilon() && b.is_epsilon()) return 0;
  if (a.is_epsilon()) return 1 + static_cast<Cost>(b.incident.size());
  if (b.is_epsilon()) return 1 + static_cast<Cost>(a.incident.size());

  Cost cost = (a.node->label != b.node->label || a.node->kind != b.node->kind) ? 1 : 0;

  std::map<std::pair<bool, EdgeKind>, std::pair<std::vector<std::string>, std::vector<std::string>>>
      groups;
  for (const EdgeDescriptor& d : a.incident)
    groups[{d.outgoing, d.kind}].first.push_back(d.neighbor_label);
  for (const EdgeDescriptor& d : b.incident)
    groups[{d.outgoing, d.kind}].second.push_back(d.neighbor_label);

  for (auto& [key, labels] : groups) {
    auto& [la, lb] = labels;
    std::sort(la.begin(), la.end());
    std::sort(lb.begin(), lb.end());
    std::vector<std::string> common;
    std::set_intersection(la.begin(), la.end(), lb.begin(), lb.end(), std::back_inserter(common));
    cost += static_cast<Cost>(std::max(la.size(), lb.size()) - common.size());
  }
  return cost;
}

// Square transform-cost matrix between the nodes of two graphs; the smaller
// side is padded with epsilon rows or columns to equalize the cardinalities.
struct CostMatrix {
  std::vector<std::vector<Cost>> cost;
  int rows_real = 0;
  int cols_real = 0;
  std::vector<int> row_ids;  // node ids of graph A, by row index
  std::vector<int> col_ids;  // node ids of graph B, by column index

  int dim() const { return static_cast<int>(cost.size()); }
  bool row_is_epsilon(int i) const { return i >= rows_real; }
  bool col_is_epsilon(int j) const { return j >= cols_real; }
};

inline CostMatrix build_cost_matrix(const Aug& a, const Aug& b) {
  CostMatrix m;
  m.rows_real = static_cast<int>(a.node_count());
  m.cols_real = static_cast<int>(b.node_count());
  const int n = std::max(m.rows_real, m.cols_real);

  std::vector<NodeProfile> pa, pb;
  for (const Node& node : a.nodes()) {
    m.row_ids.push_back(node.id);
    pa.push_back(profile_of(a, node.id));
  }
  for (const Node& node : b.nodes()) {
    m.col_ids.push_back(node.id);
    pb.push_back(profile_of(b, node.id));
  }
  NodeProfile epsilon;

  m.cost.assign(n, std::vector<Cost>(n, 0));
  for (int i = 0; i < n; ++i) {
    const NodeProfile& row = i < m.rows_real ? pa[i] : epsilon;
    for (int j = 0; j < n; ++j) {
      const NodeProfile& col = j < m.cols_real ? pb[j] : epsilon;
      m.cost[i][j] = node_cost(row, col);
    }
  }
  return m;
}

inline Assignment solve_matching(const CostMatrix& m) { return solve_assignment(m.cost); }

inline std::vector<Assignment> ranked_matchings(const CostMatrix& m, std::size_t k,
                                                const Deadline& deadline = {}) {
  return ranked_assignments(m.cost, k, deadline);
}

// Plain numeric CSV; exactly dim rows of dim comma-separated entries.
inline std::string cost_matrix_csv(const CostMatrix& m) {
  std::string out;
  for (const auto& row : m.cost) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ",";
      out += std::to_string(row[j]);
    }
    out += "\n";
  }
  return out;
}

}  // namespace augfix
