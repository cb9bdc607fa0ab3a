#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "augfix/common.hpp"

namespace augfix {

using Cost = long long;

// Sentinel for forbidden pairs inside Murty subproblems; large enough that a
// single use dominates any sum of real costs, small enough not to overflow.
inline constexpr Cost kForbidden = Cost{1} << 40;

struct Assignment {
  std::vector<int> row_to_col;
  Cost total = 0;
};

namespace assign_detail {

// O(n^3) Kuhn-Munkres via dual potentials and augmenting paths. Rows are
// processed in increasing index; column ties resolve toward the lowest index.
// Returns nullopt only when the deadline expires mid-solve.
inline std::optional<Assignment> solve(const std::vector<std::vector<Cost>>& cost,
                                       const Deadline& deadline) {
  const int n = static_cast<int>(cost.size());
  if (n == 0) return Assignment{};
  constexpr Cost inf = std::numeric_limits<Cost>::max() / 4;

  std::vector<Cost> u(n + 1, 0), v(n + 1, 0);
  std::vector<int> match(n + 1, 0);  // col -> row, 1-based; 0 = free
  std::vector<int> way(n + 1, 0);
  std::vector<Cost> minv(n + 1);
  std::vector<char> used(n + 1);

  for (int i = 1; i <= n; ++i) {
    if (deadline.expired()) return std::nullopt;
    match[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      int i0 = match[j0];
      Cost delta = inf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        Cost cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment out;
  out.row_to_col.assign(n, -1);
  for (int j = 1; j <= n; ++j) out.row_to_col[match[j] - 1] = j - 1;
  for (int i = 0; i < n; ++i) out.total += cost[i][out.row_to_col[i]];
  return out;
}

}  // namespace assign_detail

inline Assignment solve_assignment(const std::vector<std::vector<Cost>>& cost) {
  return *assign_detail::solve(cost, Deadline());
}

inline std::optional<Assignment> solve_assignment(const std::vector<std::vector<Cost>>& cost,
                                                  const Deadline& deadline) {
  return assign_detail::solve(cost, deadline);
}

// Lazy enumeration of assignments in non-decreasing cost order via Murty's
// partitioning of the solution space. Subproblems carry constraint lists, not
// matrices, so the frontier stays small even for large instances. Each call
// to next() pops the currently cheapest assignment and pushes its children.
class RankedAssignments {
 public:
  explicit RankedAssignments(std::vector<std::vector<Cost>> cost, Deadline deadline = {})
      : base_(std::move(cost)), deadline_(deadline) {
    Node root;
    if (solve_node(root)) heap_.push(std::move(root));
  }

  // nullopt once all permutations were produced or the deadline expired
  // (distinguish with deadline_expired()).
  std::optional<Assignment> next() {
    if (exhausted_ || timed_out_ || heap_.empty()) {
      exhausted_ = true;
      return std::nullopt;
    }
    Node top = heap_.top();
    heap_.pop();

    // Partition: child i forces top's pairs for the first i-1 free rows and
    // forbids the pair of the i-th, keeping the subproblems disjoint.
    const int n = static_cast<int>(base_.size());
    std::vector<char> is_forced(n, 0);
    for (const auto& [r, c] : top.forced) is_forced[r] = 1;
    Node child = top;
    for (int r = 0; r < n; ++r) {
      if (is_forced[r]) continue;
      if (deadline_.expired()) {
        timed_out_ = true;
        return std::nullopt;
      }
      int c = top.solution.row_to_col[r];
      Node candidate = child;
      candidate.forbidden.emplace_back(r, c);
      if (solve_node(candidate)) heap_.push(std::move(candidate));
      if (timed_out_) return std::nullopt;
      child.forced.emplace_back(r, c);
    }
    return top.solution;
  }

  bool deadline_expired() const { return timed_out_; }

 private:
  struct Node {
    std::vector<std::pair<int, int>> forced;
    std::vector<std::pair<int, int>> forbidden;
    Assignment solution;
  };

  struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
      if (a.solution.total != b.solution.total) return a.solution.total > b.solution.total;
      return a.solution.row_to_col > b.solution.row_to_col;
    }
  };

  // Solves the node's subproblem; false when infeasible or timed out.
  bool solve_node(Node& node) {
    std::vector<std::vector<Cost>> m = base_;
    const int n = static_cast<int>(m.size());
    for (const auto& [r, c] : node.forbidden) m[r][c] = kForbidden;
    for (const auto& [r, c] : node.forced) {
      for (int j = 0; j < n; ++j)
        if (j != c) m[r][j] = kForbidden;
      for (int i = 0; i < n; ++i)
        if (i != r) m[i][c] = kForbidden;
    }
    auto best = assign_detail::solve(m, deadline_);
    if (!best) {
      timed_out_ = true;
      return false;
    }
    if (best->total >= kForbidden) return false;
    node.solution = std::move(*best);
    return true;
  }

  std::vector<std::vector<Cost>> base_;
  Deadline deadline_;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> heap_;
  bool exhausted_ = false;
  bool timed_out_ = false;
};

// Up to k distinct assignments in non-decreasing cost order; the first one
// equals solve_assignment's result.
inline std::vector<Assignment> ranked_assignments(const std::vector<std::vector<Cost>>& cost,
                                                  std::size_t k, const Deadline& deadline = {}) {
  RankedAssignments gen(cost, deadline);
  std::vector<Assignment> out;
  while (out.size() < k) {
    auto next = gen.next();
    if (!next) break;
    out.push_back(std::move(*next));
  }
  return out;
}

}  // namespace augfix
