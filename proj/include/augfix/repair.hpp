#pragma once

#include <algorithm>
#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "augfix/assignment.hpp"
#include "augfix/aug.hpp"
#include "augfix/cost.hpp"
#include "augfix/detect.hpp"
#include "augfix/filter.hpp"
#include "augfix/json_io.hpp"

namespace augfix {

enum class CorrectionKind { Update, Add, Delete };
enum class EdgeOpKind { Add, Delete, Relabel };

struct EdgeOp {
  EdgeOpKind op = EdgeOpKind::Add;
  Edge edge;                           // endpoints in misuse-graph id space
  EdgeKind new_kind = EdgeKind::Order; // relabel only
};

// One node-level repair step. For additions, misuse_node is the id the new
// node will receive; for updates and deletes it names an existing node.
struct Correction {
  CorrectionKind kind = CorrectionKind::Update;
  int misuse_node = -1;
  std::optional<Node> target;  // desired kind/label/apiType; absent for deletes
  std::vector<EdgeOp> edge_ops;
};

enum class RepairStatus { Repaired, NoValidMatching, Timeout, NotAMisuse };

enum class FailureReason { None, Cycle, InvalidEdges, Timeout, OomGuard, GenerationFailure };

inline const char* to_string(RepairStatus s) {
  switch (s) {
    case RepairStatus::Repaired: return "repaired";
    case RepairStatus::NoValidMatching: return "no_valid_matching";
    case RepairStatus::Timeout: return "timeout";
    case RepairStatus::NotAMisuse: return "not_a_misuse";
  }
  return "?";
}

inline const char* to_string(FailureReason r) {
  switch (r) {
    case FailureReason::None: return "none";
    case FailureReason::Cycle: return "cycle";
    case FailureReason::InvalidEdges: return "invalid-edges";
    case FailureReason::Timeout: return "timeout";
    case FailureReason::OomGuard: return "oom-guard";
    case FailureReason::GenerationFailure: return "generation-failure";
  }
  return "?";
}

struct RepairOutcome {
  RepairStatus status = RepairStatus::NoValidMatching;
  std::optional<Aug> repaired;
  int attempts = 0;
  std::vector<Correction> corrections;
  FailureReason failure = FailureReason::None;
  int cycle_rejections = 0;
  std::vector<std::string> warnings;
};

struct RepairOptions {
  int max_retries = 10;
  std::chrono::milliseconds timeout{300'000};
  // Approximates the out-of-memory guard: caps the padded matrix area and the
  // size (nodes + edges) of any candidate graph.
  long long size_budget = 100'000;
  // When set, repair first runs the matching detector and reports NotAMisuse
  // for clean usages instead of transforming them.
  bool detect_first = false;
  double overlap_threshold = 0.5;  // pattern detection, with detect_first
};

inline nlohmann::json to_json(const RepairOutcome& o) {
  nlohmann::json corrections = nlohmann::json::array();
  for (const Correction& c : o.corrections) {
    nlohmann::json ops = nlohmann::json::array();
    for (const EdgeOp& e : c.edge_ops) {
      nlohmann::json op = {{"op", e.op == EdgeOpKind::Add      ? "add"
                                  : e.op == EdgeOpKind::Delete ? "delete"
                                                               : "relabel"},
                           {"src", e.edge.src},
                           {"dst", e.edge.dst},
                           {"kind", to_string(e.edge.kind)}};
      if (e.op == EdgeOpKind::Relabel) op["newKind"] = to_string(e.new_kind);
      ops.push_back(op);
    }
    corrections.push_back(
        {{"kind", c.kind == CorrectionKind::Update   ? "update"
                  : c.kind == CorrectionKind::Add    ? "add"
                                                     : "delete"},
         {"node", c.misuse_node},
         {"target", c.target ? nlohmann::json{{"kind", to_string(c.target->kind)},
                                              {"label", c.target->label},
                                              {"apiType", c.target->api_type}}
                             : nlohmann::json()},
         {"edgeOps", ops}});
  }
  nlohmann::json aug_json;
  if (o.repaired) aug_json = to_json(*o.repaired);
  return {{"status", to_string(o.status)},
          {"attempts", o.attempts},
          {"aug", std::move(aug_json)},
          {"corrections", std::move(corrections)}};
}

// Deterministic application: node deletes, then node updates, then node adds;
// edge operations resolve once every node exists. The result is intentionally
// unvalidated (the caller runs the cycle check). Corrections referencing
// nonexistent nodes indicate a planner bug and throw.
inline Aug apply_corrections(const Aug& misuse, const std::vector<Correction>& corrections) {
  Aug out = misuse;
  std::vector<const EdgeOp*> deferred;

  auto require_node = [&](int id, const char* what) {
    if (!out.has_node(id))
      throw Error(std::string("internal: ") + what + " references missing node " +
                  std::to_string(id));
  };

  for (const Correction& c : corrections)
    if (c.kind == CorrectionKind::Delete) {
      require_node(c.misuse_node, "delete correction");
      out.remove_node(c.misuse_node);
    }
  for (const Correction& c : corrections)
    if (c.kind == CorrectionKind::Update) {
      require_node(c.misuse_node, "update correction");
      out.update_node(c.misuse_node, c.target->kind, c.target->label, c.target->api_type);
      for (const EdgeOp& op : c.edge_ops) deferred.push_back(&op);
    }
  for (const Correction& c : corrections)
    if (c.kind == CorrectionKind::Add) {
      if (!out.add_node_with_id(c.misuse_node, c.target->kind, c.target->label,
                                c.target->api_type))
        throw Error("internal: add correction reuses node id " + std::to_string(c.misuse_node));
      for (const EdgeOp& op : c.edge_ops) deferred.push_back(&op);
    }

  for (const EdgeOp* op : deferred)
    if (op->op == EdgeOpKind::Delete || op->op == EdgeOpKind::Relabel)
      out.remove_edge(op->edge.src, op->edge.dst, op->edge.kind);
  for (const EdgeOp* op : deferred) {
    if (op->op == EdgeOpKind::Delete) continue;
    EdgeKind kind = op->op == EdgeOpKind::Relabel ? op->new_kind : op->edge.kind;
    require_node(op->edge.src, "edge operation");
    require_node(op->edge.dst, "edge operation");
    out.add_edge(op->edge.src, op->edge.dst, kind);
  }
  return out;
}

namespace repair_detail {

// What one matching attempt wants to change, in template-resolved terms.
struct Plan {
  const Aug* misuse = nullptr;
  const Aug* template_graph = nullptr;        // pattern or rule fixed part
  std::map<int, int> region;                  // misuse id -> template id
  std::map<int, int> region_inv;              // template id -> misuse id
  std::vector<std::pair<int, int>> update_candidates;  // (misuse id, template id)
  std::vector<int> deletions;                 // misuse ids
  std::vector<int> additions;                 // template ids
};

inline bool has_cycle(const Aug& aug) {
  for (const std::string& v : validate(aug))
    if (v.rfind("cycle", 0) == 0) return true;
  return false;
}

struct EdgeRef {
  int src, dst;
  EdgeKind kind;
  friend auto operator<=>(const EdgeRef&, const EdgeRef&) = default;
};

// Turns a plan into concrete corrections. Template edges whose far endpoint
// has no counterpart in the misuse graph are dropped with a warning instead
// of guessing an endpoint.
inline std::vector<Correction> plan_corrections(const Plan& plan,
                                                std::vector<std::string>& warnings) {
  std::vector<Correction> out;
  const Aug& misuse = *plan.misuse;
  const Aug& tmpl = *plan.template_graph;

  int next_id = 0;
  for (const Node& n : misuse.nodes()) next_id = std::max(next_id, n.id + 1);
  std::map<int, int> new_ids;  // template id -> assigned misuse-space id
  for (int t : plan.additions) new_ids[t] = next_id++;

  std::set<int> deleted(plan.deletions.begin(), plan.deletions.end());

  // Template node -> misuse-space id (matched counterpart or freshly added).
  auto resolve = [&](int template_id) -> std::optional<int> {
    auto r = plan.region_inv.find(template_id);
    if (r != plan.region_inv.end() && !deleted.count(r->second)) return r->second;
    auto a = new_ids.find(template_id);
    if (a != new_ids.end()) return a->second;
    return std::nullopt;
  };

  // Desired incident edges of `t` in misuse-space, with `self` substituted for
  // t itself. skip_new: leave edges toward added nodes to the add correction.
  auto resolved_incident = [&](int t, int self, bool skip_new) {
    std::set<EdgeRef> out_edges;
    for (const Edge& e : tmpl.edges()) {
      if (e.src != t && e.dst != t) continue;
      int far = e.src == t ? e.dst : e.src;
      if (far == t) continue;  // self loops never occur in valid graphs
      if (skip_new && new_ids.count(far)) continue;
      auto far_id = resolve(far);
      if (!far_id) {
        warnings.push_back("dropped " + std::string(to_string(e.kind)) + " edge of template node " +
                           std::to_string(t) + ": endpoint " + std::to_string(far) +
                           " has no matched counterpart");
        continue;
      }
      out_edges.insert(e.src == t ? EdgeRef{self, *far_id, e.kind} : EdgeRef{*far_id, self, e.kind});
    }
    return out_edges;
  };

  auto diff_ops = [&](const std::set<EdgeRef>& current, const std::set<EdgeRef>& desired) {
    std::vector<EdgeOp> ops;
    std::vector<EdgeRef> to_delete, to_add;
    std::set_difference(current.begin(), current.end(), desired.begin(), desired.end(),
                        std::back_inserter(to_delete));
    std::set_difference(desired.begin(), desired.end(), current.begin(), current.end(),
                        std::back_inserter(to_add));
    // Present a delete/add on the same endpoints as one relabel.
    std::vector<char> consumed(to_add.size(), 0);
    for (const EdgeRef& d : to_delete) {
      bool relabeled = false;
      for (std::size_t k = 0; k < to_add.size(); ++k) {
        if (consumed[k] || to_add[k].src != d.src || to_add[k].dst != d.dst) continue;
        ops.push_back(EdgeOp{EdgeOpKind::Relabel, Edge{d.src, d.dst, d.kind}, to_add[k].kind});
        consumed[k] = 1;
        relabeled = true;
        break;
      }
      if (!relabeled) ops.push_back(EdgeOp{EdgeOpKind::Delete, Edge{d.src, d.dst, d.kind}});
    }
    for (std::size_t k = 0; k < to_add.size(); ++k)
      if (!consumed[k]) ops.push_back(EdgeOp{EdgeOpKind::Add, Edge{to_add[k].src, to_add[k].dst, to_add[k].kind}});
    return ops;
  };

  for (int u : plan.deletions)
    out.push_back(Correction{CorrectionKind::Delete, u, std::nullopt, {}});

  for (const auto& [u, t] : plan.update_candidates) {
    const Node& current = misuse.node(u);
    const Node& target = tmpl.node(t);

    std::set<EdgeRef> current_edges;
    for (const Edge& e : misuse.edges()) {
      if (e.src != u && e.dst != u) continue;
      int far = e.src == u ? e.dst : e.src;
      if (!plan.region.count(far) || deleted.count(far)) continue;  // untouched or dying edge
      current_edges.insert(EdgeRef{e.src, e.dst, e.kind});
    }
    std::set<EdgeRef> desired = resolved_incident(t, u, /*skip_new=*/true);
    // Edges already covered by the current set survive; edges to added nodes
    // belong to the add corrections.
    std::vector<EdgeOp> ops = diff_ops(current_edges, desired);

    bool field_change = current.kind != target.kind || current.label != target.label ||
                        current.api_type != target.api_type;
    if (!field_change && ops.empty()) continue;
    out.push_back(Correction{CorrectionKind::Update, u,
                             Node{u, target.kind, target.label, target.api_type}, std::move(ops)});
  }

  for (int t : plan.additions) {
    const Node& target = tmpl.node(t);
    int id = new_ids[t];
    std::vector<EdgeOp> ops;
    for (const EdgeRef& e : resolved_incident(t, id, /*skip_new=*/false))
      ops.push_back(EdgeOp{EdgeOpKind::Add, Edge{e.src, e.dst, e.kind}});
    out.push_back(Correction{CorrectionKind::Add, id,
                             Node{id, target.kind, target.label, target.api_type}, std::move(ops)});
  }
  return out;
}

// Shared retry loop: enumerate matchings in cost order, plan, apply, check
// acyclicity; cycles trigger the next-ranked matching.
template <typename MakePlan>
RepairOutcome repair_loop(const Aug& misuse, const CostMatrix& matrix, MakePlan&& make_plan,
                          const RepairOptions& opts) {
  RepairOutcome outcome;
  Deadline deadline = Deadline::after(opts.timeout);

  if (static_cast<long long>(matrix.dim()) * matrix.dim() > opts.size_budget) {
    outcome.status = RepairStatus::NoValidMatching;
    outcome.failure = FailureReason::OomGuard;
    return outcome;
  }

  RankedAssignments ranked(matrix.cost, deadline);
  while (outcome.attempts < opts.max_retries) {
    if (deadline.expired()) {
      outcome.status = RepairStatus::Timeout;
      outcome.failure = FailureReason::Timeout;
      return outcome;
    }
    std::optional<Assignment> assignment = ranked.next();
    if (!assignment) {
      if (ranked.deadline_expired()) {
        outcome.status = RepairStatus::Timeout;
        outcome.failure = FailureReason::Timeout;
      } else {
        outcome.status = RepairStatus::NoValidMatching;
      }
      return outcome;
    }
    ++outcome.attempts;

    Plan plan = make_plan(*assignment);
    std::vector<std::string> warnings;
    std::vector<Correction> corrections = plan_corrections(plan, warnings);
    Aug candidate = apply_corrections(misuse, corrections);

    if (static_cast<long long>(candidate.node_count() + candidate.edge_count()) >
        opts.size_budget) {
      outcome.status = RepairStatus::NoValidMatching;
      outcome.failure = FailureReason::OomGuard;
      return outcome;
    }

    if (validate(candidate).empty()) {
      outcome.status = RepairStatus::Repaired;
      outcome.repaired = std::move(candidate);
      outcome.corrections = std::move(corrections);
      outcome.warnings.insert(outcome.warnings.end(), warnings.begin(), warnings.end());
      outcome.failure = FailureReason::None;
      return outcome;
    }
    if (has_cycle(candidate)) {
      ++outcome.cycle_rejections;
      outcome.failure = FailureReason::Cycle;
    } else {
      outcome.failure = FailureReason::InvalidEdges;
    }
  }
  outcome.status =
      deadline.expired() ? RepairStatus::Timeout : RepairStatus::NoValidMatching;
  if (outcome.status == RepairStatus::Timeout) outcome.failure = FailureReason::Timeout;
  return outcome;
}

}  // namespace repair_detail

// Pattern-based repair: filter the misuse down to the pattern's API types,
// match the subgraph against the pattern, map the corrections back through
// the filter, and apply them to the full graph. Unfiltered nodes stay intact
// except for edges shared with changed neighbors.
inline RepairOutcome pattern_repair(const Aug& misuse, const Aug& pattern,
                                    const RepairOptions& opts = {}) {
  if (opts.detect_first &&
      detect_with_pattern(misuse, pattern, opts.overlap_threshold).verdict == Verdict::Clean) {
    RepairOutcome outcome;
    outcome.status = RepairStatus::NotAMisuse;
    return outcome;
  }

  FilteredAug filtered = filter_subgraph(misuse, api_types_of(pattern));
  if (filtered.sub.empty()) {
    RepairOutcome outcome;
    outcome.status = RepairStatus::NoValidMatching;
    outcome.failure = FailureReason::GenerationFailure;
    return outcome;  // nothing to anchor the pattern on
  }

  CostMatrix matrix = build_cost_matrix(filtered.sub, pattern);
  auto make_plan = [&](const Assignment& assignment) {
    repair_detail::Plan plan;
    plan.misuse = &misuse;
    plan.template_graph = &pattern;
    for (int i = 0; i < matrix.dim(); ++i) {
      int j = assignment.row_to_col[i];
      bool row_eps = matrix.row_is_epsilon(i);
      bool col_eps = matrix.col_is_epsilon(j);
      if (row_eps && col_eps) continue;
      if (row_eps) {
        plan.additions.push_back(matrix.col_ids[j]);
      } else if (col_eps) {
        plan.deletions.push_back(filtered.to_original.at(matrix.row_ids[i]));
      } else {
        int u = filtered.to_original.at(matrix.row_ids[i]);
        int t = matrix.col_ids[j];
        plan.region[u] = t;
        plan.region_inv[t] = u;
        if (matrix.cost[i][j] > 0) plan.update_candidates.emplace_back(u, t);
      }
    }
    return plan;
  };
  return repair_detail::repair_loop(misuse, matrix, make_plan, opts);
}

// Triple matching between misuse graph, rule misuse part, and rule fixed part.
enum class TripleCase {
  MatchedReal = 1,     // misuse node matched to a real misuse-part node
  PaddingAbsorbed = 2, // misuse node matched to a cardinality-padding epsilon
  RuleAddition = 3,    // synthetic epsilon paired with a misuse-part hole
  UnanchoredPart = 4   // real misuse-part node with no misuse counterpart
};

struct TripleEntry {
  int misuse_id = -1;       // -1 for synthetic epsilons
  int misuse_part_id = -1;  // -1 when matched to padding
  int fixed_part_id = -1;   // transform target; -1 when the rule has none
  bool fixed_is_epsilon = false;
  TripleCase kind = TripleCase::MatchedReal;
};

struct TripleMatch {
  std::vector<TripleEntry> entries;
  Assignment assignment;
};

namespace repair_detail {

inline TripleMatch make_triple(const ChangeRule& rule, const Aug& part_stripped,
                               const CostMatrix& matrix, Assignment assignment) {
  std::map<int, int> transform_of;  // misuse-part id -> fixed-part id
  for (const TransformPair& t : rule.transforms) transform_of[t.misuse_id] = t.fixed_id;

  auto fill_target = [&](TripleEntry& e, int part_id) {
    e.misuse_part_id = part_id;
    auto it = transform_of.find(part_id);
    if (it != transform_of.end()) {
      e.fixed_part_id = it->second;
      e.fixed_is_epsilon = rule.fixed_part.node(it->second).kind == NodeKind::Epsilon;
    }
  };

  TripleMatch triple;
  for (int i = 0; i < matrix.dim(); ++i) {
    int j = assignment.row_to_col[i];
    bool row_eps = matrix.row_is_epsilon(i);
    bool col_eps = matrix.col_is_epsilon(j);
    if (row_eps && col_eps) continue;
    TripleEntry e;
    if (!row_eps && !col_eps) {
      e.kind = TripleCase::MatchedReal;
      e.misuse_id = matrix.row_ids[i];
      fill_target(e, matrix.col_ids[j]);
    } else if (!row_eps) {
      e.kind = TripleCase::PaddingAbsorbed;
      e.misuse_id = matrix.row_ids[i];
    } else {
      e.kind = TripleCase::UnanchoredPart;
      fill_target(e, matrix.col_ids[j]);
    }
    triple.entries.push_back(e);
  }
  // Case 3: the holes disregarded during matching re-enter as synthetic
  // epsilons paired with their transform targets.
  for (const Node& n : rule.misuse_part.nodes()) {
    if (n.kind != NodeKind::Epsilon) continue;
    if (part_stripped.has_node(n.id)) continue;
    TripleEntry e;
    e.kind = TripleCase::RuleAddition;
    fill_target(e, n.id);
    triple.entries.push_back(e);
  }
  triple.assignment = std::move(assignment);
  return triple;
}

}  // namespace repair_detail

// Matches the misuse graph against the rule's misuse part (holes disregarded)
// and classifies every node per the three rule-matching cases.
inline TripleMatch rule_triple_match(const Aug& misuse, const ChangeRule& rule) {
  if (is_degenerate(rule)) throw InputError("degenerate rule: both parts are empty");
  Aug part = strip_epsilon(rule.misuse_part);
  CostMatrix matrix = build_cost_matrix(misuse, part);
  return repair_detail::make_triple(rule, part, matrix, solve_assignment(matrix.cost));
}

// Rule-based repair: derive corrections from the triple matching (updates and
// deletes from transform edges, additions from the rule's epsilon holes),
// apply them, and retry over ranked matchings while cycles appear.
inline RepairOutcome rule_repair(const Aug& misuse, const ChangeRule& rule,
                                 const RepairOptions& opts = {}) {
  if (is_degenerate(rule)) throw InputError("degenerate rule: both parts are empty");
  if (opts.detect_first && detect_with_rule(misuse, rule).verdict == Verdict::Clean) {
    RepairOutcome outcome;
    outcome.status = RepairStatus::NotAMisuse;
    return outcome;
  }

  Aug part = strip_epsilon(rule.misuse_part);
  CostMatrix matrix = build_cost_matrix(misuse, part);
  auto make_plan = [&](const Assignment& assignment) {
    TripleMatch triple = repair_detail::make_triple(rule, part, matrix, assignment);
    repair_detail::Plan plan;
    plan.misuse = &misuse;
    plan.template_graph = &rule.fixed_part;
    for (const TripleEntry& e : triple.entries) {
      switch (e.kind) {
        case TripleCase::MatchedReal:
          if (e.fixed_part_id >= 0 && e.fixed_is_epsilon) {
            plan.deletions.push_back(e.misuse_id);
          } else if (e.fixed_part_id >= 0) {
            plan.region[e.misuse_id] = e.fixed_part_id;
            plan.region_inv[e.fixed_part_id] = e.misuse_id;
            plan.update_candidates.emplace_back(e.misuse_id, e.fixed_part_id);
          }
          break;
        case TripleCase::PaddingAbsorbed:
          break;  // not part of the transformation
        case TripleCase::RuleAddition:
        case TripleCase::UnanchoredPart:
          if (e.fixed_part_id >= 0 && !e.fixed_is_epsilon)
            plan.additions.push_back(e.fixed_part_id);
          break;
      }
    }
    return plan;
  };
  return repair_detail::repair_loop(misuse, matrix, make_plan, opts);
}

}  // namespace augfix
