#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "augfix/assignment.hpp"
#include "augfix/aug.hpp"
#include "augfix/cost.hpp"
#include "augfix/filter.hpp"

namespace augfix {

enum class Verdict { Misuse, Clean };

// Similarity as an exact fraction: 1 - cost / normalizer, clamped to [0, 1].
// Keeping numerator and denominator makes the strict sim(m,u) > sim(f,u)
// comparison immune to floating-point ties.
struct Similarity {
  Cost cost = 0;
  Cost normalizer = 0;  // zero only when both graphs are empty (sim = 1)

  double value() const {
    if (normalizer == 0) return 1.0;
    double v = 1.0 - static_cast<double>(cost) / static_cast<double>(normalizer);
    return std::min(1.0, std::max(0.0, v));
  }

  friend bool operator>(const Similarity& a, const Similarity& b) {
    Cost na = a.normalizer == 0 ? 1 : std::max<Cost>(0, a.normalizer - a.cost);
    Cost da = a.normalizer == 0 ? 1 : a.normalizer;
    Cost nb = b.normalizer == 0 ? 1 : std::max<Cost>(0, b.normalizer - b.cost);
    Cost db = b.normalizer == 0 ? 1 : b.normalizer;
    return na * db > nb * da;
  }
};

inline Similarity similarity_parts(const Aug& a, const Aug& b) {
  Similarity s;
  s.normalizer = static_cast<Cost>(a.node_count() + b.node_count() + a.edge_count() + b.edge_count());
  if (s.normalizer == 0) return s;
  s.cost = solve_assignment(build_cost_matrix(a, b).cost).total;
  return s;
}

inline double similarity(const Aug& a, const Aug& b) { return similarity_parts(a, b).value(); }

// A pattern element the usage fails to supply: either absent entirely or
// matched only at a positive transform cost.
struct MissingElement {
  NodeKind kind = NodeKind::Action;
  std::string label;
  std::string api_type;
  bool absent = false;  // true: matched to epsilon; false: matched with cost

  friend bool operator==(const MissingElement&, const MissingElement&) = default;
};

struct Detection {
  Verdict verdict = Verdict::Clean;
  std::optional<double> sim_misuse;  // rule mode only
  std::optional<double> sim_fixed;   // rule mode only
  std::vector<MissingElement> missing;
};

inline nlohmann::json to_json(const Detection& d) {
  nlohmann::json missing = nlohmann::json::array();
  for (const MissingElement& m : d.missing)
    missing.push_back({{"kind", to_string(m.kind)},
                       {"label", m.label},
                       {"apiType", m.api_type},
                       {"reason", m.absent ? "missing" : "mismatched"}});
  return {{"verdict", d.verdict == Verdict::Misuse ? "misuse" : "clean"},
          {"simMisuse", d.sim_misuse ? nlohmann::json(*d.sim_misuse) : nlohmann::json()},
          {"simFixed", d.sim_fixed ? nlohmann::json(*d.sim_fixed) : nlohmann::json()},
          {"missing", missing}};
}

// Similarity-based detection: a usage is a misuse iff it is strictly more
// similar to the rule's misuse part than to its fixed part (ties are clean).
// Epsilon holes are excluded from both parts before comparing.
inline Detection detect_with_rule(const Aug& usage, const ChangeRule& rule) {
  if (is_degenerate(rule)) throw InputError("degenerate rule: both parts are empty");
  Similarity to_misuse = similarity_parts(strip_epsilon(rule.misuse_part), usage);
  Similarity to_fixed = similarity_parts(strip_epsilon(rule.fixed_part), usage);
  Detection d;
  d.sim_misuse = to_misuse.value();
  d.sim_fixed = to_fixed.value();
  d.verdict = to_misuse > to_fixed ? Verdict::Misuse : Verdict::Clean;
  return d;
}

// Violation-based detection: the usage's type-filtered subgraph is matched to
// the pattern; pattern nodes that end up absent or imperfectly matched are
// the evidence. A minimum fraction of exact label matches is required before
// reporting, which suppresses unrelated-API false positives.
inline Detection detect_with_pattern(const Aug& usage, const Aug& pattern,
                                     double overlap_threshold = 0.5) {
  if (pattern.empty()) throw InputError("empty pattern");
  FilteredAug filtered = filter_subgraph(usage, api_types_of(pattern));

  CostMatrix matrix = build_cost_matrix(filtered.sub, pattern);
  Assignment best = solve_assignment(matrix.cost);

  Detection d;
  int equal_labels = 0;
  std::vector<MissingElement> evidence;
  std::vector<int> col_to_row(matrix.dim());
  for (int i = 0; i < matrix.dim(); ++i) col_to_row[best.row_to_col[i]] = i;
  for (int j = 0; j < matrix.cols_real; ++j) {
    const Node& pnode = pattern.node(matrix.col_ids[j]);
    int i = col_to_row[j];
    if (matrix.row_is_epsilon(i)) {
      evidence.push_back(MissingElement{pnode.kind, pnode.label, pnode.api_type, true});
      continue;
    }
    const Node& unode = filtered.sub.node(matrix.row_ids[i]);
    if (unode.label == pnode.label) ++equal_labels;
    if (matrix.cost[i][j] > 0)
      evidence.push_back(MissingElement{pnode.kind, pnode.label, pnode.api_type, false});
  }

  double overlap = static_cast<double>(equal_labels) / static_cast<double>(matrix.cols_real);
  if (!evidence.empty() && overlap >= overlap_threshold) {
    d.verdict = Verdict::Misuse;
    d.missing = std::move(evidence);
  }
  return d;
}

namespace rule_detail {

// Rebuilds an induced part graph with fresh dense ids; keeps id mapping.
struct PartBuilder {
  Aug part;
  std::map<int, int> to_part;  // source node id -> part node id

  explicit PartBuilder(const std::string& method) : part(method) {}

  void include(const Aug& source, const std::set<int>& node_ids) {
    for (const Node& n : source.nodes())
      if (node_ids.count(n.id)) to_part[n.id] = part.add_node(n.kind, n.label, n.api_type);
    for (const Edge& e : source.edges())
      if (node_ids.count(e.src) && node_ids.count(e.dst))
        part.add_edge(to_part[e.src], to_part[e.dst], e.kind);
  }

  int add_epsilon() { return part.add_node(NodeKind::Epsilon, "", ""); }
};

}  // namespace rule_detail

// Distills the essential change between a misuse and its fixed version into a
// rule m -> f: positive-cost matches become updates, unmatched nodes become
// epsilon holes (additions in m, deletions in f), and the one-hop neighborhood
// of every changed node is kept as unchanged context. Unrelated zero-cost
// matches are trimmed away.
inline ChangeRule extract_change_rule(const Aug& misuse, const Aug& fixed) {
  if (semantically_equal(misuse, fixed)) throw InputError("no change between versions");

  CostMatrix matrix = build_cost_matrix(misuse, fixed);
  Assignment best = solve_assignment(matrix.cost);

  struct Pair {
    int misuse_id = -1;  // -1: addition (epsilon row)
    int fixed_id = -1;   // -1: deletion (epsilon column)
    Cost cost = 0;
  };
  std::vector<Pair> pairs;
  for (int i = 0; i < matrix.dim(); ++i) {
    int j = best.row_to_col[i];
    if (matrix.row_is_epsilon(i) && matrix.col_is_epsilon(j)) continue;
    pairs.push_back(Pair{matrix.row_is_epsilon(i) ? -1 : matrix.row_ids[i],
                         matrix.col_is_epsilon(j) ? -1 : matrix.col_ids[j], matrix.cost[i][j]});
  }

  std::set<int> changed_m, changed_f;
  for (const Pair& p : pairs) {
    if (p.misuse_id >= 0 && p.fixed_id >= 0 && p.cost > 0) {
      changed_m.insert(p.misuse_id);
      changed_f.insert(p.fixed_id);
    } else if (p.misuse_id >= 0 && p.fixed_id < 0) {
      changed_m.insert(p.misuse_id);
    } else if (p.misuse_id < 0 && p.fixed_id >= 0) {
      changed_f.insert(p.fixed_id);
    }
  }
  // The versions differ globally, but every node pair matched at zero cost:
  // the difference is pure rewiring among same-labeled neighbors, which a
  // node-level rule cannot express.
  if (changed_m.empty() && changed_f.empty())
    throw InputError("no change between versions expressible as a rule");

  auto neighborhood = [](const Aug& g, const std::set<int>& of) {
    std::set<int> out;
    for (int id : of)
      for (int n : g.neighbors(id)) out.insert(n);
    return out;
  };
  std::set<int> context_m = neighborhood(misuse, changed_m);
  std::set<int> context_f = neighborhood(fixed, changed_f);

  std::set<int> keep_m = changed_m, keep_f = changed_f;
  std::vector<Pair> kept_pairs;
  for (const Pair& p : pairs) {
    bool changed = (p.misuse_id < 0 || p.fixed_id < 0) || p.cost > 0;
    bool context = !changed && (context_m.count(p.misuse_id) || context_f.count(p.fixed_id));
    if (!changed && !context) continue;
    kept_pairs.push_back(p);
    if (p.misuse_id >= 0) keep_m.insert(p.misuse_id);
    if (p.fixed_id >= 0) keep_f.insert(p.fixed_id);
  }

  rule_detail::PartBuilder mb(misuse.method_name()), fb(fixed.method_name());
  mb.include(misuse, keep_m);
  fb.include(fixed, keep_f);

  ChangeRule rule;
  for (const Pair& p : kept_pairs) {
    int m_id = p.misuse_id >= 0 ? mb.to_part[p.misuse_id] : mb.add_epsilon();
    int f_id = p.fixed_id >= 0 ? fb.to_part[p.fixed_id] : fb.add_epsilon();
    rule.transforms.push_back(TransformPair{m_id, f_id});
  }
  rule.misuse_part = std::move(mb.part);
  rule.fixed_part = std::move(fb.part);
  return rule;
}

}  // namespace augfix
