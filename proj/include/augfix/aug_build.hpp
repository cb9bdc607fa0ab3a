#pragma once

#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "augfix/aug.hpp"
#include "augfix/usage_lang.hpp"

namespace augfix {

struct BuildOptions {
  // When set, "new T(...)" produces an action node "T.new()" with recv/para
  // edges; otherwise a constructor only introduces the object's data node.
  bool ctor_actions = false;
};

namespace build_detail {

inline std::string simple_name(const std::string& qualified) {
  auto pos = qualified.rfind('.');
  return pos == std::string::npos ? qualified : qualified.substr(pos + 1);
}

// (if-statement instance, branch) pairs; two actions coexist on a control-flow
// path iff their contexts never disagree on a shared if.
using Context = std::vector<std::pair<int, bool>>;

inline bool compatible(const Context& a, const Context& b) {
  for (const auto& [ifa, side_a] : a)
    for (const auto& [ifb, side_b] : b)
      if (ifa == ifb && side_a != side_b) return false;
  return true;
}

struct Builder {
  const BuildOptions& options;
  Aug aug;

  struct VarInfo {
    std::string type;
    int node_id = -1;
  };
  std::map<std::string, VarInfo> vars;
  std::map<std::pair<std::string, std::string>, int> literal_nodes;  // (type, spelling)

  struct ActionRecord {
    int node_id;
    Context context;
  };
  std::vector<ActionRecord> actions;  // in evaluation order
  Context context;
  int next_if = 0;

  explicit Builder(const UsageAst& ast, const BuildOptions& opts)
      : options(opts), aug(ast.method_name) {}

  VarInfo& var_info(const std::string& name) {
    auto it = vars.find(name);
    if (it == vars.end()) throw InputError("undeclared variable '" + name + "'");
    return it->second;
  }

  int data_node_for_var(const std::string& name) {
    VarInfo& info = var_info(name);
    if (info.node_id < 0)
      info.node_id = aug.add_node(NodeKind::Data, simple_name(info.type), info.type);
    return info.node_id;
  }

  int data_node_for_literal(const Arg& arg) {
    auto key = std::make_pair(arg.literal_type, arg.text);
    auto it = literal_nodes.find(key);
    if (it != literal_nodes.end()) return it->second;
    int id = aug.add_node(NodeKind::Data, arg.text, arg.literal_type);
    literal_nodes.emplace(key, id);
    return id;
  }

  int emit_action(const std::string& label, const std::string& api_type, int receiver_node,
                  const std::vector<Arg>& args) {
    int action = aug.add_node(NodeKind::Action, label, api_type);
    aug.add_edge(receiver_node, action, EdgeKind::Recv);
    for (const Arg& arg : args) {
      int data = arg.is_literal ? data_node_for_literal(arg) : data_node_for_var(arg.text);
      aug.add_edge(data, action, EdgeKind::Para);
    }
    actions.push_back(ActionRecord{action, context});
    return action;
  }

  int emit_call(const CallStmt& call) {
    const std::string type = var_info(call.receiver).type;
    return emit_action(simple_name(type) + "." + call.method + "()", type,
                       data_node_for_var(call.receiver), call.args);
  }

  // Returns the action node ids created in the statement list (recursively),
  // used for sel edges from enclosing conditions.
  std::vector<int> walk(const std::vector<Stmt>& body) {
    std::vector<int> created;
    for (const Stmt& stmt : body) {
      if (const auto* decl = std::get_if<DeclStmt>(&stmt.node)) {
        vars[decl->var] = VarInfo{decl->type, -1};
        if (decl->via_ctor && options.ctor_actions) {
          int receiver = data_node_for_var(decl->var);
          created.push_back(emit_action(simple_name(decl->type) + ".new()", decl->type, receiver,
                                        decl->ctor_args));
        }
      } else if (const auto* cdecl = std::get_if<ConstDeclStmt>(&stmt.node)) {
        vars[cdecl->var] = VarInfo{cdecl->type, -1};
      } else if (const auto* call = std::get_if<CallStmt>(&stmt.node)) {
        created.push_back(emit_call(*call));
      } else if (const auto* ifstmt = std::get_if<IfStmt>(&stmt.node)) {
        int cond = emit_call(ifstmt->condition);
        created.push_back(cond);
        int if_id = next_if++;
        context.emplace_back(if_id, true);
        std::vector<int> then_actions = walk(ifstmt->then_body);
        context.back().second = false;
        std::vector<int> else_actions = walk(ifstmt->else_body);
        context.pop_back();
        for (int a : then_actions) aug.add_edge(cond, a, EdgeKind::Sel);
        for (int a : else_actions) aug.add_edge(cond, a, EdgeKind::Sel);
        created.insert(created.end(), then_actions.begin(), then_actions.end());
        created.insert(created.end(), else_actions.begin(), else_actions.end());
      }
    }
    return created;
  }

  Aug build(const UsageAst& ast) {
    walk(ast.body);
    // Order edges: transitive within a path, never across exclusive branches.
    for (std::size_t i = 0; i < actions.size(); ++i)
      for (std::size_t j = i + 1; j < actions.size(); ++j)
        if (compatible(actions[i].context, actions[j].context))
          aug.add_edge(actions[i].node_id, actions[j].node_id, EdgeKind::Order);
    return std::move(aug);
  }
};

}  // namespace build_detail

// Constructs the usage graph of a parsed method body. Data nodes are created
// lazily on first use, so declared-but-unused variables leave no trace.
inline Aug build_aug(const UsageAst& ast, const BuildOptions& options = {}) {
  build_detail::Builder builder(ast, options);
  return builder.build(ast);
}

inline Aug build_aug_from_source(std::string_view source, const BuildOptions& options = {}) {
  return build_aug(parse(source), options);
}

}  // namespace augfix
