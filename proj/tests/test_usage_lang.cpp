#include <algorithm>
#include <catch2/catch.hpp>
#include <set>

#include "augfix/aug_build.hpp"
#include "augfix/usage_lang.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace augfix;

TEST_CASE("empty method parses to an empty body") {
  UsageAst ast = parse("void m() { }");
  CHECK(ast.method_name == "m");
  CHECK(ast.body.empty());
}

TEST_CASE("declaration and call map directly") {
  UsageAst ast = parse("void m() { A a = new A(); a.foo(); }");
  REQUIRE(ast.body.size() == 2);
  const auto& decl = std::get<DeclStmt>(ast.body[0].node);
  CHECK(decl.var == "a");
  CHECK(decl.type == "A");
  CHECK(decl.via_ctor);
  const auto& call = std::get<CallStmt>(ast.body[1].node);
  CHECK(call.receiver == "a");
  CHECK(call.method == "foo");
  CHECK(call.args.empty());
  CHECK(call.result.empty());
}

TEST_CASE("call initializers desugar into decl plus call with result") {
  UsageAst ast = parse("void m() { pkg.A a = new pkg.A(); pkg.B b = a.foo(); }");
  REQUIRE(ast.body.size() == 3);
  CHECK(std::get<DeclStmt>(ast.body[1].node).type == "pkg.B");
  const auto& call = std::get<CallStmt>(ast.body[2].node);
  CHECK(call.receiver == "a");
  CHECK(call.result == "b");
}

TEST_CASE("the guarded sample parses with a call condition") {
  UsageAst ast = parse(fixtures::kSampleMisuse);
  CHECK(ast.body.size() == 4);  // two decls, a.foo() with result, b.bar()

  UsageAst fixed = parse(fixtures::kSampleFixed);
  const auto& ifstmt = std::get<IfStmt>(fixed.body.back().node);
  CHECK(ifstmt.condition.receiver == "b");
  CHECK(ifstmt.condition.method == "isBarable");
  REQUIRE(ifstmt.has_else);
  CHECK(std::get<CallStmt>(ifstmt.then_body.front().node).method == "bar");
  CHECK(std::get<CallStmt>(ifstmt.else_body.front().node).method == "bar2");
}

TEST_CASE("constants and literal arguments parse") {
  UsageAst ast = parse(R"(void m() {
    int delay = 100;
    ui.Timer t = new ui.Timer();
    t.setDelay(delay);
    t.setName("slow", true);
  })");
  const auto& cdecl = std::get<ConstDeclStmt>(ast.body[0].node);
  CHECK(cdecl.var == "delay");
  CHECK(cdecl.type == "int");
  CHECK(cdecl.literal == "100");
  const auto& named = std::get<CallStmt>(ast.body[3].node);
  REQUIRE(named.args.size() == 2);
  CHECK(named.args[0].is_literal);
  CHECK(named.args[0].text == "\"slow\"");
  CHECK(named.args[1].literal_type == "boolean");
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse("void m() {\n  A a = ;\n}");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("2:") == 0);
  }
}

TEST_CASE("undeclared variables are named in the error") {
  CHECK_THROWS_WITH(parse("void m() { b.bar(); }"), Catch::Contains("b"));
  CHECK_THROWS_WITH(parse("void m() { A a = new A(); a.f(x); }"), Catch::Contains("x"));
  // a receiver is not in scope inside its own initializer
  CHECK_THROWS_WITH(parse("void m() { B b = b.self(); }"), Catch::Contains("b"));
}

TEST_CASE("line comments are skipped") {
  UsageAst ast = parse("void m() { // nothing here\n}");
  CHECK(ast.body.empty());
}

TEST_CASE("empty body builds an empty graph") {
  CHECK(build_aug(parse("void m() { }")).node_count() == 0);
}

TEST_CASE("two sequential calls share the receiver and order transitively") {
  Aug aug = build_aug(parse("void m() { A a = new A(); a.foo(); a.goo(); }"));
  REQUIRE(aug.node_count() == 3);  // data A, two actions
  int data = 0, action = 0, order = 0, recv = 0;
  for (const Node& n : aug.nodes()) (n.kind == NodeKind::Data ? data : action)++;
  for (const Edge& e : aug.edges()) {
    if (e.kind == EdgeKind::Order) ++order;
    if (e.kind == EdgeKind::Recv) ++recv;
  }
  CHECK(data == 1);
  CHECK(action == 2);
  CHECK(recv == 2);
  CHECK(order == 1);
}

TEST_CASE("the sample builds the documented node and edge sets") {
  Aug aug = fixtures::sample_fixed();
  std::multiset<std::string> labels;
  for (const Node& n : aug.nodes()) labels.insert(n.label);
  CHECK(labels ==
        std::multiset<std::string>{"A", "A.foo()", "B", "B.bar()", "B.bar2()", "B.isBarable()"});

  auto label_of = [&](int id) { return aug.node(id).label; };
  int sel = 0, order_bar_bar2 = 0;
  for (const Edge& e : aug.edges()) {
    if (e.kind == EdgeKind::Sel) {
      ++sel;
      CHECK(label_of(e.src) == "B.isBarable()");
    }
    if (e.kind == EdgeKind::Order &&
        ((label_of(e.src) == "B.bar()" && label_of(e.dst) == "B.bar2()") ||
         (label_of(e.src) == "B.bar2()" && label_of(e.dst) == "B.bar()")))
      ++order_bar_bar2;
  }
  CHECK(sel == 2);
  CHECK(order_bar_bar2 == 0);  // exclusive branches stay unordered
  CHECK(aug.edge_count() == 11);
  CHECK(validate(aug).empty());
}

TEST_CASE("constructor actions are opt-in") {
  UsageAst ast = parse("void m() { A a = new A(); a.foo(); }");
  Aug plain = build_aug(ast);
  CHECK(plain.node_count() == 2);

  BuildOptions options;
  options.ctor_actions = true;
  Aug with_ctor = build_aug(ast, options);
  CHECK(with_ctor.node_count() == 3);
  bool found = false;
  for (const Node& n : with_ctor.nodes()) found = found || n.label == "A.new()";
  CHECK(found);
  CHECK(validate(with_ctor).empty());
}

TEST_CASE("unused declarations leave no data node") {
  Aug aug = build_aug(parse("void m() { A a = new A(); B b = new B(); a.f(); }"));
  CHECK(aug.node_count() == 2);  // data A and the action; b is unused
}

TEST_CASE("literal arguments become data nodes with their spelling") {
  Aug aug = build_aug(parse("void m() { A a = new A(); a.f(5); a.g(5); }"));
  int literal_nodes = 0;
  for (const Node& n : aug.nodes())
    if (n.label == "5" && n.api_type == "int") ++literal_nodes;
  CHECK(literal_nodes == 1);  // same spelling shares the node
  int para = 0;
  for (const Edge& e : aug.edges())
    if (e.kind == EdgeKind::Para) ++para;
  CHECK(para == 2);
}

TEST_CASE("built graphs validate and match the path-enumeration flow oracle") {
  gen::Rng rng(99);
  for (int round = 0; round < 300; ++round) {
    UsageAst ast = gen::random_ast(rng);
    Aug aug = build_aug(ast);
    CAPTURE(round);
    CHECK(validate(aug).empty());

    // Action nodes in ascending id order correspond to traversal order.
    std::vector<int> action_ids;
    for (const Node& n : aug.nodes())
      if (n.kind == NodeKind::Action) action_ids.push_back(n.id);
    std::sort(action_ids.begin(), action_ids.end());

    oracle::FlowPairs expected = oracle::flow_pairs(ast);
    REQUIRE(static_cast<int>(action_ids.size()) == expected.action_count);

    std::set<std::pair<int, int>> order_edges, sel_edges;
    for (const Edge& e : aug.edges()) {
      if (e.kind == EdgeKind::Order) order_edges.insert({e.src, e.dst});
      if (e.kind == EdgeKind::Sel) sel_edges.insert({e.src, e.dst});
    }
    std::set<std::pair<int, int>> expected_order, expected_sel;
    for (auto [i, j] : expected.order) expected_order.insert({action_ids[i], action_ids[j]});
    for (auto [i, j] : expected.sel) expected_sel.insert({action_ids[i], action_ids[j]});
    CHECK(order_edges == expected_order);
    CHECK(sel_edges == expected_sel);
  }
}

namespace {

// Distinct used variables and literal constants of a statement list.
void collect_uses(const std::vector<Stmt>& body, std::set<std::string>& vars,
                  std::set<std::pair<std::string, std::string>>& literals) {
  auto use_call = [&](const CallStmt& call) {
    vars.insert(call.receiver);
    for (const Arg& arg : call.args) {
      if (arg.is_literal)
        literals.insert({arg.literal_type, arg.text});
      else
        vars.insert(arg.text);
    }
  };
  for (const Stmt& stmt : body) {
    if (const auto* call = std::get_if<CallStmt>(&stmt.node)) {
      use_call(*call);
    } else if (const auto* ifstmt = std::get_if<IfStmt>(&stmt.node)) {
      use_call(ifstmt->condition);
      collect_uses(ifstmt->then_body, vars, literals);
      collect_uses(ifstmt->else_body, vars, literals);
    }
  }
}

}  // namespace

TEST_CASE("node counts follow the statement structure") {
  gen::Rng rng(123);
  for (int round = 0; round < 200; ++round) {
    UsageAst ast = gen::random_ast(rng);
    Aug aug = build_aug(ast);
    int actions = 0, data = 0;
    for (const Node& n : aug.nodes()) (n.kind == NodeKind::Action ? actions : data)++;

    oracle::FlowPairs expected = oracle::flow_pairs(ast);
    CAPTURE(round);
    CHECK(actions == expected.action_count);

    // One data node per distinct used variable or constant; unused
    // declarations leave no node. (The generator never reuses names.)
    std::set<std::string> used_vars;
    std::set<std::pair<std::string, std::string>> used_literals;
    collect_uses(ast.body, used_vars, used_literals);
    CHECK(data == static_cast<int>(used_vars.size() + used_literals.size()));

    // Every data node must be used by at least one recv/para edge.
    for (const Node& n : aug.nodes()) {
      if (n.kind != NodeKind::Data) continue;
      CHECK(aug.degree(n.id) > 0);
    }
  }
}
