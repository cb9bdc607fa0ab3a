#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "augfix/common.hpp"

namespace augfix {

// AST of the minimal Java-like usage language:
//
//   method   := "void" IDENT "(" ")" block
//   block    := "{" stmt* "}"
//   stmt     := decl | call ";" | ifstmt
//   decl     := TYPE IDENT "=" (("new" TYPE "(" args? ")") | callExpr | LITERAL) ";"
//   callExpr := IDENT "." IDENT "(" args? ")"
//   args     := arg ("," arg)*
//   arg      := IDENT | LITERAL
//   ifstmt   := "if" "(" callExpr ")" block ("else" block)?
//
// Types may be qualified ("pkg.B"); "//" starts a line comment.

struct Arg {
  bool is_literal = false;
  std::string text;          // variable name or literal spelling
  std::string literal_type;  // "int", "boolean", "String" for literals
};

struct CallStmt {
  std::string receiver;
  std::string method;
  std::vector<Arg> args;
  std::string result;  // declared variable the call initializes; empty if none
};

struct DeclStmt {
  std::string var;
  std::string type;  // qualified as written
  bool via_ctor = false;
  std::vector<Arg> ctor_args;
};

struct ConstDeclStmt {
  std::string var;
  std::string type;
  std::string literal;
};

struct Stmt;

struct IfStmt {
  CallStmt condition;
  std::vector<Stmt> then_body;
  std::vector<Stmt> else_body;
  bool has_else = false;
};

struct Stmt {
  std::variant<DeclStmt, ConstDeclStmt, CallStmt, IfStmt> node;
};

struct UsageAst {
  std::string method_name;
  std::vector<Stmt> body;
};

namespace lang_detail {

enum class Tok { Ident, IntLit, StrLit, BoolLit, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return cur_; }

  Token take() {
    Token t = cur_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_ws();
    cur_.line = line_;
    cur_.col = col_;
    if (pos_ >= src_.size()) {
      cur_ = Token{Tok::End, "", line_, col_};
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        word.push_back(get());
      cur_ = Token{word == "true" || word == "false" ? Tok::BoolLit : Tok::Ident, word,
                   cur_.line, cur_.col};
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      std::string num;
      num.push_back(get());
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
        num.push_back(get());
      cur_ = Token{Tok::IntLit, num, cur_.line, cur_.col};
      return;
    }
    if (c == '"') {
      std::string lit;
      lit.push_back(get());
      while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') lit.push_back(get());
      if (pos_ >= src_.size() || src_[pos_] != '"')
        throw ParseError("unterminated string literal", cur_.line, cur_.col);
      lit.push_back(get());
      cur_ = Token{Tok::StrLit, lit, cur_.line, cur_.col};
      return;
    }
    if (std::string("{}().,;=").find(c) != std::string::npos) {
      cur_ = Token{Tok::Punct, std::string(1, get()), cur_.line, cur_.col};
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
  }

  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') get();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        get();
      } else {
        break;
      }
    }
  }

  char get() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token cur_;
};

struct Scope {
  std::vector<std::vector<std::string>> blocks{{}};

  void open() { blocks.emplace_back(); }
  void close() { blocks.pop_back(); }

  void declare(const std::string& name) { blocks.back().push_back(name); }

  bool known(const std::string& name) const {
    for (const auto& block : blocks)
      for (const auto& v : block)
        if (v == name) return true;
    return false;
  }
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) {}

  UsageAst parse_method() {
    expect_keyword("void");
    UsageAst ast;
    ast.method_name = expect(Tok::Ident, "method name").text;
    expect_punct("(");
    expect_punct(")");
    ast.body = parse_block();
    if (lex_.peek().kind != Tok::End)
      throw ParseError("trailing input after method body", lex_.peek().line, lex_.peek().col);
    return ast;
  }

 private:
  std::vector<Stmt> parse_block() {
    expect_punct("{");
    scope_.open();
    std::vector<Stmt> body;
    while (!at_punct("}")) {
      if (lex_.peek().kind == Tok::End)
        throw ParseError("unexpected end of input, expected '}'", lex_.peek().line,
                         lex_.peek().col);
      parse_stmt(body);
    }
    expect_punct("}");
    scope_.close();
    return body;
  }

  void parse_stmt(std::vector<Stmt>& out) {
    const Token& t = lex_.peek();
    if (t.kind != Tok::Ident)
      throw ParseError("expected statement, got '" + t.text + "'", t.line, t.col);
    if (t.text == "if") {
      out.push_back(Stmt{parse_if()});
      return;
    }
    // Both decls and calls start with a (possibly qualified) name.
    Token first = lex_.take();
    std::string path = first.text;
    while (at_punct(".")) {
      lex_.take();
      Token part = expect(Tok::Ident, "name after '.'");
      if (at_punct("(")) {
        out.push_back(Stmt{parse_call_tail(path, part.text, first, "")});
        expect_punct(";");
        return;
      }
      path += "." + part.text;
    }
    // Declaration: path is the type, next token the variable name.
    Token var = expect(Tok::Ident, "variable name");
    expect_punct("=");
    out.push_back(Stmt{});
    Stmt& slot = out.back();
    const Token& init = lex_.peek();
    if (init.kind == Tok::Ident && init.text == "new") {
      lex_.take();
      std::string ctor_type = parse_type_name();
      expect_punct("(");
      std::vector<Arg> args = at_punct(")") ? std::vector<Arg>{} : parse_args();
      expect_punct(")");
      if (ctor_type != path)
        throw ParseError("constructed type '" + ctor_type + "' does not match declared type '" +
                             path + "'",
                         init.line, init.col);
      slot.node = DeclStmt{var.text, path, true, std::move(args)};
    } else if (init.kind == Tok::Ident) {
      Token recv = lex_.take();
      expect_punct(".");
      Token method = expect(Tok::Ident, "method name");
      if (!at_punct("("))
        throw ParseError("expected '(' after method name", lex_.peek().line, lex_.peek().col);
      CallStmt call = parse_call_tail(recv.text, method.text, recv, var.text);
      slot.node = DeclStmt{var.text, path, false, {}};
      scope_.declare(var.text);
      expect_punct(";");
      out.push_back(Stmt{std::move(call)});
      return;
    } else if (init.kind == Tok::IntLit || init.kind == Tok::StrLit || init.kind == Tok::BoolLit) {
      Token lit = lex_.take();
      slot.node = ConstDeclStmt{var.text, path, lit.text};
    } else {
      throw ParseError("expected initializer", init.line, init.col);
    }
    scope_.declare(var.text);
    expect_punct(";");
  }

  IfStmt parse_if() {
    lex_.take();  // "if"
    expect_punct("(");
    Token recv = expect(Tok::Ident, "receiver");
    expect_punct(".");
    Token method = expect(Tok::Ident, "method name");
    if (!at_punct("("))
      throw ParseError("expected '(' after method name", lex_.peek().line, lex_.peek().col);
    IfStmt stmt;
    stmt.condition = parse_call_tail(recv.text, method.text, recv, "");
    expect_punct(")");
    stmt.then_body = parse_block();
    if (lex_.peek().kind == Tok::Ident && lex_.peek().text == "else") {
      lex_.take();
      stmt.has_else = true;
      stmt.else_body = parse_block();
    }
    return stmt;
  }

  // Receiver and method already consumed; cursor sits on '('.
  CallStmt parse_call_tail(const std::string& receiver, const std::string& method,
                           const Token& recv_tok, const std::string& result) {
    if (!scope_.known(receiver))
      throw ParseError("undeclared variable '" + receiver + "'", recv_tok.line, recv_tok.col);
    expect_punct("(");
    CallStmt call;
    call.receiver = receiver;
    call.method = method;
    call.result = result;
    if (!at_punct(")")) call.args = parse_args();
    expect_punct(")");
    return call;
  }

  std::vector<Arg> parse_args() {
    std::vector<Arg> args;
    while (true) {
      const Token& t = lex_.peek();
      if (t.kind == Tok::Ident) {
        Token v = lex_.take();
        if (!scope_.known(v.text))
          throw ParseError("undeclared variable '" + v.text + "'", v.line, v.col);
        args.push_back(Arg{false, v.text, ""});
      } else if (t.kind == Tok::IntLit) {
        args.push_back(Arg{true, lex_.take().text, "int"});
      } else if (t.kind == Tok::StrLit) {
        args.push_back(Arg{true, lex_.take().text, "String"});
      } else if (t.kind == Tok::BoolLit) {
        args.push_back(Arg{true, lex_.take().text, "boolean"});
      } else {
        throw ParseError("expected argument", t.line, t.col);
      }
      if (!at_punct(",")) break;
      lex_.take();
    }
    return args;
  }

  std::string parse_type_name() {
    std::string path = expect(Tok::Ident, "type name").text;
    while (at_punct(".")) {
      lex_.take();
      path += "." + expect(Tok::Ident, "name after '.'").text;
    }
    return path;
  }

  bool at_punct(const char* p) const {
    return lex_.peek().kind == Tok::Punct && lex_.peek().text == p;
  }

  void expect_punct(const char* p) {
    if (!at_punct(p))
      throw ParseError("expected '" + std::string(p) + "', got '" + lex_.peek().text + "'",
                       lex_.peek().line, lex_.peek().col);
    lex_.take();
  }

  void expect_keyword(const char* word) {
    const Token& t = lex_.peek();
    if (t.kind != Tok::Ident || t.text != word)
      throw ParseError("expected '" + std::string(word) + "', got '" + t.text + "'", t.line,
                       t.col);
    lex_.take();
  }

  Token expect(Tok kind, const char* what) {
    const Token& t = lex_.peek();
    if (t.kind != kind)
      throw ParseError("expected " + std::string(what) + ", got '" + t.text + "'", t.line, t.col);
    return lex_.take();
  }

  Lexer lex_;
  Scope scope_;
};

}  // namespace lang_detail

// Throws ParseError with line/column positions; undeclared receivers and
// arguments are rejected here, not at graph construction.
inline UsageAst parse(std::string_view source) {
  return lang_detail::Parser(source).parse_method();
}

}  // namespace augfix
