// Copyright 2026 The Plum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "plum/py/parser.h"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace plum::py {
namespace {

using namespace expr;  // NOLINT(build/namespaces)

std::optional<BinaryOperator> AugAssignOperator(const Token& tok) {
  if (tok.kind != TokenKind::kOp) return std::nullopt;
  static const std::pair<std::string_view, BinaryOperator> kTable[] = {
      {"+=", BinaryOperator::kAdd},       {"-=", BinaryOperator::kSub},
      {"*=", BinaryOperator::kMult},      {"@=", BinaryOperator::kMatMult},
      {"/=", BinaryOperator::kDiv},       {"%=", BinaryOperator::kMod},
      {"**=", BinaryOperator::kPow},      {"<<=", BinaryOperator::kLShift},
      {">>=", BinaryOperator::kRShift},   {"|=", BinaryOperator::kBitOr},
      {"^=", BinaryOperator::kBitXor},    {"&=", BinaryOperator::kBitAnd},
      {"//=", BinaryOperator::kFloorDiv},
  };
  for (const auto& [text, op] : kTable) {
    if (tok.text == text) return op;
  }
  return std::nullopt;
}

// Human-readable node description used in "cannot assign to ..." errors.
std::string Describe(const Expr& e) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Call>) return "function call";
        if constexpr (std::is_same_v<T, Constant>) {
          switch (n.kind) {
            case ConstantKind::kNone:
              return "None";
            case ConstantKind::kTrue:
              return "True";
            case ConstantKind::kFalse:
              return "False";
            case ConstantKind::kEllipsis:
              return "Ellipsis";
            default:
              return "literal";
          }
        }
        if constexpr (std::is_same_v<T, Compare>) return "comparison";
        if constexpr (std::is_same_v<T, Lambda>) return "lambda";
        if constexpr (std::is_same_v<T, IfExp>) return "conditional expression";
        if constexpr (std::is_same_v<T, NamedExpr>) return "named expression";
        if constexpr (std::is_same_v<T, Await>) return "await expression";
        if constexpr (std::is_same_v<T, Yield> || std::is_same_v<T, YieldFrom>)
          return "yield expression";
        if constexpr (std::is_same_v<T, Dict>) return "dict literal";
        if constexpr (std::is_same_v<T, Set>) return "set display";
        if constexpr (std::is_same_v<T, ListComp>) return "list comprehension";
        if constexpr (std::is_same_v<T, SetComp>) return "set comprehension";
        if constexpr (std::is_same_v<T, DictComp>) return "dict comprehension";
        if constexpr (std::is_same_v<T, GeneratorExp>)
          return "generator expression";
        return "expression";
      },
      e.node);
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Module ParseModule() {
    Module module;
    while (!At(TokenKind::kEndMarker)) {
      if (At(TokenKind::kIndent)) Fail("unexpected indent");
      ParseStatement(module.body);
    }
    return module;
  }

  ExprPtr ParseStandaloneExpression() {
    ExprPtr e = ParseStarExpressionsOrYield();
    while (At(TokenKind::kNewline)) Next();
    if (!At(TokenKind::kEndMarker)) Fail("invalid syntax");
    return e;
  }

 private:
  // ---- token helpers -----------------------------------------------------

  const Token& Peek(size_t ahead = 0) const {
    size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool At(TokenKind kind) const { return Peek().kind == kind; }
  bool AtOp(std::string_view op) const { return Peek().IsOp(op); }
  bool AtKeyword(std::string_view kw) const { return Peek().IsName(kw); }
  const Token& Next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  bool AcceptOp(std::string_view op) {
    if (!AtOp(op)) return false;
    Next();
    return true;
  }
  bool AcceptKeyword(std::string_view kw) {
    if (!AtKeyword(kw)) return false;
    Next();
    return true;
  }

  [[noreturn]] void Fail(const std::string& message) const {
    throw SyntaxError(message, Peek().loc);
  }
  [[noreturn]] void FailAt(const std::string& message, SourceLoc loc) const {
    throw SyntaxError(message, loc);
  }

  void ExpectOp(std::string_view op) {
    if (!AcceptOp(op)) {
      if (op == ":" ) Fail("expected ':'");
      Fail("invalid syntax");
    }
  }
  void ExpectKeyword(std::string_view kw) {
    if (!AcceptKeyword(kw)) Fail("invalid syntax");
  }
  std::string ExpectIdentifier() {
    const Token& t = Peek();
    if (t.kind != TokenKind::kName || IsKeyword(t.text)) Fail("invalid syntax");
    return Next().text;
  }
  bool AtIdentifier() const {
    return Peek().kind == TokenKind::kName && !IsKeyword(Peek().text);
  }

  bool CanStartExpression(const Token& t) const {
    switch (t.kind) {
      case TokenKind::kNumber:
      case TokenKind::kString:
        return true;
      case TokenKind::kName:
        return !IsKeyword(t.text) || t.text == "True" || t.text == "False" ||
               t.text == "None" || t.text == "not" || t.text == "lambda" ||
               t.text == "await";
      case TokenKind::kOp:
        return t.text == "(" || t.text == "[" || t.text == "{" ||
               t.text == "-" || t.text == "+" || t.text == "~" ||
               t.text == "*" || t.text == "...";
      default:
        return false;
    }
  }

  // ---- statements --------------------------------------------------------

  void ParseStatement(StmtList& out) {
    const Token& t = Peek();
    if (t.kind == TokenKind::kName) {
      if (t.text == "def" || t.text == "class" || t.text == "if" ||
          t.text == "while" || t.text == "for" || t.text == "try" ||
          t.text == "with" || t.text == "async") {
        out.push_back(ParseCompound());
        return;
      }
      if (t.text == "match") {
        if (StmtPtr m = TryParseMatch()) {
          out.push_back(std::move(m));
          return;
        }
      }
    }
    if (t.IsOp("@")) {
      out.push_back(ParseCompound());
      return;
    }
    ParseSimpleStatements(out);
  }

  void ParseSimpleStatements(StmtList& out) {
    out.push_back(ParseSimpleStatement());
    while (AcceptOp(";")) {
      if (At(TokenKind::kNewline)) break;
      out.push_back(ParseSimpleStatement());
    }
    if (!At(TokenKind::kNewline)) Fail("invalid syntax");
    Next();
  }

  StmtList ParseBlock() {
    StmtList body;
    if (At(TokenKind::kNewline)) {
      Next();
      if (!At(TokenKind::kIndent)) Fail("expected an indented block");
      Next();
      while (!At(TokenKind::kDedent) && !At(TokenKind::kEndMarker)) {
        ParseStatement(body);
      }
      if (At(TokenKind::kDedent)) Next();
    } else {
      ParseSimpleStatements(body);
    }
    return body;
  }

  StmtPtr ParseSimpleStatement() {
    const Token& t = Peek();
    SourceLoc loc = t.loc;
    if (t.kind == TokenKind::kName) {
      if (t.text == "pass") {
        Next();
        return MakeStmt(stmt::Pass{}, loc);
      }
      if (t.text == "break") {
        Next();
        return MakeStmt(stmt::Break{}, loc);
      }
      if (t.text == "continue") {
        Next();
        return MakeStmt(stmt::Continue{}, loc);
      }
      if (t.text == "return") {
        Next();
        stmt::Return r;
        if (CanStartExpression(Peek())) r.value = ParseStarExpressions();
        return MakeStmt(std::move(r), loc);
      }
      if (t.text == "raise") {
        Next();
        stmt::Raise r;
        if (CanStartExpression(Peek())) {
          r.exc = ParseExpression();
          if (AcceptKeyword("from")) r.cause = ParseExpression();
        }
        return MakeStmt(std::move(r), loc);
      }
      if (t.text == "global" || t.text == "nonlocal") {
        bool global = t.text == "global";
        Next();
        std::vector<std::string> names{ExpectIdentifier()};
        while (AcceptOp(",")) names.push_back(ExpectIdentifier());
        if (global) return MakeStmt(stmt::Global{std::move(names)}, loc);
        return MakeStmt(stmt::Nonlocal{std::move(names)}, loc);
      }
      if (t.text == "del") {
        Next();
        stmt::Delete d;
        do {
          if (!CanStartExpression(Peek())) break;
          ExprPtr target = ParseDelTargetElement();
          SetContext(*target, ExprContext::kDel);
          d.targets.push_back(std::move(target));
        } while (AcceptOp(","));
        if (d.targets.empty()) Fail("invalid syntax");
        return MakeStmt(std::move(d), loc);
      }
      if (t.text == "assert") {
        Next();
        stmt::Assert a;
        a.test = ParseExpression();
        if (AcceptOp(",")) a.msg = ParseExpression();
        return MakeStmt(std::move(a), loc);
      }
      if (t.text == "import") return ParseImport();
      if (t.text == "from") return ParseImportFrom();
    }
    return ParseExpressionStatement();
  }

  ExprPtr ParseDelTargetElement() {
    if (AtOp("*")) Fail("cannot delete starred");
    return ParseBitwiseOr();
  }

  StmtPtr ParseImport() {
    SourceLoc loc = Next().loc;
    stmt::Import imp;
    do {
      Alias a{ParseDottedName(), std::nullopt};
      if (AcceptKeyword("as")) a.asname = ExpectIdentifier();
      imp.names.push_back(std::move(a));
    } while (AcceptOp(","));
    return MakeStmt(std::move(imp), loc);
  }

  std::string ParseDottedName() {
    std::string name = ExpectIdentifier();
    while (AcceptOp(".")) name += "." + ExpectIdentifier();
    return name;
  }

  StmtPtr ParseImportFrom() {
    SourceLoc loc = Next().loc;
    stmt::ImportFrom imp;
    while (AtOp(".") || AtOp("...")) {
      imp.level += AtOp(".") ? 1 : 3;
      Next();
    }
    if (!AtKeyword("import")) imp.module = ParseDottedName();
    ExpectKeyword("import");
    if (AcceptOp("*")) {
      imp.names.push_back(Alias{"*", std::nullopt});
      return MakeStmt(std::move(imp), loc);
    }
    bool paren = AcceptOp("(");
    do {
      if (paren && AtOp(")")) break;
      Alias a{ExpectIdentifier(), std::nullopt};
      if (AcceptKeyword("as")) a.asname = ExpectIdentifier();
      imp.names.push_back(std::move(a));
    } while (AcceptOp(","));
    if (paren) ExpectOp(")");
    if (imp.names.empty()) Fail("invalid syntax");
    return MakeStmt(std::move(imp), loc);
  }

  StmtPtr ParseExpressionStatement() {
    SourceLoc loc = Peek().loc;
    ExprPtr first = ParseStarExpressionsOrYield();
    if (AtOp(":")) {
      Next();
      stmt::AnnAssign ann;
      if (first->Is<Tuple>()) {
        FailAt("only single target (not tuple) can be annotated", first->loc);
      }
      if (first->Is<List>()) {
        FailAt("only single target (not list) can be annotated", first->loc);
      }
      if (!first->Is<Name>() && !first->Is<Attribute>() &&
          !first->Is<Subscript>()) {
        FailAt("illegal target for annotation", first->loc);
      }
      ann.simple = first->Is<Name>() && !first->parenthesized;
      SetContext(*first, ExprContext::kStore);
      ann.target = std::move(first);
      ann.annotation = ParseExpression();
      if (AcceptOp("=")) ann.value = ParseStarExpressionsOrYield();
      return MakeStmt(std::move(ann), loc);
    }
    if (auto op = AugAssignOperator(Peek())) {
      if (!first->Is<Name>() && !first->Is<Attribute>() &&
          !first->Is<Subscript>()) {
        std::string kind = first->Is<Tuple>()  ? "'tuple'"
                           : first->Is<List>() ? "'list'"
                                               : Describe(*first);
        FailAt(kind + " is an illegal expression for augmented assignment",
               first->loc);
      }
      Next();
      SetContext(*first, ExprContext::kStore);
      stmt::AugAssign aug{std::move(first), *op, ParseStarExpressionsOrYield()};
      return MakeStmt(std::move(aug), loc);
    }
    if (AtOp("=")) {
      stmt::Assign assign;
      ExprPtr current = std::move(first);
      while (AcceptOp("=")) {
        SetContext(*current, ExprContext::kStore, /*assignment=*/true);
        assign.targets.push_back(std::move(current));
        current = ParseStarExpressionsOrYield();
      }
      assign.value = std::move(current);
      return MakeStmt(std::move(assign), loc);
    }
    return MakeStmt(stmt::ExprStmt{std::move(first)}, loc);
  }

  void SetContext(Expr& e, ExprContext ctx, bool assignment = false) {
    auto fail = [&](const std::string& what) {
      std::string verb = ctx == ExprContext::kDel ? "delete" : "assign to";
      std::string msg = "cannot " + verb + " " + what;
      if (assignment && ctx == ExprContext::kStore &&
          (e.Is<Call>() || e.Is<BinOp>() || e.Is<UnaryOp>() ||
           e.Is<Constant>() || e.Is<Compare>() || e.Is<BoolOp>())) {
        msg += " here. Maybe you meant '==' instead of '='?";
      }
      FailAt(msg, e.loc);
    };
    std::visit(
        [&](auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Name>) {
            n.ctx = ctx;
          } else if constexpr (std::is_same_v<T, Attribute> ||
                               std::is_same_v<T, Subscript>) {
            n.ctx = ctx;
          } else if constexpr (std::is_same_v<T, Starred>) {
            if (ctx == ExprContext::kDel) fail("starred");
            n.ctx = ctx;
            SetContext(*n.value, ctx);
          } else if constexpr (std::is_same_v<T, Tuple> ||
                               std::is_same_v<T, List>) {
            n.ctx = ctx;
            for (auto& elt : n.elts) SetContext(*elt, ctx);
          } else if constexpr (std::is_same_v<T, BinOp> ||
                               std::is_same_v<T, UnaryOp> ||
                               std::is_same_v<T, BoolOp>) {
            fail("expression");
          } else {
            fail(Describe(e));
          }
        },
        e.node);
  }

  StmtPtr ParseCompound() {
    const Token& t = Peek();
    SourceLoc loc = t.loc;
    if (t.IsOp("@")) {
      ExprList decorators;
      while (AcceptOp("@")) {
        decorators.push_back(ParseNamedExpression());
        if (!At(TokenKind::kNewline)) Fail("invalid syntax");
        Next();
      }
      StmtPtr def;
      if (AtKeyword("def") || AtKeyword("async")) {
        def = ParseFunctionDef();
        def->As<stmt::FunctionDef>()->decorators = std::move(decorators);
      } else if (AtKeyword("class")) {
        def = ParseClassDef();
        def->As<stmt::ClassDef>()->decorators = std::move(decorators);
      } else {
        Fail("invalid syntax");
      }
      def->loc = loc;
      return def;
    }
    if (t.text == "def") return ParseFunctionDef();
    if (t.text == "class") return ParseClassDef();
    if (t.text == "if") return ParseIf();
    if (t.text == "while") return ParseWhile();
    if (t.text == "for") return ParseFor(false, loc);
    if (t.text == "try") return ParseTry();
    if (t.text == "with") return ParseWith(false, loc);
    // async
    Next();
    if (AtKeyword("def")) {
      StmtPtr def = ParseFunctionDef();
      def->As<stmt::FunctionDef>()->is_async = true;
      def->loc = loc;
      return def;
    }
    if (AtKeyword("for")) return ParseFor(true, loc);
    if (AtKeyword("with")) return ParseWith(true, loc);
    Fail("invalid syntax");
  }

  StmtPtr ParseFunctionDef() {
    SourceLoc loc = Peek().loc;
    bool is_async = AcceptKeyword("async");
    ExpectKeyword("def");
    stmt::FunctionDef fn;
    fn.is_async = is_async;
    fn.name = ExpectIdentifier();
    ExpectOp("(");
    fn.args = ParseParameters(")", /*annotations=*/true);
    ExpectOp(")");
    if (AcceptOp("->")) fn.returns = ParseExpression();
    ExpectOp(":");
    fn.body = ParseBlock();
    return MakeStmt(std::move(fn), loc);
  }

  StmtPtr ParseClassDef() {
    SourceLoc loc = Next().loc;
    stmt::ClassDef cls;
    cls.name = ExpectIdentifier();
    if (AcceptOp("(")) {
      ParseCallArguments(cls.bases, cls.keywords, /*allow_generator=*/false);
    }
    ExpectOp(":");
    cls.body = ParseBlock();
    return MakeStmt(std::move(cls), loc);
  }

  StmtPtr ParseIf() {
    SourceLoc loc = Next().loc;  // `if` or `elif`
    stmt::If node;
    node.test = ParseNamedExpression();
    ExpectOp(":");
    node.body = ParseBlock();
    if (AtKeyword("elif")) {
      node.orelse.push_back(ParseIf());
    } else if (AcceptKeyword("else")) {
      ExpectOp(":");
      node.orelse = ParseBlock();
    }
    return MakeStmt(std::move(node), loc);
  }

  StmtPtr ParseWhile() {
    SourceLoc loc = Next().loc;
    stmt::While node;
    node.test = ParseNamedExpression();
    ExpectOp(":");
    node.body = ParseBlock();
    if (AcceptKeyword("else")) {
      ExpectOp(":");
      node.orelse = ParseBlock();
    }
    return MakeStmt(std::move(node), loc);
  }

  StmtPtr ParseFor(bool is_async, SourceLoc loc) {
    ExpectKeyword("for");
    stmt::For node;
    node.is_async = is_async;
    node.target = ParseTargetList();
    ExpectKeyword("in");
    node.iter = ParseStarExpressions();
    ExpectOp(":");
    node.body = ParseBlock();
    if (AcceptKeyword("else")) {
      ExpectOp(":");
      node.orelse = ParseBlock();
    }
    return MakeStmt(std::move(node), loc);
  }

  StmtPtr ParseTry() {
    SourceLoc loc = Next().loc;
    ExpectOp(":");
    stmt::Try node;
    node.body = ParseBlock();
    while (AtKeyword("except")) {
      ExceptHandler h;
      h.loc = Next().loc;
      if (!AtOp(":")) {
        h.type = ParseExpression();
        if (AtOp(",")) {
          Fail("multiple exception types must be parenthesized");
        }
        if (AcceptKeyword("as")) h.name = ExpectIdentifier();
      }
      ExpectOp(":");
      h.body = ParseBlock();
      node.handlers.push_back(std::move(h));
    }
    if (!node.handlers.empty() && AcceptKeyword("else")) {
      ExpectOp(":");
      node.orelse = ParseBlock();
    }
    if (AcceptKeyword("finally")) {
      ExpectOp(":");
      node.finalbody = ParseBlock();
    }
    if (node.handlers.empty() && node.finalbody.empty()) {
      Fail("expected 'except' or 'finally' block");
    }
    return MakeStmt(std::move(node), loc);
  }

  StmtPtr ParseWith(bool is_async, SourceLoc loc) {
    ExpectKeyword("with");
    stmt::With node;
    node.is_async = is_async;
    if (AtOp("(")) {
      size_t save = pos_;
      try {
        Next();
        std::vector<WithItem> items;
        do {
          if (AtOp(")")) break;
          items.push_back(ParseWithItem());
        } while (AcceptOp(","));
        ExpectOp(")");
        if (!AtOp(":") || items.empty()) throw SyntaxError("", {});
        node.items = std::move(items);
      } catch (const SyntaxError&) {
        pos_ = save;
        node.items.clear();
      }
    }
    if (node.items.empty()) {
      do {
        node.items.push_back(ParseWithItem());
      } while (AcceptOp(","));
    }
    ExpectOp(":");
    node.body = ParseBlock();
    return MakeStmt(std::move(node), loc);
  }

  WithItem ParseWithItem() {
    WithItem item;
    item.context_expr = ParseExpression();
    if (AcceptKeyword("as")) {
      item.optional_vars = ParseTargetElement();
      SetContext(*item.optional_vars, ExprContext::kStore);
      if (!AtOp(",") && !AtOp(")") && !AtOp(":")) Fail("invalid syntax");
    }
    return item;
  }

  // ---- match statement ---------------------------------------------------

  StmtPtr TryParseMatch() {
    size_t save = pos_;
    SourceLoc loc = Peek().loc;
    stmt::Match node;
    try {
      Next();  // soft keyword `match`
      if (!CanStartExpression(Peek())) throw SyntaxError("", {});
      SourceLoc subject_loc = Peek().loc;
      ExprPtr first = AtOp("*") ? ParseStarredElement() : ParseNamedExpression();
      if (AtOp(",")) {
        Tuple tuple;
        tuple.elts.push_back(std::move(first));
        while (AcceptOp(",")) {
          if (AtOp(":")) break;
          tuple.elts.push_back(AtOp("*") ? ParseStarredElement()
                                         : ParseNamedExpression());
        }
        node.subject = MakeExpr(std::move(tuple), subject_loc);
      } else {
        node.subject = std::move(first);
      }
      if (!AtOp(":")) throw SyntaxError("", {});
      Next();
      if (!At(TokenKind::kNewline)) throw SyntaxError("", {});
      Next();
      if (!At(TokenKind::kIndent)) throw SyntaxError("", {});
      Next();
      if (!AtKeyword("case")) throw SyntaxError("", {});
    } catch (const SyntaxError&) {
      pos_ = save;
      return nullptr;
    }
    while (AtKeyword("case")) {
      Next();
      MatchCase c;
      c.pattern = ParsePatterns();
      if (AcceptKeyword("if")) c.guard = ParseNamedExpression();
      ExpectOp(":");
      c.body = ParseBlock();
      node.cases.push_back(std::move(c));
    }
    if (!At(TokenKind::kDedent)) Fail("invalid syntax");
    Next();
    return MakeStmt(std::move(node), loc);
  }

  PatternPtr MakePattern(Pattern::Node node, SourceLoc loc) {
    return std::make_unique<Pattern>(Pattern{std::move(node), loc});
  }

  PatternPtr ParsePatterns() {
    SourceLoc loc = Peek().loc;
    PatternPtr first = ParseMaybeStarPattern();
    if (!AtOp(",")) {
      if (std::holds_alternative<pattern::MatchStar>(first->node)) {
        FailAt("invalid syntax", loc);
      }
      return first;
    }
    pattern::MatchSequence seq;
    seq.patterns.push_back(std::move(first));
    while (AcceptOp(",")) {
      if (AtOp(":") || AtKeyword("if")) break;
      seq.patterns.push_back(ParseMaybeStarPattern());
    }
    return MakePattern(std::move(seq), loc);
  }

  PatternPtr ParseMaybeStarPattern() {
    if (AtOp("*")) {
      SourceLoc loc = Next().loc;
      std::string name = ExpectIdentifier();
      pattern::MatchStar star;
      if (name != "_") star.name = name;
      return MakePattern(std::move(star), loc);
    }
    return ParsePattern();
  }

  PatternPtr ParsePattern() {
    SourceLoc loc = Peek().loc;
    PatternPtr p = ParseOrPattern();
    if (AcceptKeyword("as")) {
      std::string name = ExpectIdentifier();
      if (name == "_") Fail("cannot use '_' as a target");
      pattern::MatchAs as;
      as.pattern = std::move(p);
      as.name = name;
      return MakePattern(std::move(as), loc);
    }
    return p;
  }

  PatternPtr ParseOrPattern() {
    SourceLoc loc = Peek().loc;
    PatternPtr first = ParseClosedPattern();
    if (!AtOp("|")) return first;
    pattern::MatchOr alt;
    alt.patterns.push_back(std::move(first));
    while (AcceptOp("|")) alt.patterns.push_back(ParseClosedPattern());
    return MakePattern(std::move(alt), loc);
  }

  // Literal usable in a pattern: signed numbers, complex `a +/- bj`,
  // strings, None/True/False. Returns null when the next tokens are not a
  // literal.
  ExprPtr ParsePatternLiteralExpr() {
    SourceLoc loc = Peek().loc;
    if (At(TokenKind::kString)) return ParseStrings();
    bool negative = AtOp("-");
    if (negative) {
      if (Peek(1).kind != TokenKind::kNumber) Fail("invalid syntax");
      Next();
    }
    if (!At(TokenKind::kNumber)) return nullptr;
    ExprPtr number =
        MakeExpr(Constant{ConstantKind::kNumber, {Next().text}}, loc);
    if (negative) {
      number = MakeExpr(UnaryOp{UnaryOperator::kUSub, std::move(number)}, loc);
    }
    if (AtOp("+") || AtOp("-")) {
      BinaryOperator op =
          AtOp("+") ? BinaryOperator::kAdd : BinaryOperator::kSub;
      Next();
      if (!At(TokenKind::kNumber)) Fail("invalid syntax");
      const Token& imag = Next();
      char last = imag.text.back();
      if (last != 'j' && last != 'J') {
        FailAt("imaginary number required in complex literal", imag.loc);
      }
      ExprPtr rhs = MakeExpr(Constant{ConstantKind::kNumber, {imag.text}},
                             imag.loc);
      number = MakeExpr(BinOp{std::move(number), op, std::move(rhs)}, loc);
    }
    return number;
  }

  PatternPtr ParseClosedPattern() {
    SourceLoc loc = Peek().loc;
    const Token& t = Peek();
    if (t.IsName("None") || t.IsName("True") || t.IsName("False")) {
      Next();
      ConstantKind kind = t.text == "None"   ? ConstantKind::kNone
                          : t.text == "True" ? ConstantKind::kTrue
                                             : ConstantKind::kFalse;
      return MakePattern(pattern::MatchSingleton{kind}, loc);
    }
    if (t.kind == TokenKind::kString || t.kind == TokenKind::kNumber ||
        t.IsOp("-")) {
      return MakePattern(pattern::MatchValue{ParsePatternLiteralExpr()}, loc);
    }
    if (t.IsOp("(")) {
      Next();
      if (AcceptOp(")")) return MakePattern(pattern::MatchSequence{}, loc);
      PatternPtr first = ParseMaybeStarPattern();
      if (AcceptOp(")")) {
        if (std::holds_alternative<pattern::MatchStar>(first->node)) {
          pattern::MatchSequence seq;
          seq.patterns.push_back(std::move(first));
          return MakePattern(std::move(seq), loc);
        }
        return first;  // group pattern
      }
      pattern::MatchSequence seq;
      seq.patterns.push_back(std::move(first));
      while (AcceptOp(",")) {
        if (AtOp(")")) break;
        seq.patterns.push_back(ParseMaybeStarPattern());
      }
      ExpectOp(")");
      return MakePattern(std::move(seq), loc);
    }
    if (t.IsOp("[")) {
      Next();
      pattern::MatchSequence seq;
      while (!AtOp("]")) {
        seq.patterns.push_back(ParseMaybeStarPattern());
        if (!AcceptOp(",")) break;
      }
      ExpectOp("]");
      return MakePattern(std::move(seq), loc);
    }
    if (t.IsOp("{")) return ParseMappingPattern();
    if (t.kind == TokenKind::kName && !IsKeyword(t.text)) {
      std::string first = Next().text;
      if (!AtOp(".") && !AtOp("(")) {
        pattern::MatchAs as;
        if (first != "_") as.name = first;
        if (AtOp("=")) Fail("invalid syntax");
        return MakePattern(std::move(as), loc);
      }
      ExprPtr value = MakeExpr(Name{first, ExprContext::kLoad}, loc);
      while (AcceptOp(".")) {
        value = MakeExpr(Attribute{std::move(value), ExpectIdentifier(),
                                   ExprContext::kLoad},
                         loc);
      }
      if (AtOp("(")) return ParseClassPattern(std::move(value), loc);
      return MakePattern(pattern::MatchValue{std::move(value)}, loc);
    }
    Fail("invalid syntax");
  }

  PatternPtr ParseClassPattern(ExprPtr cls, SourceLoc loc) {
    ExpectOp("(");
    pattern::MatchClass node;
    node.cls = std::move(cls);
    while (!AtOp(")")) {
      if (Peek().kind == TokenKind::kName && !IsKeyword(Peek().text) &&
          Peek(1).IsOp("=")) {
        node.kwd_attrs.push_back(Next().text);
        Next();
        node.kwd_patterns.push_back(ParsePattern());
      } else {
        if (!node.kwd_attrs.empty()) {
          Fail("positional patterns follow keyword patterns");
        }
        node.patterns.push_back(ParsePattern());
      }
      if (!AcceptOp(",")) break;
    }
    ExpectOp(")");
    return MakePattern(std::move(node), loc);
  }

  PatternPtr ParseMappingPattern() {
    SourceLoc loc = Next().loc;
    pattern::MatchMapping node;
    while (!AtOp("}")) {
      if (AcceptOp("**")) {
        node.rest = ExpectIdentifier();
        AcceptOp(",");
        break;
      }
      ExprPtr key;
      SourceLoc key_loc = Peek().loc;
      if (AtKeyword("None") || AtKeyword("True") || AtKeyword("False")) {
        std::string text = Next().text;
        ConstantKind kind = text == "None"   ? ConstantKind::kNone
                            : text == "True" ? ConstantKind::kTrue
                                             : ConstantKind::kFalse;
        key = MakeExpr(Constant{kind, {}}, key_loc);
      } else if (AtIdentifier()) {
        key = MakeExpr(Name{Next().text, ExprContext::kLoad}, key_loc);
        if (!AtOp(".")) Fail("invalid syntax");
        while (AcceptOp(".")) {
          key = MakeExpr(Attribute{std::move(key), ExpectIdentifier(),
                                   ExprContext::kLoad},
                         key_loc);
        }
      } else {
        key = ParsePatternLiteralExpr();
        if (!key) Fail("invalid syntax");
      }
      ExpectOp(":");
      node.keys.push_back(std::move(key));
      node.patterns.push_back(ParsePattern());
      if (!AcceptOp(",")) break;
    }
    ExpectOp("}");
    return MakePattern(std::move(node), loc);
  }

  // ---- parameters and arguments -------------------------------------------

  std::unique_ptr<Arguments> ParseParameters(std::string_view end,
                                             bool annotations) {
    auto args = std::make_unique<Arguments>();
    bool seen_default = false;
    bool seen_star = false;
    bool seen_slash = false;
    bool bare_star = false;
    while (!AtOp(end)) {
      if (args->kwarg) Fail("arguments cannot follow var-keyword argument");
      if (AcceptOp("/")) {
        if (seen_slash) Fail("/ may appear only once");
        if (seen_star) Fail("/ must be ahead of *");
        if (args->args.empty()) Fail("at least one argument must precede /");
        seen_slash = true;
        args->posonly = std::move(args->args);
        args->args.clear();
      } else if (AcceptOp("**")) {
        args->kwarg = ParseParam(annotations);
      } else if (AcceptOp("*")) {
        if (seen_star) Fail("* argument may appear only once");
        seen_star = true;
        if (AtOp(",") || AtOp(end)) {
          bare_star = true;
        } else {
          args->vararg = ParseParam(annotations);
        }
      } else {
        Arg a = ParseParam(annotations);
        ExprPtr def;
        if (AcceptOp("=")) def = ParseExpression();
        if (seen_star) {
          args->kwonly.push_back(std::move(a));
          args->kw_defaults.push_back(std::move(def));
        } else {
          if (def) {
            seen_default = true;
            args->defaults.push_back(std::move(def));
          } else if (seen_default) {
            FailAt("non-default argument follows default argument", a.loc);
          }
          args->args.push_back(std::move(a));
        }
      }
      if (!AcceptOp(",")) break;
    }
    if (bare_star && args->kwonly.empty()) {
      Fail("named arguments must follow bare *");
    }
    return args;
  }

  Arg ParseParam(bool annotations) {
    Arg a;
    a.loc = Peek().loc;
    a.name = ExpectIdentifier();
    if (annotations && AcceptOp(":")) a.annotation = ParseExpression();
    return a;
  }

  // Parses call arguments after the opening parenthesis, consuming `)`.
  void ParseCallArguments(ExprList& args, std::vector<Keyword>& keywords,
                          bool allow_generator = true) {
    bool seen_keyword = false;
    bool seen_double_star = false;
    while (!AtOp(")")) {
      SourceLoc loc = Peek().loc;
      if (AcceptOp("*")) {
        if (seen_double_star) {
          FailAt(
              "iterable argument unpacking follows keyword argument unpacking",
              loc);
        }
        args.push_back(MakeExpr(Starred{ParseExpression(), ExprContext::kLoad},
                                loc));
      } else if (AcceptOp("**")) {
        seen_double_star = true;
        keywords.push_back(Keyword{std::nullopt, ParseExpression(), loc});
      } else if (Peek().kind == TokenKind::kName && Peek(1).IsOp("=")) {
        std::string name = Next().text;
        if (IsKeyword(name)) {
          if (name == "True" || name == "False" || name == "None") {
            FailAt("cannot assign to " + name, loc);
          }
          FailAt("invalid syntax", loc);
        }
        Next();
        seen_keyword = true;
        keywords.push_back(Keyword{name, ParseExpression(), loc});
      } else {
        ExprPtr value = ParseNamedExpression();
        if (AtKeyword("for") || AtKeyword("async")) {
          if (!allow_generator) Fail("invalid syntax");
          auto gens = ParseComprehensionClauses();
          value = MakeExpr(GeneratorExp{std::move(value), std::move(gens)}, loc);
          if (!args.empty() || !keywords.empty() || !AtOp(")")) {
            if (!(args.empty() && keywords.empty() && AtOp(")"))) {
              FailAt("Generator expression must be parenthesized", loc);
            }
          }
        } else if (AtOp("=")) {
          FailAt(
              "expression cannot contain assignment, perhaps you meant "
              "\"==\"?",
              loc);
        }
        if (seen_double_star) {
          FailAt("positional argument follows keyword argument unpacking",
                 loc);
        }
        if (seen_keyword) {
          FailAt("positional argument follows keyword argument", loc);
        }
        args.push_back(std::move(value));
      }
      if (!AcceptOp(",")) break;
      if (!args.empty() && args.back()->Is<GeneratorExp>() &&
          !args.back()->parenthesized && !AtOp(")")) {
        FailAt("Generator expression must be parenthesized", args.back()->loc);
      }
    }
    ExpectOp(")");
  }

  // ---- expressions ---------------------------------------------------------

  ExprPtr ParseStarExpressionsOrYield() {
    if (AtKeyword("yield")) return ParseYield();
    return ParseStarExpressions();
  }

  ExprPtr ParseYield() {
    SourceLoc loc = Next().loc;
    if (AcceptKeyword("from")) {
      return MakeExpr(YieldFrom{ParseExpression()}, loc);
    }
    Yield y;
    if (CanStartExpression(Peek())) y.value = ParseStarExpressions();
    return MakeExpr(std::move(y), loc);
  }

  ExprPtr ParseStarredElement() {
    SourceLoc loc = Next().loc;  // '*'
    return MakeExpr(Starred{ParseBitwiseOr(), ExprContext::kLoad}, loc);
  }

  ExprPtr ParseStarExpression() {
    if (AtOp("*")) return ParseStarredElement();
    return ParseExpression();
  }

  ExprPtr ParseStarExpressions() {
    SourceLoc loc = Peek().loc;
    ExprPtr first = ParseStarExpression();
    if (!AtOp(",")) return first;
    Tuple tuple;
    tuple.elts.push_back(std::move(first));
    while (AcceptOp(",")) {
      if (!CanStartExpression(Peek())) break;
      tuple.elts.push_back(ParseStarExpression());
    }
    return MakeExpr(std::move(tuple), loc);
  }

  ExprPtr ParseStarNamedExpression() {
    if (AtOp("*")) return ParseStarredElement();
    return ParseNamedExpression();
  }

  ExprPtr ParseNamedExpression() {
    SourceLoc loc = Peek().loc;
    if (AtIdentifier() && Peek(1).IsOp(":=")) {
      std::string name = Next().text;
      Next();
      ExprPtr target = MakeExpr(Name{name, ExprContext::kStore}, loc);
      return MakeExpr(NamedExpr{std::move(target), ParseExpression()}, loc);
    }
    ExprPtr e = ParseExpression();
    if (AtOp(":=")) {
      FailAt("cannot use assignment expressions with " + Describe(*e), e->loc);
    }
    return e;
  }

  ExprPtr ParseExpression() {
    if (AtKeyword("lambda")) return ParseLambda();
    SourceLoc loc = Peek().loc;
    ExprPtr body = ParseDisjunction();
    if (AtKeyword("if")) {
      Next();
      ExprPtr test = ParseDisjunction();
      if (!AcceptKeyword("else")) {
        Fail("expected 'else' after 'if' expression");
      }
      ExprPtr orelse = ParseExpression();
      return MakeExpr(IfExp{std::move(test), std::move(body), std::move(orelse)},
                      loc);
    }
    return body;
  }

  ExprPtr ParseLambda() {
    SourceLoc loc = Next().loc;
    Lambda lam;
    lam.args = ParseParameters(":", /*annotations=*/false);
    ExpectOp(":");
    lam.body = ParseExpression();
    return MakeExpr(std::move(lam), loc);
  }

  ExprPtr ParseDisjunction() {
    SourceLoc loc = Peek().loc;
    ExprPtr first = ParseConjunction();
    if (!AtKeyword("or")) return first;
    BoolOp node{BoolOperator::kOr, {}};
    node.values.push_back(std::move(first));
    while (AcceptKeyword("or")) node.values.push_back(ParseConjunction());
    return MakeExpr(std::move(node), loc);
  }

  ExprPtr ParseConjunction() {
    SourceLoc loc = Peek().loc;
    ExprPtr first = ParseInversion();
    if (!AtKeyword("and")) return first;
    BoolOp node{BoolOperator::kAnd, {}};
    node.values.push_back(std::move(first));
    while (AcceptKeyword("and")) node.values.push_back(ParseInversion());
    return MakeExpr(std::move(node), loc);
  }

  ExprPtr ParseInversion() {
    if (AtKeyword("not")) {
      SourceLoc loc = Next().loc;
      return MakeExpr(UnaryOp{UnaryOperator::kNot, ParseInversion()}, loc);
    }
    return ParseComparison();
  }

  std::optional<CompareOperator> AcceptCompareOperator() {
    const Token& t = Peek();
    if (t.kind == TokenKind::kOp) {
      static const std::pair<std::string_view, CompareOperator> kOps[] = {
          {"==", CompareOperator::kEq},  {"!=", CompareOperator::kNotEq},
          {"<", CompareOperator::kLt},   {"<=", CompareOperator::kLtE},
          {">", CompareOperator::kGt},   {">=", CompareOperator::kGtE},
      };
      for (const auto& [text, op] : kOps) {
        if (t.text == text) {
          Next();
          return op;
        }
      }
      return std::nullopt;
    }
    if (t.IsName("in")) {
      Next();
      return CompareOperator::kIn;
    }
    if (t.IsName("not") && Peek(1).IsName("in")) {
      Next();
      Next();
      return CompareOperator::kNotIn;
    }
    if (t.IsName("is")) {
      Next();
      if (AcceptKeyword("not")) return CompareOperator::kIsNot;
      return CompareOperator::kIs;
    }
    return std::nullopt;
  }

  ExprPtr ParseComparison() {
    SourceLoc loc = Peek().loc;
    ExprPtr left = ParseBitwiseOr();
    Compare node;
    while (auto op = AcceptCompareOperator()) {
      node.ops.push_back(*op);
      node.comparators.push_back(ParseBitwiseOr());
    }
    if (node.ops.empty()) return left;
    node.left = std::move(left);
    return MakeExpr(std::move(node), loc);
  }

  template <typename Next_>
  ExprPtr ParseLeftAssoc(
      Next_ next,
      std::initializer_list<std::pair<std::string_view, BinaryOperator>> ops) {
    SourceLoc loc = Peek().loc;
    ExprPtr left = (this->*next)();
    while (true) {
      std::optional<BinaryOperator> found;
      if (Peek().kind == TokenKind::kOp) {
        for (const auto& [text, op] : ops) {
          if (Peek().text == text) found = op;
        }
      }
      if (!found) return left;
      Next();
      ExprPtr right = (this->*next)();
      left = MakeExpr(BinOp{std::move(left), *found, std::move(right)}, loc);
    }
  }

  ExprPtr ParseBitwiseOr() {
    return ParseLeftAssoc(&Parser::ParseBitwiseXor,
                          {{"|", BinaryOperator::kBitOr}});
  }
  ExprPtr ParseBitwiseXor() {
    return ParseLeftAssoc(&Parser::ParseBitwiseAnd,
                          {{"^", BinaryOperator::kBitXor}});
  }
  ExprPtr ParseBitwiseAnd() {
    return ParseLeftAssoc(&Parser::ParseShift, {{"&", BinaryOperator::kBitAnd}});
  }
  ExprPtr ParseShift() {
    return ParseLeftAssoc(
        &Parser::ParseSum,
        {{"<<", BinaryOperator::kLShift}, {">>", BinaryOperator::kRShift}});
  }
  ExprPtr ParseSum() {
    return ParseLeftAssoc(&Parser::ParseTerm, {{"+", BinaryOperator::kAdd},
                                               {"-", BinaryOperator::kSub}});
  }
  ExprPtr ParseTerm() {
    return ParseLeftAssoc(&Parser::ParseFactor,
                          {{"*", BinaryOperator::kMult},
                           {"/", BinaryOperator::kDiv},
                           {"//", BinaryOperator::kFloorDiv},
                           {"%", BinaryOperator::kMod},
                           {"@", BinaryOperator::kMatMult}});
  }

  ExprPtr ParseFactor() {
    SourceLoc loc = Peek().loc;
    std::optional<UnaryOperator> op;
    if (AtOp("+")) op = UnaryOperator::kUAdd;
    if (AtOp("-")) op = UnaryOperator::kUSub;
    if (AtOp("~")) op = UnaryOperator::kInvert;
    if (op) {
      Next();
      return MakeExpr(UnaryOp{*op, ParseFactor()}, loc);
    }
    return ParsePower();
  }

  ExprPtr ParsePower() {
    SourceLoc loc = Peek().loc;
    ExprPtr base = ParseAwaitPrimary();
    if (AcceptOp("**")) {
      ExprPtr exponent = ParseFactor();
      return MakeExpr(
          BinOp{std::move(base), BinaryOperator::kPow, std::move(exponent)},
          loc);
    }
    return base;
  }

  ExprPtr ParseAwaitPrimary() {
    if (AtKeyword("await")) {
      SourceLoc loc = Next().loc;
      return MakeExpr(Await{ParsePrimary()}, loc);
    }
    return ParsePrimary();
  }

  ExprPtr ParsePrimary() {
    SourceLoc loc = Peek().loc;
    ExprPtr e = ParseAtom();
    while (true) {
      if (AcceptOp(".")) {
        e = MakeExpr(Attribute{std::move(e), ExpectIdentifier(),
                               ExprContext::kLoad},
                     loc);
      } else if (AcceptOp("(")) {
        Call call;
        call.func = std::move(e);
        ParseCallArguments(call.args, call.keywords);
        e = MakeExpr(std::move(call), loc);
      } else if (AcceptOp("[")) {
        ExprPtr slice = ParseSlices();
        ExpectOp("]");
        e = MakeExpr(Subscript{std::move(e), std::move(slice),
                               ExprContext::kLoad},
                     loc);
      } else {
        return e;
      }
    }
  }

  ExprPtr ParseSlices() {
    SourceLoc loc = Peek().loc;
    ExprPtr first = ParseSlice();
    if (!AtOp(",")) return first;
    Tuple tuple;
    tuple.elts.push_back(std::move(first));
    while (AcceptOp(",")) {
      if (AtOp("]")) break;
      tuple.elts.push_back(ParseSlice());
    }
    return MakeExpr(std::move(tuple), loc);
  }

  ExprPtr ParseSlice() {
    SourceLoc loc = Peek().loc;
    ExprPtr lower;
    if (!AtOp(":")) {
      lower = ParseNamedExpression();
      if (!AtOp(":")) return lower;
    }
    Next();  // ':'
    Slice s;
    s.lower = std::move(lower);
    if (!AtOp(":") && !AtOp("]") && !AtOp(",")) s.upper = ParseExpression();
    if (AcceptOp(":")) {
      if (!AtOp("]") && !AtOp(",")) s.step = ParseExpression();
    }
    return MakeExpr(std::move(s), loc);
  }

  std::vector<Comprehension> ParseComprehensionClauses() {
    std::vector<Comprehension> gens;
    while (AtKeyword("for") || (AtKeyword("async") && Peek(1).IsName("for"))) {
      Comprehension c;
      c.is_async = AcceptKeyword("async");
      ExpectKeyword("for");
      c.target = ParseTargetList();
      ExpectKeyword("in");
      c.iter = ParseDisjunction();
      while (AcceptKeyword("if")) c.ifs.push_back(ParseDisjunction());
      gens.push_back(std::move(c));
    }
    return gens;
  }

  ExprPtr ParseTargetElement() {
    if (AtOp("*")) {
      SourceLoc loc = Next().loc;
      return MakeExpr(Starred{ParseTargetElement(), ExprContext::kStore}, loc);
    }
    return ParseBitwiseOr();
  }

  ExprPtr ParseTargetList() {
    SourceLoc loc = Peek().loc;
    ExprPtr first = ParseTargetElement();
    if (!AtOp(",")) {
      SetContext(*first, ExprContext::kStore);
      return first;
    }
    Tuple tuple;
    tuple.elts.push_back(std::move(first));
    while (AcceptOp(",")) {
      if (!CanStartExpression(Peek())) break;
      tuple.elts.push_back(ParseTargetElement());
    }
    ExprPtr e = MakeExpr(std::move(tuple), loc);
    SetContext(*e, ExprContext::kStore);
    return e;
  }

  ExprPtr ParseStrings() {
    SourceLoc loc = Peek().loc;
    Constant c{ConstantKind::kString, {}};
    bool any_bytes = false;
    bool any_text = false;
    while (At(TokenKind::kString)) {
      const Token& tok = Next();
      size_t quote = tok.text.find_first_of("'\"");
      std::string prefix = tok.text.substr(0, quote);
      bool is_bytes = prefix.find_first_of("bB") != std::string::npos;
      (is_bytes ? any_bytes : any_text) = true;
      if (prefix.find_first_of("fF") != std::string::npos) {
        ValidateFString(tok);
      }
      c.pieces.push_back(tok.text);
    }
    if (any_bytes && any_text) {
      FailAt("cannot mix bytes and nonbytes literals", loc);
    }
    if (any_bytes) c.kind = ConstantKind::kBytes;
    return MakeExpr(std::move(c), loc);
  }

  void ValidateFString(const Token& tok);

  ExprPtr ParseAtom() {
    const Token& t = Peek();
    SourceLoc loc = t.loc;
    switch (t.kind) {
      case TokenKind::kNumber:
        Next();
        return MakeExpr(Constant{ConstantKind::kNumber, {t.text}}, loc);
      case TokenKind::kString:
        return ParseStrings();
      case TokenKind::kName: {
        if (t.text == "True" || t.text == "False" || t.text == "None") {
          Next();
          ConstantKind kind = t.text == "True"    ? ConstantKind::kTrue
                              : t.text == "False" ? ConstantKind::kFalse
                                                  : ConstantKind::kNone;
          return MakeExpr(Constant{kind, {}}, loc);
        }
        if (IsKeyword(t.text)) Fail("invalid syntax");
        Next();
        return MakeExpr(Name{t.text, ExprContext::kLoad}, loc);
      }
      case TokenKind::kOp:
        break;
      default:
        Fail("invalid syntax");
    }
    if (t.text == "...") {
      Next();
      return MakeExpr(Constant{ConstantKind::kEllipsis, {}}, loc);
    }
    if (t.text == "(") return ParseParenthesized();
    if (t.text == "[") return ParseListDisplay();
    if (t.text == "{") return ParseBraceDisplay();
    Fail("invalid syntax");
  }

  ExprPtr ParseParenthesized() {
    SourceLoc loc = Next().loc;
    if (AcceptOp(")")) return MakeExpr(Tuple{}, loc);
    if (AtKeyword("yield")) {
      ExprPtr y = ParseYield();
      ExpectOp(")");
      y->parenthesized = true;
      return y;
    }
    ExprPtr first = ParseStarNamedExpression();
    if (AtKeyword("for") || (AtKeyword("async") && Peek(1).IsName("for"))) {
      if (first->Is<Starred>()) {
        FailAt("iterable unpacking cannot be used in comprehension",
               first->loc);
      }
      auto gens = ParseComprehensionClauses();
      ExpectOp(")");
      ExprPtr g =
          MakeExpr(GeneratorExp{std::move(first), std::move(gens)}, loc);
      g->parenthesized = true;
      return g;
    }
    if (AcceptOp(")")) {
      if (first->Is<Starred>()) {
        FailAt("cannot use starred expression here", first->loc);
      }
      first->parenthesized = true;
      return first;
    }
    if (!AtOp(",")) Fail("invalid syntax");
    Tuple tuple;
    tuple.elts.push_back(std::move(first));
    while (AcceptOp(",")) {
      if (AtOp(")")) break;
      tuple.elts.push_back(ParseStarNamedExpression());
    }
    ExpectOp(")");
    ExprPtr e = MakeExpr(std::move(tuple), loc);
    e->parenthesized = true;
    return e;
  }

  ExprPtr ParseListDisplay() {
    SourceLoc loc = Next().loc;
    if (AcceptOp("]")) return MakeExpr(List{}, loc);
    ExprPtr first = ParseStarNamedExpression();
    if (AtKeyword("for") || (AtKeyword("async") && Peek(1).IsName("for"))) {
      if (first->Is<Starred>()) {
        FailAt("iterable unpacking cannot be used in comprehension",
               first->loc);
      }
      auto gens = ParseComprehensionClauses();
      ExpectOp("]");
      return MakeExpr(ListComp{std::move(first), std::move(gens)}, loc);
    }
    List list;
    list.elts.push_back(std::move(first));
    while (AcceptOp(",")) {
      if (AtOp("]")) break;
      list.elts.push_back(ParseStarNamedExpression());
    }
    ExpectOp("]");
    return MakeExpr(std::move(list), loc);
  }

  ExprPtr ParseBraceDisplay() {
    SourceLoc loc = Next().loc;
    if (AcceptOp("}")) return MakeExpr(Dict{}, loc);
    if (AtOp("**")) return ParseDictRest(loc, nullptr, nullptr);
    ExprPtr first = ParseStarNamedExpression();
    if (AcceptOp(":")) {
      if (first->Is<Starred>()) Fail("invalid syntax");
      ExprPtr value = ParseExpression();
      if (AtKeyword("for") || (AtKeyword("async") && Peek(1).IsName("for"))) {
        auto gens = ParseComprehensionClauses();
        ExpectOp("}");
        return MakeExpr(
            DictComp{std::move(first), std::move(value), std::move(gens)}, loc);
      }
      return ParseDictRest(loc, std::move(first), std::move(value));
    }
    if (AtKeyword("for") || (AtKeyword("async") && Peek(1).IsName("for"))) {
      if (first->Is<Starred>()) {
        FailAt("iterable unpacking cannot be used in comprehension",
               first->loc);
      }
      auto gens = ParseComprehensionClauses();
      ExpectOp("}");
      return MakeExpr(SetComp{std::move(first), std::move(gens)}, loc);
    }
    Set set;
    set.elts.push_back(std::move(first));
    while (AcceptOp(",")) {
      if (AtOp("}")) break;
      set.elts.push_back(ParseStarNamedExpression());
    }
    ExpectOp("}");
    return MakeExpr(std::move(set), loc);
  }

  // Continues a dict display after an optional first key/value pair.
  ExprPtr ParseDictRest(SourceLoc loc, ExprPtr key, ExprPtr value) {
    Dict dict;
    bool need_item = true;
    if (value) {
      dict.keys.push_back(std::move(key));
      dict.values.push_back(std::move(value));
      need_item = AcceptOp(",");
    }
    while (need_item && !AtOp("}")) {
      if (AcceptOp("**")) {
        dict.keys.push_back(nullptr);
        dict.values.push_back(ParseBitwiseOr());
      } else {
        dict.keys.push_back(ParseExpression());
        ExpectOp(":");
        dict.values.push_back(ParseExpression());
      }
      need_item = AcceptOp(",");
    }
    ExpectOp("}");
    return MakeExpr(std::move(dict), loc);
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
};

// Validates the replacement fields of one f-string token: brace balance,
// conversion characters and that every embedded expression parses.
void Parser::ValidateFString(const Token& tok) {
  const std::string& text = tok.text;
  size_t quote = text.find_first_of("'\"");
  char q = text[quote];
  bool raw = text.substr(0, quote).find_first_of("rR") != std::string::npos;
  size_t quote_len =
      text.size() >= quote + 6 && text[quote + 1] == q && text[quote + 2] == q
          ? 3
          : 1;
  std::string_view body(text.data() + quote + quote_len,
                        text.size() - quote - 2 * quote_len);
  auto fail = [&](const std::string& msg) {
    throw SyntaxError("f-string: " + msg, tok.loc);
  };

  // Scans a replacement field starting after `{`; returns the index just
  // past its closing `}`.
  std::function<size_t(std::string_view, size_t, int)> field;
  std::function<void(std::string_view, int)> literal;

  literal = [&](std::string_view s, int depth) {
    size_t i = 0;
    while (i < s.size()) {
      char c = s[i];
      if (c == '\\' && !raw && i + 1 < s.size()) {
        if (s[i + 1] == 'N' && i + 2 < s.size() && s[i + 2] == '{') {
          size_t close = s.find('}', i + 3);
          if (close == std::string_view::npos) fail("malformed \\N character escape");
          i = close + 1;
        } else {
          i += s[i + 1] == '\\' ? 2 : 1;
        }
        continue;
      }
      if (c == '{') {
        if (depth == 0 && i + 1 < s.size() && s[i + 1] == '{') {
          i += 2;
          continue;
        }
        i = field(s, i + 1, depth);
        continue;
      }
      if (c == '}') {
        if (depth == 0 && i + 1 < s.size() && s[i + 1] == '}') {
          i += 2;
          continue;
        }
        fail("single '}' is not allowed");
      }
      ++i;
    }
  };

  field = [&](std::string_view s, size_t start, int depth) -> size_t {
    if (depth >= 2) fail("expressions nested too deeply");
    size_t i = start;
    std::vector<char> nesting;
    while (i < s.size()) {
      char c = s[i];
      if (c == '\\') fail("expression part cannot include a backslash");
      if (c == '#') fail("expression part cannot include '#'");
      if (c == '\'' || c == '"') {
        if (c == q && quote_len == 1) fail("invalid syntax");
        size_t close = s.find(c, i + 1);
        if (close == std::string_view::npos) fail("unterminated string");
        i = close + 1;
        continue;
      }
      if (c == '(' || c == '[' || c == '{') {
        nesting.push_back(c);
        ++i;
        continue;
      }
      if (c == ')' || c == ']' || (c == '}' && !nesting.empty())) {
        if (nesting.empty()) fail(std::string("unmatched '") + c + "'");
        char open = nesting.back();
        char want = open == '(' ? ')' : open == '[' ? ']' : '}';
        if (c != want) {
          fail(std::string("closing parenthesis '") + c +
               "' does not match opening parenthesis '" + open + "'");
        }
        nesting.pop_back();
        ++i;
        continue;
      }
      if (nesting.empty()) {
        bool at_bang = c == '!' && !(i + 1 < s.size() && s[i + 1] == '=');
        bool at_eq = c == '=' && !(i + 1 < s.size() && s[i + 1] == '=') &&
                     i > start && std::string_view("=!<>").find(s[i - 1]) ==
                                      std::string_view::npos;
        if (c == '}' || c == ':' || at_bang || at_eq) break;
      }
      ++i;
    }
    if (i >= s.size()) {
      if (!nesting.empty()) fail(std::string("unmatched '") + nesting.back() + "'");
      fail("expecting '}'");
    }
    std::string_view expr_text = s.substr(start, i - start);
    if (expr_text.find_first_not_of(" \t\n") == std::string_view::npos) {
      fail("empty expression not allowed");
    }
    try {
      std::string wrapped = "(" + std::string(expr_text) + ")";
      Parser inner(Tokenize(wrapped));
      inner.ParseStandaloneExpression();
    } catch (const SyntaxError& e) {
      fail("invalid syntax");
    }
    if (s[i] == '=') {
      ++i;
      while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n')) ++i;
    }
    if (i < s.size() && s[i] == '!') {
      ++i;
      if (i >= s.size() ||
          std::string_view("rsa").find(s[i]) == std::string_view::npos) {
        fail("invalid conversion character: expected 's', 'r', or 'a'");
      }
      ++i;
    }
    if (i < s.size() && s[i] == ':') {
      ++i;
      size_t spec_start = i;
      int spec_depth = 0;
      while (i < s.size()) {
        if (s[i] == '{') {
          i = field(s, i + 1, depth + 1);
          continue;
        }
        if (s[i] == '}') {
          if (spec_depth == 0) break;
          --spec_depth;
        }
        ++i;
      }
      (void)spec_start;
    }
    if (i >= s.size() || s[i] != '}') fail("expecting '}'");
    return i + 1;
  };

  literal(body, 0);
}

}  // namespace

Module Parse(std::string_view source) {
  Parser parser(Tokenize(source));
  return parser.ParseModule();
}

ExprPtr ParseExpression(std::string_view source) {
  Parser parser(Tokenize(source));
  return parser.ParseStandaloneExpression();
}

}  // namespace plum::py
