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

#ifndef PLUM_PY_AST_H_
#define PLUM_PY_AST_H_

// Syntax tree for the Python subset accepted by the candidate language
// parser. The node set mirrors the shapes of CPython's `ast` module (3.10)
// closely enough that a tree dump can be compared structurally, but literal
// values are kept as their source spelling: numbers and strings are never
// evaluated.

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace plum::py {

struct SourceLoc {
  int line = 0;  // 1-based; 0 means "not from the input"
  int col = 0;   // 0-based byte offset

  bool valid() const { return line > 0; }
  friend bool operator==(const SourceLoc&, const SourceLoc&) = default;
};

struct Expr;
struct Stmt;
struct Pattern;
using ExprPtr = std::unique_ptr<Expr>;
using StmtPtr = std::unique_ptr<Stmt>;
using PatternPtr = std::unique_ptr<Pattern>;
using ExprList = std::vector<ExprPtr>;
using StmtList = std::vector<StmtPtr>;
using PatternList = std::vector<PatternPtr>;

enum class ExprContext { kLoad, kStore, kDel };

enum class BinaryOperator {
  kAdd,
  kSub,
  kMult,
  kMatMult,
  kDiv,
  kMod,
  kPow,
  kLShift,
  kRShift,
  kBitOr,
  kBitXor,
  kBitAnd,
  kFloorDiv,
};

enum class UnaryOperator { kInvert, kNot, kUAdd, kUSub };

enum class BoolOperator { kAnd, kOr };

enum class CompareOperator {
  kEq,
  kNotEq,
  kLt,
  kLtE,
  kGt,
  kGtE,
  kIs,
  kIsNot,
  kIn,
  kNotIn,
};

enum class ConstantKind {
  kNone,
  kTrue,
  kFalse,
  kEllipsis,
  kNumber,
  kString,  // str literal, possibly implicitly concatenated, possibly f-string
  kBytes,
};

std::string_view Spelling(BinaryOperator op);
std::string_view Spelling(UnaryOperator op);
std::string_view Spelling(BoolOperator op);
std::string_view Spelling(CompareOperator op);

struct Arg {
  std::string name;
  ExprPtr annotation;  // may be null
  SourceLoc loc;
};

struct Arguments {
  std::vector<Arg> posonly;
  std::vector<Arg> args;
  std::optional<Arg> vararg;
  std::vector<Arg> kwonly;
  ExprList kw_defaults;  // parallel to kwonly; null entries mean no default
  std::optional<Arg> kwarg;
  ExprList defaults;  // right-aligned against posonly + args

  size_t PositionalCount() const { return posonly.size() + args.size(); }
};

struct Keyword {
  std::optional<std::string> arg;  // nullopt for **value
  ExprPtr value;
  SourceLoc loc;
};

struct Comprehension {
  ExprPtr target;
  ExprPtr iter;
  ExprList ifs;
  bool is_async = false;
};

namespace expr {

struct BoolOp {
  BoolOperator op;
  ExprList values;
};
struct NamedExpr {
  ExprPtr target;
  ExprPtr value;
};
struct BinOp {
  ExprPtr left;
  BinaryOperator op;
  ExprPtr right;
};
struct UnaryOp {
  UnaryOperator op;
  ExprPtr operand;
};
struct Lambda {
  std::unique_ptr<Arguments> args;
  ExprPtr body;
};
struct IfExp {
  ExprPtr test;
  ExprPtr body;
  ExprPtr orelse;
};
struct Dict {
  ExprList keys;  // null key means `**value`
  ExprList values;
};
struct Set {
  ExprList elts;
};
struct ListComp {
  ExprPtr elt;
  std::vector<Comprehension> generators;
};
struct SetComp {
  ExprPtr elt;
  std::vector<Comprehension> generators;
};
struct DictComp {
  ExprPtr key;
  ExprPtr value;
  std::vector<Comprehension> generators;
};
struct GeneratorExp {
  ExprPtr elt;
  std::vector<Comprehension> generators;
};
struct Await {
  ExprPtr value;
};
struct Yield {
  ExprPtr value;  // may be null
};
struct YieldFrom {
  ExprPtr value;
};
struct Compare {
  ExprPtr left;
  std::vector<CompareOperator> ops;
  ExprList comparators;
};
struct Call {
  ExprPtr func;
  ExprList args;
  std::vector<Keyword> keywords;
};
struct Constant {
  ConstantKind kind;
  // Source spelling of each literal token; several entries for implicitly
  // concatenated strings. Empty for None/True/False/Ellipsis.
  std::vector<std::string> pieces;
};
struct Attribute {
  ExprPtr value;
  std::string attr;
  ExprContext ctx = ExprContext::kLoad;
};
struct Subscript {
  ExprPtr value;
  ExprPtr slice;
  ExprContext ctx = ExprContext::kLoad;
};
struct Starred {
  ExprPtr value;
  ExprContext ctx = ExprContext::kLoad;
};
struct Name {
  std::string id;
  ExprContext ctx = ExprContext::kLoad;
};
struct List {
  ExprList elts;
  ExprContext ctx = ExprContext::kLoad;
};
struct Tuple {
  ExprList elts;
  ExprContext ctx = ExprContext::kLoad;
};
struct Slice {
  ExprPtr lower;  // each may be null
  ExprPtr upper;
  ExprPtr step;
};

}  // namespace expr

struct Expr {
  using Node =
      std::variant<expr::BoolOp, expr::NamedExpr, expr::BinOp, expr::UnaryOp,
                   expr::Lambda, expr::IfExp, expr::Dict, expr::Set,
                   expr::ListComp, expr::SetComp, expr::DictComp,
                   expr::GeneratorExp, expr::Await, expr::Yield,
                   expr::YieldFrom, expr::Compare, expr::Call, expr::Constant,
                   expr::Attribute, expr::Subscript, expr::Starred, expr::Name,
                   expr::List, expr::Tuple, expr::Slice>;

  Node node;
  SourceLoc loc;
  // Written inside a redundant pair of parentheses in the source. Only
  // consulted where the language distinguishes it (annotated targets).
  bool parenthesized = false;

  template <typename T>
  T* As() {
    return std::get_if<T>(&node);
  }
  template <typename T>
  const T* As() const {
    return std::get_if<T>(&node);
  }
  template <typename T>
  bool Is() const {
    return std::holds_alternative<T>(node);
  }
};

template <typename T>
ExprPtr MakeExpr(T node, SourceLoc loc = {}) {
  auto e = std::make_unique<Expr>(Expr{std::move(node), loc});
  return e;
}

namespace pattern {

struct MatchValue {
  ExprPtr value;
};
struct MatchSingleton {
  ConstantKind value;  // kNone, kTrue or kFalse
};
struct MatchSequence {
  PatternList patterns;
};
struct MatchMapping {
  ExprList keys;
  PatternList patterns;
  std::optional<std::string> rest;
};
struct MatchClass {
  ExprPtr cls;
  PatternList patterns;
  std::vector<std::string> kwd_attrs;
  PatternList kwd_patterns;
};
struct MatchStar {
  std::optional<std::string> name;  // nullopt for `*_`
};
struct MatchAs {
  PatternPtr pattern;               // may be null
  std::optional<std::string> name;  // nullopt for `_`
};
struct MatchOr {
  PatternList patterns;
};

}  // namespace pattern

struct Pattern {
  using Node =
      std::variant<pattern::MatchValue, pattern::MatchSingleton,
                   pattern::MatchSequence, pattern::MatchMapping,
                   pattern::MatchClass, pattern::MatchStar, pattern::MatchAs,
                   pattern::MatchOr>;
  Node node;
  SourceLoc loc;
};

struct Alias {
  std::string name;  // dotted for `import a.b`
  std::optional<std::string> asname;
};

struct WithItem {
  ExprPtr context_expr;
  ExprPtr optional_vars;  // may be null
};

struct ExceptHandler {
  ExprPtr type;                     // may be null
  std::optional<std::string> name;  // `as name`
  StmtList body;
  SourceLoc loc;
};

struct MatchCase {
  PatternPtr pattern;
  ExprPtr guard;  // may be null
  StmtList body;
};

namespace stmt {

struct FunctionDef {
  std::string name;
  std::unique_ptr<Arguments> args;
  StmtList body;
  ExprList decorators;
  ExprPtr returns;  // may be null
  bool is_async = false;
};
struct ClassDef {
  std::string name;
  ExprList bases;
  std::vector<Keyword> keywords;
  StmtList body;
  ExprList decorators;
};
struct Return {
  ExprPtr value;  // may be null
};
struct Delete {
  ExprList targets;
};
struct Assign {
  ExprList targets;
  ExprPtr value;
};
struct AugAssign {
  ExprPtr target;
  BinaryOperator op;
  ExprPtr value;
};
struct AnnAssign {
  ExprPtr target;
  ExprPtr annotation;
  ExprPtr value;  // may be null
  bool simple = true;
};
struct For {
  ExprPtr target;
  ExprPtr iter;
  StmtList body;
  StmtList orelse;
  bool is_async = false;
};
struct While {
  ExprPtr test;
  StmtList body;
  StmtList orelse;
};
struct If {
  ExprPtr test;
  StmtList body;
  StmtList orelse;
};
struct With {
  std::vector<WithItem> items;
  StmtList body;
  bool is_async = false;
};
struct Match {
  ExprPtr subject;
  std::vector<MatchCase> cases;
};
struct Raise {
  ExprPtr exc;    // may be null
  ExprPtr cause;  // may be null
};
struct Try {
  StmtList body;
  std::vector<ExceptHandler> handlers;
  StmtList orelse;
  StmtList finalbody;
};
struct Assert {
  ExprPtr test;
  ExprPtr msg;  // may be null
};
struct Import {
  std::vector<Alias> names;
};
struct ImportFrom {
  std::string module;  // may be empty for `from . import x`
  std::vector<Alias> names;
  int level = 0;
};
struct Global {
  std::vector<std::string> names;
};
struct Nonlocal {
  std::vector<std::string> names;
};
struct ExprStmt {
  ExprPtr value;
};
struct Pass {};
struct Break {};
struct Continue {};

}  // namespace stmt

struct Stmt {
  using Node =
      std::variant<stmt::FunctionDef, stmt::ClassDef, stmt::Return,
                   stmt::Delete, stmt::Assign, stmt::AugAssign,
                   stmt::AnnAssign, stmt::For, stmt::While, stmt::If,
                   stmt::With, stmt::Match, stmt::Raise, stmt::Try,
                   stmt::Assert, stmt::Import, stmt::ImportFrom, stmt::Global,
                   stmt::Nonlocal, stmt::ExprStmt, stmt::Pass, stmt::Break,
                   stmt::Continue>;

  Node node;
  SourceLoc loc;

  template <typename T>
  T* As() {
    return std::get_if<T>(&node);
  }
  template <typename T>
  const T* As() const {
    return std::get_if<T>(&node);
  }
};

template <typename T>
StmtPtr MakeStmt(T node, SourceLoc loc = {}) {
  return std::make_unique<Stmt>(Stmt{std::move(node), loc});
}

struct Module {
  StmtList body;
};

// Structural dump that ignores locations and redundant parentheses. Two
// trees are "normalized-equal" iff their dumps are equal.
std::string Dump(const Module& module);
std::string Dump(const Expr& expr);

// Locations of every statement and expression that came from the input,
// in pre-order.
std::vector<SourceLoc> CollectLocations(const Module& module);

}  // namespace plum::py

#endif  // PLUM_PY_AST_H_
