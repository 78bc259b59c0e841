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

#include "plum/py/unparser.h"

#include <string>
#include <type_traits>

namespace plum::py {
namespace {

using namespace expr;  // NOLINT(build/namespaces)

enum Prec {
  kNamedExpr,
  kTuple,
  kYield,
  kTest,
  kOr,
  kAnd,
  kNot,
  kCmp,
  kBor,
  kBxor,
  kBand,
  kShift,
  kArith,
  kTerm,
  kFactor,
  kPower,
  kAwait,
  kAtom,
};

Prec BinaryPrec(BinaryOperator op) {
  switch (op) {
    case BinaryOperator::kBitOr:
      return kBor;
    case BinaryOperator::kBitXor:
      return kBxor;
    case BinaryOperator::kBitAnd:
      return kBand;
    case BinaryOperator::kLShift:
    case BinaryOperator::kRShift:
      return kShift;
    case BinaryOperator::kAdd:
    case BinaryOperator::kSub:
      return kArith;
    case BinaryOperator::kPow:
      return kPower;
    default:
      return kTerm;
  }
}

Prec PrecOf(const Expr& e) {
  return std::visit(
      [](const auto& n) -> Prec {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, NamedExpr>) return kNamedExpr;
        if constexpr (std::is_same_v<T, Tuple>) return kAtom;
        if constexpr (std::is_same_v<T, Yield> || std::is_same_v<T, YieldFrom>)
          return kYield;
        if constexpr (std::is_same_v<T, IfExp> || std::is_same_v<T, Lambda>)
          return kTest;
        if constexpr (std::is_same_v<T, BoolOp>)
          return n.op == BoolOperator::kOr ? kOr : kAnd;
        if constexpr (std::is_same_v<T, UnaryOp>)
          return n.op == UnaryOperator::kNot ? kNot : kFactor;
        if constexpr (std::is_same_v<T, Compare>) return kCmp;
        if constexpr (std::is_same_v<T, BinOp>) return BinaryPrec(n.op);
        if constexpr (std::is_same_v<T, Await>) return kAwait;
        return kAtom;
      },
      e.node);
}

class Unparser {
 public:
  std::string& out() { return out_; }

  void Body(const StmtList& body) {
    ++indent_;
    if (body.empty()) {
      Line();
      out_ += "pass";
    }
    for (const auto& s : body) Statement(*s);
    --indent_;
  }

  void TopLevel(const StmtList& body) {
    for (const auto& s : body) Statement(*s);
  }

  void Expression(const Expr& e, Prec want) {
    bool paren = PrecOf(e) < want;
    if (paren) out_ += "(";
    std::visit([this](const auto& n) { Node(n); }, e.node);
    if (paren) out_ += ")";
  }

 private:
  void Line() {
    if (!out_.empty()) out_ += "\n";
    out_.append(4 * indent_, ' ');
  }

  void Statement(const Stmt& s) {
    std::visit([this](const auto& n) { Node(n); }, s.node);
  }

  template <typename List>
  void Join(const List& items, Prec want, std::string_view sep = ", ") {
    for (size_t i = 0; i < items.size(); ++i) {
      if (i) out_ += sep;
      Expression(*items[i], want);
    }
  }

  void Keywords(const std::vector<Keyword>& keywords, bool leading_comma) {
    for (size_t i = 0; i < keywords.size(); ++i) {
      if (i || leading_comma) out_ += ", ";
      if (keywords[i].arg) {
        out_ += *keywords[i].arg;
        out_ += "=";
      } else {
        out_ += "**";
      }
      Expression(*keywords[i].value, kTest);
    }
  }

  void Arguments(const py::Arguments& a) {
    bool first = true;
    auto sep = [&]() {
      if (!first) out_ += ", ";
      first = false;
    };
    auto arg = [&](const Arg& x) {
      out_ += x.name;
      if (x.annotation) {
        out_ += ": ";
        Expression(*x.annotation, kTest);
      }
    };
    size_t positional = a.PositionalCount();
    size_t first_default = positional - a.defaults.size();
    for (size_t i = 0; i < positional; ++i) {
      sep();
      const Arg& x = i < a.posonly.size() ? a.posonly[i]
                                          : a.args[i - a.posonly.size()];
      arg(x);
      if (i >= first_default) {
        out_ += x.annotation ? " = " : "=";
        Expression(*a.defaults[i - first_default], kTest);
      }
      if (i + 1 == a.posonly.size()) {
        out_ += ", /";
      }
    }
    if (a.vararg || !a.kwonly.empty()) {
      sep();
      out_ += "*";
      if (a.vararg) arg(*a.vararg);
    }
    for (size_t i = 0; i < a.kwonly.size(); ++i) {
      sep();
      arg(a.kwonly[i]);
      if (a.kw_defaults[i]) {
        out_ += a.kwonly[i].annotation ? " = " : "=";
        Expression(*a.kw_defaults[i], kTest);
      }
    }
    if (a.kwarg) {
      sep();
      out_ += "**";
      arg(*a.kwarg);
    }
  }

  void Generators(const std::vector<Comprehension>& gens) {
    for (const auto& g : gens) {
      out_ += g.is_async ? " async for " : " for ";
      Expression(*g.target, kTuple);
      out_ += " in ";
      Expression(*g.iter, kOr);
      for (const auto& cond : g.ifs) {
        out_ += " if ";
        Expression(*cond, kOr);
      }
    }
  }

  // ---- expressions ---------------------------------------------------------

  void Node(const BoolOp& n) {
    Prec self = n.op == BoolOperator::kOr ? kOr : kAnd;
    std::string sep = n.op == BoolOperator::kOr ? " or " : " and ";
    Join(n.values, static_cast<Prec>(self + 1), sep);
  }
  void Node(const NamedExpr& n) {
    Expression(*n.target, kAtom);
    out_ += " := ";
    Expression(*n.value, kTest);
  }
  void Node(const BinOp& n) {
    Prec self = BinaryPrec(n.op);
    bool right_assoc = n.op == BinaryOperator::kPow;
    Expression(*n.left, right_assoc ? static_cast<Prec>(self + 1) : self);
    out_ += " ";
    out_ += Spelling(n.op);
    out_ += " ";
    Expression(*n.right, right_assoc ? self : static_cast<Prec>(self + 1));
  }
  void Node(const UnaryOp& n) {
    if (n.op == UnaryOperator::kNot) {
      out_ += "not ";
      Expression(*n.operand, kAwait);
      return;
    }
    out_ += Spelling(n.op);
    Expression(*n.operand, kFactor);
  }
  void Node(const Lambda& n) {
    out_ += "lambda";
    std::string saved;
    saved.swap(out_);
    Arguments(*n.args);
    saved.swap(out_);
    if (!saved.empty()) {
      out_ += " ";
      out_ += saved;
    }
    out_ += ": ";
    Expression(*n.body, kTest);
  }
  void Node(const IfExp& n) {
    Expression(*n.body, kOr);
    out_ += " if ";
    Expression(*n.test, kOr);
    out_ += " else ";
    Expression(*n.orelse, kTest);
  }
  void Node(const Dict& n) {
    out_ += "{";
    for (size_t i = 0; i < n.keys.size(); ++i) {
      if (i) out_ += ", ";
      if (n.keys[i]) {
        Expression(*n.keys[i], kTest);
        out_ += ": ";
        Expression(*n.values[i], kTest);
      } else {
        out_ += "**";
        Expression(*n.values[i], kBor);
      }
    }
    out_ += "}";
  }
  void Node(const Set& n) {
    out_ += "{";
    Join(n.elts, kTest);
    out_ += "}";
  }
  void Node(const ListComp& n) {
    out_ += "[";
    Expression(*n.elt, kTest);
    Generators(n.generators);
    out_ += "]";
  }
  void Node(const SetComp& n) {
    out_ += "{";
    Expression(*n.elt, kTest);
    Generators(n.generators);
    out_ += "}";
  }
  void Node(const DictComp& n) {
    out_ += "{";
    Expression(*n.key, kTest);
    out_ += ": ";
    Expression(*n.value, kTest);
    Generators(n.generators);
    out_ += "}";
  }
  void Node(const GeneratorExp& n) {
    out_ += "(";
    Expression(*n.elt, kTest);
    Generators(n.generators);
    out_ += ")";
  }
  void Node(const Await& n) {
    out_ += "await ";
    Expression(*n.value, kAtom);
  }
  void Node(const Yield& n) {
    out_ += "yield";
    if (n.value) {
      out_ += " ";
      Expression(*n.value, kTuple);
    }
  }
  void Node(const YieldFrom& n) {
    out_ += "yield from ";
    Expression(*n.value, kTest);
  }
  void Node(const Compare& n) {
    Expression(*n.left, kBor);
    for (size_t i = 0; i < n.ops.size(); ++i) {
      out_ += " ";
      out_ += Spelling(n.ops[i]);
      out_ += " ";
      Expression(*n.comparators[i], kBor);
    }
  }
  void Node(const Call& n) {
    Expression(*n.func, kAtom);
    out_ += "(";
    Join(n.args, kTest);
    Keywords(n.keywords, !n.args.empty());
    out_ += ")";
  }
  void Node(const Constant& n) {
    switch (n.kind) {
      case ConstantKind::kNone:
        out_ += "None";
        return;
      case ConstantKind::kTrue:
        out_ += "True";
        return;
      case ConstantKind::kFalse:
        out_ += "False";
        return;
      case ConstantKind::kEllipsis:
        out_ += "...";
        return;
      default:
        break;
    }
    for (size_t i = 0; i < n.pieces.size(); ++i) {
      if (i) out_ += " ";
      out_ += n.pieces[i];
    }
  }
  void Node(const Attribute& n) {
    const auto* c = n.value->As<Constant>();
    bool wrap = c && c->kind == ConstantKind::kNumber;
    if (wrap) out_ += "(";
    Expression(*n.value, kAtom);
    if (wrap) out_ += ")";
    out_ += ".";
    out_ += n.attr;
  }
  void Node(const Subscript& n) {
    Expression(*n.value, kAtom);
    out_ += "[";
    const auto* tuple = n.slice->As<Tuple>();
    if (tuple && !tuple->elts.empty()) {
      Join(tuple->elts, kTest);
      if (tuple->elts.size() == 1) out_ += ",";
    } else {
      Expression(*n.slice, kTest);
    }
    out_ += "]";
  }
  void Node(const Starred& n) {
    out_ += "*";
    Expression(*n.value, kBor);
  }
  void Node(const Name& n) { out_ += n.id; }
  void Node(const List& n) {
    out_ += "[";
    Join(n.elts, kTest);
    out_ += "]";
  }
  void Node(const Tuple& n) {
    out_ += "(";
    Join(n.elts, kTest);
    if (n.elts.size() == 1) out_ += ",";
    out_ += ")";
  }
  void Node(const Slice& n) {
    if (n.lower) Expression(*n.lower, kTest);
    out_ += ":";
    if (n.upper) Expression(*n.upper, kTest);
    if (n.step) {
      out_ += ":";
      Expression(*n.step, kTest);
    }
  }

  // Tuples in statement positions drop their parentheses when non-empty.
  void Bare(const Expr& e, Prec want = kTest) {
    const auto* tuple = e.As<Tuple>();
    if (tuple && !tuple->elts.empty()) {
      Join(tuple->elts, kTest);
      if (tuple->elts.size() == 1) out_ += ",";
      return;
    }
    Expression(e, want);
  }

  // ---- patterns ------------------------------------------------------------

  void PatternOut(const Pattern& p, bool closed) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, pattern::MatchValue>) {
            Expression(*n.value, kTest);
          } else if constexpr (std::is_same_v<T, pattern::MatchSingleton>) {
            out_ += n.value == ConstantKind::kNone   ? "None"
                    : n.value == ConstantKind::kTrue ? "True"
                                                     : "False";
          } else if constexpr (std::is_same_v<T, pattern::MatchSequence>) {
            out_ += "[";
            for (size_t i = 0; i < n.patterns.size(); ++i) {
              if (i) out_ += ", ";
              PatternOut(*n.patterns[i], false);
            }
            out_ += "]";
          } else if constexpr (std::is_same_v<T, pattern::MatchMapping>) {
            out_ += "{";
            for (size_t i = 0; i < n.keys.size(); ++i) {
              if (i) out_ += ", ";
              Expression(*n.keys[i], kTest);
              out_ += ": ";
              PatternOut(*n.patterns[i], false);
            }
            if (n.rest) {
              if (!n.keys.empty()) out_ += ", ";
              out_ += "**" + *n.rest;
            }
            out_ += "}";
          } else if constexpr (std::is_same_v<T, pattern::MatchClass>) {
            Expression(*n.cls, kAtom);
            out_ += "(";
            bool first = true;
            for (const auto& sub : n.patterns) {
              if (!first) out_ += ", ";
              first = false;
              PatternOut(*sub, false);
            }
            for (size_t i = 0; i < n.kwd_attrs.size(); ++i) {
              if (!first) out_ += ", ";
              first = false;
              out_ += n.kwd_attrs[i] + "=";
              PatternOut(*n.kwd_patterns[i], false);
            }
            out_ += ")";
          } else if constexpr (std::is_same_v<T, pattern::MatchStar>) {
            out_ += "*" + n.name.value_or("_");
          } else if constexpr (std::is_same_v<T, pattern::MatchAs>) {
            if (!n.pattern) {
              out_ += n.name.value_or("_");
              return;
            }
            if (closed) out_ += "(";
            PatternOut(*n.pattern, true);
            out_ += " as " + n.name.value_or("_");
            if (closed) out_ += ")";
          } else if constexpr (std::is_same_v<T, pattern::MatchOr>) {
            if (closed) out_ += "(";
            for (size_t i = 0; i < n.patterns.size(); ++i) {
              if (i) out_ += " | ";
              PatternOut(*n.patterns[i], true);
            }
            if (closed) out_ += ")";
          }
        },
        p.node);
  }

  // ---- statements ----------------------------------------------------------

  void Node(const stmt::FunctionDef& n) {
    for (const auto& d : n.decorators) {
      Line();
      out_ += "@";
      Expression(*d, kTest);
    }
    Line();
    out_ += n.is_async ? "async def " : "def ";
    out_ += n.name;
    out_ += "(";
    Arguments(*n.args);
    out_ += ")";
    if (n.returns) {
      out_ += " -> ";
      Expression(*n.returns, kTest);
    }
    out_ += ":";
    Body(n.body);
  }
  void Node(const stmt::ClassDef& n) {
    for (const auto& d : n.decorators) {
      Line();
      out_ += "@";
      Expression(*d, kTest);
    }
    Line();
    out_ += "class " + n.name;
    if (!n.bases.empty() || !n.keywords.empty()) {
      out_ += "(";
      Join(n.bases, kTest);
      Keywords(n.keywords, !n.bases.empty());
      out_ += ")";
    }
    out_ += ":";
    Body(n.body);
  }
  void Node(const stmt::Return& n) {
    Line();
    out_ += "return";
    if (n.value) {
      out_ += " ";
      Bare(*n.value);
    }
  }
  void Node(const stmt::Delete& n) {
    Line();
    out_ += "del ";
    Join(n.targets, kTest);
  }
  void Node(const stmt::Assign& n) {
    Line();
    for (const auto& t : n.targets) {
      Bare(*t);
      out_ += " = ";
    }
    Bare(*n.value, kYield);
  }
  void Node(const stmt::AugAssign& n) {
    Line();
    Expression(*n.target, kAtom);
    out_ += " ";
    out_ += Spelling(n.op);
    out_ += "= ";
    Bare(*n.value, kYield);
  }
  void Node(const stmt::AnnAssign& n) {
    Line();
    bool wrap = !n.simple && n.target->Is<Name>();
    if (wrap) out_ += "(";
    Expression(*n.target, kAtom);
    if (wrap) out_ += ")";
    out_ += ": ";
    Expression(*n.annotation, kTest);
    if (n.value) {
      out_ += " = ";
      Bare(*n.value, kYield);
    }
  }
  void Node(const stmt::For& n) {
    Line();
    out_ += n.is_async ? "async for " : "for ";
    Bare(*n.target);
    out_ += " in ";
    Bare(*n.iter);
    out_ += ":";
    Body(n.body);
    Else(n.orelse);
  }
  void Else(const StmtList& orelse) {
    if (orelse.empty()) return;
    Line();
    out_ += "else:";
    Body(orelse);
  }
  void Node(const stmt::While& n) {
    Line();
    out_ += "while ";
    Expression(*n.test, kNamedExpr);
    out_ += ":";
    Body(n.body);
    Else(n.orelse);
  }
  void Node(const stmt::If& n) { IfChain(n, "if "); }
  void IfChain(const stmt::If& n, std::string_view keyword) {
    Line();
    out_ += keyword;
    Expression(*n.test, kNamedExpr);
    out_ += ":";
    Body(n.body);
    if (n.orelse.size() == 1) {
      if (const auto* elif = n.orelse[0]->As<stmt::If>()) {
        IfChain(*elif, "elif ");
        return;
      }
    }
    Else(n.orelse);
  }
  void Node(const stmt::With& n) {
    Line();
    out_ += n.is_async ? "async with " : "with ";
    for (size_t i = 0; i < n.items.size(); ++i) {
      if (i) out_ += ", ";
      Expression(*n.items[i].context_expr, kTest);
      if (n.items[i].optional_vars) {
        out_ += " as ";
        Expression(*n.items[i].optional_vars, kTest);
      }
    }
    out_ += ":";
    Body(n.body);
  }
  void Node(const stmt::Match& n) {
    Line();
    out_ += "match ";
    Bare(*n.subject, kNamedExpr);
    out_ += ":";
    ++indent_;
    for (const auto& c : n.cases) {
      Line();
      out_ += "case ";
      PatternOut(*c.pattern, false);
      if (c.guard) {
        out_ += " if ";
        Expression(*c.guard, kNamedExpr);
      }
      out_ += ":";
      Body(c.body);
    }
    --indent_;
  }
  void Node(const stmt::Raise& n) {
    Line();
    out_ += "raise";
    if (n.exc) {
      out_ += " ";
      Expression(*n.exc, kTest);
      if (n.cause) {
        out_ += " from ";
        Expression(*n.cause, kTest);
      }
    }
  }
  void Node(const stmt::Try& n) {
    Line();
    out_ += "try:";
    Body(n.body);
    for (const auto& h : n.handlers) {
      Line();
      out_ += "except";
      if (h.type) {
        out_ += " ";
        Expression(*h.type, kTest);
        if (h.name) out_ += " as " + *h.name;
      }
      out_ += ":";
      Body(h.body);
    }
    Else(n.orelse);
    if (!n.finalbody.empty()) {
      Line();
      out_ += "finally:";
      Body(n.finalbody);
    }
  }
  void Node(const stmt::Assert& n) {
    Line();
    out_ += "assert ";
    Expression(*n.test, kTest);
    if (n.msg) {
      out_ += ", ";
      Expression(*n.msg, kTest);
    }
  }
  void Aliases(const std::vector<Alias>& names) {
    for (size_t i = 0; i < names.size(); ++i) {
      if (i) out_ += ", ";
      out_ += names[i].name;
      if (names[i].asname) out_ += " as " + *names[i].asname;
    }
  }
  void Node(const stmt::Import& n) {
    Line();
    out_ += "import ";
    Aliases(n.names);
  }
  void Node(const stmt::ImportFrom& n) {
    Line();
    out_ += "from ";
    out_.append(n.level, '.');
    out_ += n.module;
    out_ += " import ";
    Aliases(n.names);
  }
  void Names(std::string_view keyword, const std::vector<std::string>& names) {
    Line();
    out_ += keyword;
    for (size_t i = 0; i < names.size(); ++i) {
      if (i) out_ += ", ";
      out_ += names[i];
    }
  }
  void Node(const stmt::Global& n) { Names("global ", n.names); }
  void Node(const stmt::Nonlocal& n) { Names("nonlocal ", n.names); }
  void Node(const stmt::ExprStmt& n) {
    Line();
    Bare(*n.value, kYield);
  }
  void Node(const stmt::Pass&) {
    Line();
    out_ += "pass";
  }
  void Node(const stmt::Break&) {
    Line();
    out_ += "break";
  }
  void Node(const stmt::Continue&) {
    Line();
    out_ += "continue";
  }

  std::string out_;
  int indent_ = 0;
};

}  // namespace

std::string Unparse(const Module& module) {
  Unparser u;
  u.TopLevel(module.body);
  std::string out = std::move(u.out());
  if (!out.empty()) out += "\n";
  return out;
}

std::string Unparse(const Expr& expr) {
  Unparser u;
  u.Expression(expr, kTuple);
  return std::move(u.out());
}

}  // namespace plum::py
