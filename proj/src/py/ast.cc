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

#include "plum/py/ast.h"

#include <string>
#include <type_traits>

namespace plum::py {

std::string_view Spelling(BinaryOperator op) {
  switch (op) {
    case BinaryOperator::kAdd:
      return "+";
    case BinaryOperator::kSub:
      return "-";
    case BinaryOperator::kMult:
      return "*";
    case BinaryOperator::kMatMult:
      return "@";
    case BinaryOperator::kDiv:
      return "/";
    case BinaryOperator::kMod:
      return "%";
    case BinaryOperator::kPow:
      return "**";
    case BinaryOperator::kLShift:
      return "<<";
    case BinaryOperator::kRShift:
      return ">>";
    case BinaryOperator::kBitOr:
      return "|";
    case BinaryOperator::kBitXor:
      return "^";
    case BinaryOperator::kBitAnd:
      return "&";
    case BinaryOperator::kFloorDiv:
      return "//";
  }
  return "?";
}

std::string_view Spelling(UnaryOperator op) {
  switch (op) {
    case UnaryOperator::kInvert:
      return "~";
    case UnaryOperator::kNot:
      return "not";
    case UnaryOperator::kUAdd:
      return "+";
    case UnaryOperator::kUSub:
      return "-";
  }
  return "?";
}

std::string_view Spelling(BoolOperator op) {
  return op == BoolOperator::kAnd ? "and" : "or";
}

std::string_view Spelling(CompareOperator op) {
  switch (op) {
    case CompareOperator::kEq:
      return "==";
    case CompareOperator::kNotEq:
      return "!=";
    case CompareOperator::kLt:
      return "<";
    case CompareOperator::kLtE:
      return "<=";
    case CompareOperator::kGt:
      return ">";
    case CompareOperator::kGtE:
      return ">=";
    case CompareOperator::kIs:
      return "is";
    case CompareOperator::kIsNot:
      return "is not";
    case CompareOperator::kIn:
      return "in";
    case CompareOperator::kNotIn:
      return "not in";
  }
  return "?";
}

namespace {

class Dumper {
 public:
  std::string& out() { return out_; }
  void CollectInto(std::vector<SourceLoc>* locs) { locs_ = locs; }

  void Expr(const py::Expr* e) {
    if (!e) {
      out_ += "_";
      return;
    }
    if (locs_ && e->loc.valid()) locs_->push_back(e->loc);
    std::visit([this](const auto& n) { ExprNode(n); }, e->node);
  }

  void Exprs(const ExprList& list) {
    out_ += "[";
    for (size_t i = 0; i < list.size(); ++i) {
      if (i) out_ += ",";
      Expr(list[i].get());
    }
    out_ += "]";
  }

  void Stmts(const StmtList& list) {
    out_ += "[";
    for (size_t i = 0; i < list.size(); ++i) {
      if (i) out_ += ",";
      Stmt(*list[i]);
    }
    out_ += "]";
  }

  void Stmt(const py::Stmt& s) {
    if (locs_ && s.loc.valid()) locs_->push_back(s.loc);
    std::visit([this](const auto& n) { StmtNode(n); }, s.node);
  }

 private:
  void Open(std::string_view name) {
    out_ += name;
    out_ += "(";
  }
  void Close() { out_ += ")"; }
  void Sep() { out_ += ","; }
  void Str(std::string_view s) {
    out_ += "'";
    out_ += s;
    out_ += "'";
  }
  void OptStr(const std::optional<std::string>& s) {
    if (s) {
      Str(*s);
    } else {
      out_ += "_";
    }
  }
  void Ctx(ExprContext ctx) {
    out_ += ctx == ExprContext::kLoad    ? "L"
            : ctx == ExprContext::kStore ? "S"
                                         : "D";
  }

  void Args(const Arguments* a) {
    Open("args");
    auto arg = [this](const Arg& x) {
      Open("arg");
      Str(x.name);
      Sep();
      Expr(x.annotation.get());
      Close();
    };
    auto args = [&](const std::vector<Arg>& v) {
      out_ += "[";
      for (size_t i = 0; i < v.size(); ++i) {
        if (i) Sep();
        arg(v[i]);
      }
      out_ += "]";
    };
    args(a->posonly);
    Sep();
    args(a->args);
    Sep();
    if (a->vararg) {
      arg(*a->vararg);
    } else {
      out_ += "_";
    }
    Sep();
    args(a->kwonly);
    Sep();
    Exprs(a->kw_defaults);
    Sep();
    if (a->kwarg) {
      arg(*a->kwarg);
    } else {
      out_ += "_";
    }
    Sep();
    Exprs(a->defaults);
    Close();
  }

  void Keywords(const std::vector<Keyword>& kws) {
    out_ += "[";
    for (size_t i = 0; i < kws.size(); ++i) {
      if (i) Sep();
      Open("kw");
      OptStr(kws[i].arg);
      Sep();
      Expr(kws[i].value.get());
      Close();
    }
    out_ += "]";
  }

  void Generators(const std::vector<Comprehension>& gens) {
    out_ += "[";
    for (size_t i = 0; i < gens.size(); ++i) {
      if (i) Sep();
      Open(gens[i].is_async ? "acomp" : "comp");
      Expr(gens[i].target.get());
      Sep();
      Expr(gens[i].iter.get());
      Sep();
      Exprs(gens[i].ifs);
      Close();
    }
    out_ += "]";
  }

  void Pattern(const py::Pattern* p) {
    if (!p) {
      out_ += "_";
      return;
    }
    std::visit([this](const auto& n) { PatternNode(n); }, p->node);
  }
  void Patterns(const PatternList& list) {
    out_ += "[";
    for (size_t i = 0; i < list.size(); ++i) {
      if (i) Sep();
      Pattern(list[i].get());
    }
    out_ += "]";
  }

  void ConstKind(ConstantKind k) {
    static const char* kNames[] = {"None", "True",   "False", "Ellipsis",
                                   "num",  "str", "bytes"};
    out_ += kNames[static_cast<int>(k)];
  }

  void PatternNode(const pattern::MatchValue& n) {
    Open("MatchValue");
    Expr(n.value.get());
    Close();
  }
  void PatternNode(const pattern::MatchSingleton& n) {
    Open("MatchSingleton");
    ConstKind(n.value);
    Close();
  }
  void PatternNode(const pattern::MatchSequence& n) {
    Open("MatchSequence");
    Patterns(n.patterns);
    Close();
  }
  void PatternNode(const pattern::MatchMapping& n) {
    Open("MatchMapping");
    Exprs(n.keys);
    Sep();
    Patterns(n.patterns);
    Sep();
    OptStr(n.rest);
    Close();
  }
  void PatternNode(const pattern::MatchClass& n) {
    Open("MatchClass");
    Expr(n.cls.get());
    Sep();
    Patterns(n.patterns);
    Sep();
    for (const auto& a : n.kwd_attrs) Str(a);
    Sep();
    Patterns(n.kwd_patterns);
    Close();
  }
  void PatternNode(const pattern::MatchStar& n) {
    Open("MatchStar");
    OptStr(n.name);
    Close();
  }
  void PatternNode(const pattern::MatchAs& n) {
    Open("MatchAs");
    Pattern(n.pattern.get());
    Sep();
    OptStr(n.name);
    Close();
  }
  void PatternNode(const pattern::MatchOr& n) {
    Open("MatchOr");
    Patterns(n.patterns);
    Close();
  }

  void ExprNode(const expr::BoolOp& n) {
    Open("BoolOp");
    out_ += Spelling(n.op);
    Sep();
    Exprs(n.values);
    Close();
  }
  void ExprNode(const expr::NamedExpr& n) {
    Open("NamedExpr");
    Expr(n.target.get());
    Sep();
    Expr(n.value.get());
    Close();
  }
  void ExprNode(const expr::BinOp& n) {
    Open("BinOp");
    Expr(n.left.get());
    Sep();
    out_ += Spelling(n.op);
    Sep();
    Expr(n.right.get());
    Close();
  }
  void ExprNode(const expr::UnaryOp& n) {
    Open("UnaryOp");
    out_ += Spelling(n.op);
    Sep();
    Expr(n.operand.get());
    Close();
  }
  void ExprNode(const expr::Lambda& n) {
    Open("Lambda");
    Args(n.args.get());
    Sep();
    Expr(n.body.get());
    Close();
  }
  void ExprNode(const expr::IfExp& n) {
    Open("IfExp");
    Expr(n.test.get());
    Sep();
    Expr(n.body.get());
    Sep();
    Expr(n.orelse.get());
    Close();
  }
  void ExprNode(const expr::Dict& n) {
    Open("Dict");
    Exprs(n.keys);
    Sep();
    Exprs(n.values);
    Close();
  }
  void ExprNode(const expr::Set& n) {
    Open("Set");
    Exprs(n.elts);
    Close();
  }
  void ExprNode(const expr::ListComp& n) {
    Open("ListComp");
    Expr(n.elt.get());
    Sep();
    Generators(n.generators);
    Close();
  }
  void ExprNode(const expr::SetComp& n) {
    Open("SetComp");
    Expr(n.elt.get());
    Sep();
    Generators(n.generators);
    Close();
  }
  void ExprNode(const expr::DictComp& n) {
    Open("DictComp");
    Expr(n.key.get());
    Sep();
    Expr(n.value.get());
    Sep();
    Generators(n.generators);
    Close();
  }
  void ExprNode(const expr::GeneratorExp& n) {
    Open("GeneratorExp");
    Expr(n.elt.get());
    Sep();
    Generators(n.generators);
    Close();
  }
  void ExprNode(const expr::Await& n) {
    Open("Await");
    Expr(n.value.get());
    Close();
  }
  void ExprNode(const expr::Yield& n) {
    Open("Yield");
    Expr(n.value.get());
    Close();
  }
  void ExprNode(const expr::YieldFrom& n) {
    Open("YieldFrom");
    Expr(n.value.get());
    Close();
  }
  void ExprNode(const expr::Compare& n) {
    Open("Compare");
    Expr(n.left.get());
    for (size_t i = 0; i < n.ops.size(); ++i) {
      Sep();
      out_ += Spelling(n.ops[i]);
      Sep();
      Expr(n.comparators[i].get());
    }
    Close();
  }
  void ExprNode(const expr::Call& n) {
    Open("Call");
    Expr(n.func.get());
    Sep();
    Exprs(n.args);
    Sep();
    Keywords(n.keywords);
    Close();
  }
  void ExprNode(const expr::Constant& n) {
    Open("Constant");
    ConstKind(n.kind);
    for (const auto& piece : n.pieces) {
      Sep();
      out_ += piece;
    }
    Close();
  }
  void ExprNode(const expr::Attribute& n) {
    Open("Attribute");
    Expr(n.value.get());
    Sep();
    Str(n.attr);
    Sep();
    Ctx(n.ctx);
    Close();
  }
  void ExprNode(const expr::Subscript& n) {
    Open("Subscript");
    Expr(n.value.get());
    Sep();
    Expr(n.slice.get());
    Sep();
    Ctx(n.ctx);
    Close();
  }
  void ExprNode(const expr::Starred& n) {
    Open("Starred");
    Expr(n.value.get());
    Sep();
    Ctx(n.ctx);
    Close();
  }
  void ExprNode(const expr::Name& n) {
    Open("Name");
    Str(n.id);
    Sep();
    Ctx(n.ctx);
    Close();
  }
  void ExprNode(const expr::List& n) {
    Open("List");
    Exprs(n.elts);
    Sep();
    Ctx(n.ctx);
    Close();
  }
  void ExprNode(const expr::Tuple& n) {
    Open("Tuple");
    Exprs(n.elts);
    Sep();
    Ctx(n.ctx);
    Close();
  }
  void ExprNode(const expr::Slice& n) {
    Open("Slice");
    Expr(n.lower.get());
    Sep();
    Expr(n.upper.get());
    Sep();
    Expr(n.step.get());
    Close();
  }

  void StmtNode(const stmt::FunctionDef& n) {
    Open(n.is_async ? "AsyncFunctionDef" : "FunctionDef");
    Str(n.name);
    Sep();
    Args(n.args.get());
    Sep();
    Stmts(n.body);
    Sep();
    Exprs(n.decorators);
    Sep();
    Expr(n.returns.get());
    Close();
  }
  void StmtNode(const stmt::ClassDef& n) {
    Open("ClassDef");
    Str(n.name);
    Sep();
    Exprs(n.bases);
    Sep();
    Keywords(n.keywords);
    Sep();
    Stmts(n.body);
    Sep();
    Exprs(n.decorators);
    Close();
  }
  void StmtNode(const stmt::Return& n) {
    Open("Return");
    Expr(n.value.get());
    Close();
  }
  void StmtNode(const stmt::Delete& n) {
    Open("Delete");
    Exprs(n.targets);
    Close();
  }
  void StmtNode(const stmt::Assign& n) {
    Open("Assign");
    Exprs(n.targets);
    Sep();
    Expr(n.value.get());
    Close();
  }
  void StmtNode(const stmt::AugAssign& n) {
    Open("AugAssign");
    Expr(n.target.get());
    Sep();
    out_ += Spelling(n.op);
    Sep();
    Expr(n.value.get());
    Close();
  }
  void StmtNode(const stmt::AnnAssign& n) {
    Open("AnnAssign");
    Expr(n.target.get());
    Sep();
    Expr(n.annotation.get());
    Sep();
    Expr(n.value.get());
    Sep();
    out_ += n.simple ? "1" : "0";
    Close();
  }
  void StmtNode(const stmt::For& n) {
    Open(n.is_async ? "AsyncFor" : "For");
    Expr(n.target.get());
    Sep();
    Expr(n.iter.get());
    Sep();
    Stmts(n.body);
    Sep();
    Stmts(n.orelse);
    Close();
  }
  void StmtNode(const stmt::While& n) {
    Open("While");
    Expr(n.test.get());
    Sep();
    Stmts(n.body);
    Sep();
    Stmts(n.orelse);
    Close();
  }
  void StmtNode(const stmt::If& n) {
    Open("If");
    Expr(n.test.get());
    Sep();
    Stmts(n.body);
    Sep();
    Stmts(n.orelse);
    Close();
  }
  void StmtNode(const stmt::With& n) {
    Open(n.is_async ? "AsyncWith" : "With");
    out_ += "[";
    for (size_t i = 0; i < n.items.size(); ++i) {
      if (i) Sep();
      Open("withitem");
      Expr(n.items[i].context_expr.get());
      Sep();
      Expr(n.items[i].optional_vars.get());
      Close();
    }
    out_ += "]";
    Sep();
    Stmts(n.body);
    Close();
  }
  void StmtNode(const stmt::Match& n) {
    Open("Match");
    Expr(n.subject.get());
    for (const auto& c : n.cases) {
      Sep();
      Open("case");
      Pattern(c.pattern.get());
      Sep();
      Expr(c.guard.get());
      Sep();
      Stmts(c.body);
      Close();
    }
    Close();
  }
  void StmtNode(const stmt::Raise& n) {
    Open("Raise");
    Expr(n.exc.get());
    Sep();
    Expr(n.cause.get());
    Close();
  }
  void StmtNode(const stmt::Try& n) {
    Open("Try");
    Stmts(n.body);
    Sep();
    out_ += "[";
    for (size_t i = 0; i < n.handlers.size(); ++i) {
      if (i) Sep();
      Open("handler");
      Expr(n.handlers[i].type.get());
      Sep();
      OptStr(n.handlers[i].name);
      Sep();
      Stmts(n.handlers[i].body);
      Close();
    }
    out_ += "]";
    Sep();
    Stmts(n.orelse);
    Sep();
    Stmts(n.finalbody);
    Close();
  }
  void StmtNode(const stmt::Assert& n) {
    Open("Assert");
    Expr(n.test.get());
    Sep();
    Expr(n.msg.get());
    Close();
  }
  void Aliases(const std::vector<Alias>& names) {
    out_ += "[";
    for (size_t i = 0; i < names.size(); ++i) {
      if (i) Sep();
      Str(names[i].name);
      out_ += " as ";
      OptStr(names[i].asname);
    }
    out_ += "]";
  }
  void StmtNode(const stmt::Import& n) {
    Open("Import");
    Aliases(n.names);
    Close();
  }
  void StmtNode(const stmt::ImportFrom& n) {
    Open("ImportFrom");
    Str(n.module);
    Sep();
    Aliases(n.names);
    Sep();
    out_ += std::to_string(n.level);
    Close();
  }
  void StmtNode(const stmt::Global& n) {
    Open("Global");
    for (const auto& name : n.names) Str(name);
    Close();
  }
  void StmtNode(const stmt::Nonlocal& n) {
    Open("Nonlocal");
    for (const auto& name : n.names) Str(name);
    Close();
  }
  void StmtNode(const stmt::ExprStmt& n) {
    Open("Expr");
    Expr(n.value.get());
    Close();
  }
  void StmtNode(const stmt::Pass&) { out_ += "Pass"; }
  void StmtNode(const stmt::Break&) { out_ += "Break"; }
  void StmtNode(const stmt::Continue&) { out_ += "Continue"; }

  std::string out_;
  std::vector<SourceLoc>* locs_ = nullptr;
};

}  // namespace

std::string Dump(const Module& module) {
  Dumper d;
  d.Stmts(module.body);
  return std::move(d.out());
}

std::string Dump(const Expr& expr) {
  Dumper d;
  d.Expr(&expr);
  return std::move(d.out());
}

std::vector<SourceLoc> CollectLocations(const Module& module) {
  std::vector<SourceLoc> locs;
  Dumper d;
  d.CollectInto(&locs);
  d.Stmts(module.body);
  return locs;
}

}  // namespace plum::py
