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

#include "plum/mutator.h"

#include <algorithm>
#include <map>
#include <utility>

#include "plum/py/parser.h"
#include "plum/py/unparser.h"
#include "plum/util/hash.h"
#include "plum/util/parallel.h"
#include "plum/util/rng.h"

namespace plum {
namespace {

using namespace py;  // NOLINT

constexpr std::string_view kRuleNames[] = {
    "SwapArgs",  "ReplaceCall", "ChangeOperator",       "NegateCondition",
    "SwapIfElse", "OffByOne",   "DropExceptionHandler", "AlterReturn"};

enum class PyType {
  kUnknown,
  kInt,
  kFloat,
  kComplex,
  kBool,
  kStr,
  kBytes,
  kList,
  kDict,
  kSet,
  kTuple,
  kNone,
};

bool IsNumeric(PyType t) {
  return t == PyType::kInt || t == PyType::kFloat || t == PyType::kComplex;
}

PyType NumberType(const std::string& spelling) {
  std::string s = spelling;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s.find('j') != std::string::npos) return PyType::kComplex;
  if (s.rfind("0x", 0) == 0 || s.rfind("0o", 0) == 0 || s.rfind("0b", 0) == 0) {
    return PyType::kInt;
  }
  if (s.find_first_of(".e") != std::string::npos) return PyType::kFloat;
  return PyType::kInt;
}

PyType TypeFromName(std::string_view name) {
  static const std::map<std::string_view, PyType> kNames = {
      {"int", PyType::kInt},     {"float", PyType::kFloat}, {"complex", PyType::kComplex},
      {"bool", PyType::kBool},   {"str", PyType::kStr},     {"bytes", PyType::kBytes},
      {"list", PyType::kList},   {"List", PyType::kList},   {"dict", PyType::kDict},
      {"Dict", PyType::kDict},   {"set", PyType::kSet},     {"Set", PyType::kSet},
      {"tuple", PyType::kTuple}, {"Tuple", PyType::kTuple},
  };
  auto it = kNames.find(name);
  return it == kNames.end() ? PyType::kUnknown : it->second;
}

PyType AnnotationType(const Expr* annotation) {
  if (!annotation) return PyType::kUnknown;
  if (const auto* n = annotation->As<expr::Name>()) return TypeFromName(n->id);
  if (const auto* a = annotation->As<expr::Attribute>()) return TypeFromName(a->attr);
  if (const auto* s = annotation->As<expr::Subscript>()) return AnnotationType(s->value.get());
  return PyType::kUnknown;
}

struct Signature {
  std::string name;
  size_t positional = 0;
};

// Top-level functions callable with a fixed number of positional arguments.
std::vector<Signature> CollectSignatures(const Module& module) {
  std::vector<Signature> out;
  for (const auto& s : module.body) {
    const auto* f = s->As<stmt::FunctionDef>();
    if (!f) continue;
    const Arguments& a = *f->args;
    if (a.vararg || a.kwarg || !a.kwonly.empty()) continue;
    out.push_back({f->name, a.PositionalCount()});
  }
  return out;
}

std::optional<BinaryOperator> SwapBinary(BinaryOperator op, Rng& rng) {
  switch (op) {
    case BinaryOperator::kAdd:
      return BinaryOperator::kSub;
    case BinaryOperator::kSub:
      return BinaryOperator::kAdd;
    case BinaryOperator::kMult:
      return BinaryOperator::kDiv;
    case BinaryOperator::kDiv:
      return rng.Coin() ? BinaryOperator::kMult : BinaryOperator::kFloorDiv;
    case BinaryOperator::kFloorDiv:
      return BinaryOperator::kDiv;
    default:
      return std::nullopt;
  }
}

bool BinaryEligible(BinaryOperator op) {
  return op == BinaryOperator::kAdd || op == BinaryOperator::kSub ||
         op == BinaryOperator::kMult || op == BinaryOperator::kDiv ||
         op == BinaryOperator::kFloorDiv;
}

std::optional<CompareOperator> SwapCompare(CompareOperator op) {
  switch (op) {
    case CompareOperator::kLt:
      return CompareOperator::kLtE;
    case CompareOperator::kLtE:
      return CompareOperator::kLt;
    case CompareOperator::kGt:
      return CompareOperator::kGtE;
    case CompareOperator::kGtE:
      return CompareOperator::kGt;
    case CompareOperator::kEq:
      return CompareOperator::kNotEq;
    case CompareOperator::kNotEq:
      return CompareOperator::kEq;
    default:
      return std::nullopt;
  }
}

ExprPtr One() { return MakeExpr(expr::Constant{ConstantKind::kNumber, {"1"}}); }

class Mutator {
 public:
  Mutator(const MutationConfig& config, uint64_t seed, std::vector<Signature> signatures)
      : config_(config), rng_(seed), signatures_(std::move(signatures)) {
    scopes_.emplace_back();
  }

  void Run(Module& module) { VisitBlock(module.body); }

  std::vector<AppliedMutation> TakeApplied() { return std::move(applied_); }

 private:
  bool Enabled(MutationRule rule) const {
    if (!config_.enabled_rules.count(rule)) return false;
    return !config_.max_mutations_per_program ||
           applied_.size() < *config_.max_mutations_per_program;
  }
  bool Draw() { return rng_.Bernoulli(config_.p); }
  void Record(MutationRule rule, SourceLoc loc) { applied_.push_back({rule, loc}); }

  // --- type tracking ---

  PyType Lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto found = it->find(name);
      if (found != it->end()) return found->second;
    }
    return PyType::kUnknown;
  }
  void Bind(const std::string& name, PyType type) { scopes_.back()[name] = type; }

  PyType Infer(const Expr* e) const {
    if (!e) return PyType::kUnknown;
    if (const auto* c = e->As<expr::Constant>()) {
      switch (c->kind) {
        case ConstantKind::kNumber:
          return NumberType(c->pieces.front());
        case ConstantKind::kString:
          return PyType::kStr;
        case ConstantKind::kBytes:
          return PyType::kBytes;
        case ConstantKind::kTrue:
        case ConstantKind::kFalse:
          return PyType::kBool;
        case ConstantKind::kNone:
          return PyType::kNone;
        case ConstantKind::kEllipsis:
          return PyType::kUnknown;
      }
    }
    if (const auto* n = e->As<expr::Name>()) return Lookup(n->id);
    if (e->Is<expr::List>() || e->Is<expr::ListComp>()) return PyType::kList;
    if (e->Is<expr::Dict>() || e->Is<expr::DictComp>()) return PyType::kDict;
    if (e->Is<expr::Set>() || e->Is<expr::SetComp>()) return PyType::kSet;
    if (e->Is<expr::Tuple>()) return PyType::kTuple;
    if (const auto* u = e->As<expr::UnaryOp>()) {
      PyType t = Infer(u->operand.get());
      if (u->op == UnaryOperator::kNot) return PyType::kBool;
      return IsNumeric(t) ? t : PyType::kUnknown;
    }
    if (const auto* b = e->As<expr::BinOp>()) {
      PyType l = Infer(b->left.get());
      PyType r = Infer(b->right.get());
      if (!IsNumeric(l) || !IsNumeric(r) || !BinaryEligible(b->op)) {
        if (l == PyType::kStr && r == PyType::kStr && b->op == BinaryOperator::kAdd) {
          return PyType::kStr;
        }
        return PyType::kUnknown;
      }
      if (l == PyType::kComplex || r == PyType::kComplex) return PyType::kComplex;
      if (b->op == BinaryOperator::kDiv || l == PyType::kFloat || r == PyType::kFloat) {
        return PyType::kFloat;
      }
      return PyType::kInt;
    }
    return PyType::kUnknown;
  }

  static bool IsRangeCall(const Expr* e) {
    const auto* call = e ? e->As<expr::Call>() : nullptr;
    if (!call || !call->keywords.empty()) return false;
    const auto* f = call->func->As<expr::Name>();
    if (!f || f->id != "range") return false;
    if (call->args.empty() || call->args.size() > 3) return false;
    for (const auto& a : call->args) {
      if (a->Is<expr::Starred>()) return false;
    }
    return true;
  }

  void CollectBindings(const Expr* target, const Expr* value,
                       std::map<std::string, PyType>& out) const {
    if (!target) return;
    if (const auto* n = target->As<expr::Name>()) {
      out[n->id] = Infer(value);
      return;
    }
    const ExprList* elts = nullptr;
    if (const auto* t = target->As<expr::Tuple>()) elts = &t->elts;
    if (const auto* l = target->As<expr::List>()) elts = &l->elts;
    if (!elts) return;
    const ExprList* values = nullptr;
    if (value) {
      if (const auto* t = value->As<expr::Tuple>()) values = &t->elts;
      if (const auto* l = value->As<expr::List>()) values = &l->elts;
    }
    for (size_t i = 0; i < elts->size(); ++i) {
      const Expr* v = values && values->size() == elts->size() ? (*values)[i].get() : nullptr;
      CollectBindings((*elts)[i].get(), v, out);
    }
  }

  // --- statements ---

  void VisitBlock(StmtList& list) {
    for (size_t i = 0; i < list.size();) {
      Stmt& s = *list[i];
      auto* t = s.As<stmt::Try>();
      if (t && s.loc.valid() && !t->handlers.empty() &&
          Enabled(MutationRule::kDropExceptionHandler) && Draw()) {
        Record(MutationRule::kDropExceptionHandler, s.loc);
        StmtList spliced;
        for (auto* part : {&t->body, &t->orelse, &t->finalbody}) {
          for (auto& inner : *part) spliced.push_back(std::move(inner));
        }
        list.erase(list.begin() + static_cast<std::ptrdiff_t>(i));
        list.insert(list.begin() + static_cast<std::ptrdiff_t>(i),
                    std::make_move_iterator(spliced.begin()),
                    std::make_move_iterator(spliced.end()));
        continue;  // the spliced statements are visited in place
      }
      VisitStmt(s);
      ++i;
    }
  }

  void VisitArguments(Arguments& a) {
    for (auto* group : {&a.posonly, &a.args, &a.kwonly}) {
      for (auto& arg : *group) VisitExpr(arg.annotation);
    }
    if (a.vararg) VisitExpr(a.vararg->annotation);
    if (a.kwarg) VisitExpr(a.kwarg->annotation);
    for (auto& d : a.defaults) VisitExpr(d);
    for (auto& d : a.kw_defaults) VisitExpr(d);
  }

  void BindParameters(const Arguments& a) {
    for (const auto* group : {&a.posonly, &a.args, &a.kwonly}) {
      for (const auto& arg : *group) Bind(arg.name, AnnotationType(arg.annotation.get()));
    }
    if (a.vararg) Bind(a.vararg->name, PyType::kTuple);
    if (a.kwarg) Bind(a.kwarg->name, PyType::kDict);
  }

  void VisitStmt(Stmt& s) {
    if (auto* n = s.As<stmt::FunctionDef>()) {
      for (auto& d : n->decorators) VisitExpr(d);
      VisitArguments(*n->args);
      VisitExpr(n->returns);
      Bind(n->name, PyType::kUnknown);
      scopes_.emplace_back();
      enclosing_.push_back(n->name);
      BindParameters(*n->args);
      VisitBlock(n->body);
      enclosing_.pop_back();
      scopes_.pop_back();
    } else if (auto* n = s.As<stmt::ClassDef>()) {
      for (auto& d : n->decorators) VisitExpr(d);
      for (auto& b : n->bases) VisitExpr(b);
      for (auto& k : n->keywords) VisitExpr(k.value);
      Bind(n->name, PyType::kUnknown);
      scopes_.emplace_back();
      VisitBlock(n->body);
      scopes_.pop_back();
    } else if (auto* n = s.As<stmt::Return>()) {
      if (n->value && s.loc.valid() && Enabled(MutationRule::kAlterReturn)) {
        TryAlterReturn(s, *n);
      }
      VisitExpr(n->value);
    } else if (auto* n = s.As<stmt::Delete>()) {
      for (auto& t : n->targets) VisitExpr(t);
    } else if (auto* n = s.As<stmt::Assign>()) {
      // Inferred before the value can be rewritten, bound after the targets.
      std::map<std::string, PyType> bindings;
      for (const auto& t : n->targets) CollectBindings(t.get(), n->value.get(), bindings);
      VisitExpr(n->value);
      for (auto& t : n->targets) VisitExpr(t);
      for (const auto& [name, type] : bindings) Bind(name, type);
    } else if (auto* n = s.As<stmt::AugAssign>()) {
      if (s.loc.valid() && BinaryEligible(n->op) && Enabled(MutationRule::kChangeOperator) &&
          Draw()) {
        Record(MutationRule::kChangeOperator, s.loc);
        n->op = *SwapBinary(n->op, rng_);
      }
      PyType kept = PyType::kUnknown;
      if (const auto* name = n->target->As<expr::Name>()) kept = Lookup(name->id);
      VisitExpr(n->target);
      VisitExpr(n->value);
      if (const auto* name = n->target->As<expr::Name>()) Bind(name->id, kept);
    } else if (auto* n = s.As<stmt::AnnAssign>()) {
      VisitExpr(n->target);
      VisitExpr(n->annotation);
      VisitExpr(n->value);
      if (const auto* name = n->target->As<expr::Name>()) {
        Bind(name->id, AnnotationType(n->annotation.get()));
      }
    } else if (auto* n = s.As<stmt::For>()) {
      bool range_loop = IsRangeCall(n->iter.get());
      if (range_loop && s.loc.valid() && Enabled(MutationRule::kOffByOne) && Draw()) {
        Record(MutationRule::kOffByOne, s.loc);
        auto& args = n->iter->As<expr::Call>()->args;
        ExprPtr& stop = args.size() == 1 ? args[0] : args[1];
        BinaryOperator op = rng_.Coin() ? BinaryOperator::kAdd : BinaryOperator::kSub;
        stop = MakeExpr(expr::BinOp{std::move(stop), op, One()});
      }
      VisitExpr(n->target);
      VisitExpr(n->iter);
      if (range_loop) {
        if (const auto* name = n->target->As<expr::Name>()) Bind(name->id, PyType::kInt);
      }
      VisitBlock(n->body);
      VisitBlock(n->orelse);
    } else if (auto* n = s.As<stmt::While>()) {
      VisitExpr(n->test);
      VisitBlock(n->body);
      VisitBlock(n->orelse);
    } else if (auto* n = s.As<stmt::If>()) {
      if (s.loc.valid()) TryIfRules(s, *n);
      VisitExpr(n->test);
      VisitBlock(n->body);
      VisitBlock(n->orelse);
    } else if (auto* n = s.As<stmt::With>()) {
      for (auto& item : n->items) {
        VisitExpr(item.context_expr);
        VisitExpr(item.optional_vars);
      }
      VisitBlock(n->body);
    } else if (auto* n = s.As<stmt::Match>()) {
      VisitExpr(n->subject);
      for (auto& c : n->cases) {
        VisitExpr(c.guard);
        VisitBlock(c.body);
      }
    } else if (auto* n = s.As<stmt::Raise>()) {
      VisitExpr(n->exc);
      VisitExpr(n->cause);
    } else if (auto* n = s.As<stmt::Try>()) {
      VisitBlock(n->body);
      for (auto& h : n->handlers) {
        VisitExpr(h.type);
        if (h.name) Bind(*h.name, PyType::kUnknown);
        VisitBlock(h.body);
      }
      VisitBlock(n->orelse);
      VisitBlock(n->finalbody);
    } else if (auto* n = s.As<stmt::Assert>()) {
      VisitExpr(n->test);
      VisitExpr(n->msg);
    } else if (auto* n = s.As<stmt::Import>()) {
      for (const auto& a : n->names) {
        std::string bound = a.asname ? *a.asname : a.name.substr(0, a.name.find('.'));
        Bind(bound, PyType::kUnknown);
      }
    } else if (auto* n = s.As<stmt::ImportFrom>()) {
      for (const auto& a : n->names) Bind(a.asname ? *a.asname : a.name, PyType::kUnknown);
    } else if (auto* n = s.As<stmt::ExprStmt>()) {
      VisitExpr(n->value);
    }
  }

  void TryIfRules(Stmt& s, stmt::If& n) {
    bool can_negate = Enabled(MutationRule::kNegateCondition);
    bool can_swap = Enabled(MutationRule::kSwapIfElse) && !n.orelse.empty();
    if (!(can_negate || can_swap) || !Draw()) return;
    bool swap = can_swap && (!can_negate || rng_.Coin());
    if (swap) {
      Record(MutationRule::kSwapIfElse, s.loc);
      std::swap(n.body, n.orelse);
      return;
    }
    Record(MutationRule::kNegateCondition, s.loc);
    auto* u = n.test->As<expr::UnaryOp>();
    if (u && u->op == UnaryOperator::kNot) {
      ExprPtr inner = std::move(u->operand);
      n.test = std::move(inner);
    } else {
      n.test = MakeExpr(expr::UnaryOp{UnaryOperator::kNot, std::move(n.test)});
    }
  }

  void TryAlterReturn(Stmt& s, stmt::Return& n) {
    Expr& v = *n.value;
    if (auto* c = v.As<expr::Constant>()) {
      switch (c->kind) {
        case ConstantKind::kTrue:
        case ConstantKind::kFalse:
          if (!Draw()) return;
          Record(MutationRule::kAlterReturn, s.loc);
          c->kind = c->kind == ConstantKind::kTrue ? ConstantKind::kFalse : ConstantKind::kTrue;
          return;
        case ConstantKind::kString:
        case ConstantKind::kBytes:
          if (!Draw()) return;
          Record(MutationRule::kAlterReturn, s.loc);
          c->pieces.insert(c->pieces.begin(), c->kind == ConstantKind::kBytes ? "b'_'" : "'_'");
          return;
        case ConstantKind::kNumber:
          if (!Draw()) return;
          Record(MutationRule::kAlterReturn, s.loc);
          n.value = MakeExpr(expr::BinOp{std::move(n.value), BinaryOperator::kAdd, One()});
          return;
        default:
          return;
      }
    }
    if (!IsNumeric(Infer(&v)) || !Draw()) return;
    Record(MutationRule::kAlterReturn, s.loc);
    n.value = MakeExpr(expr::UnaryOp{UnaryOperator::kUSub, std::move(n.value)});
  }

  // --- expressions ---

  void VisitComprehensions(std::vector<Comprehension>& gens) {
    for (auto& g : gens) {
      VisitExpr(g.target);
      VisitExpr(g.iter);
      for (auto& cond : g.ifs) VisitExpr(cond);
    }
  }

  void VisitExpr(ExprPtr& slot) {
    if (!slot) return;
    Expr& e = *slot;
    bool site = e.loc.valid();
    if (auto* n = e.As<expr::BoolOp>()) {
      if (site && Enabled(MutationRule::kChangeOperator) && Draw()) {
        Record(MutationRule::kChangeOperator, e.loc);
        n->op = n->op == BoolOperator::kAnd ? BoolOperator::kOr : BoolOperator::kAnd;
      }
      for (auto& v : n->values) VisitExpr(v);
    } else if (auto* n = e.As<expr::NamedExpr>()) {
      VisitExpr(n->value);
      VisitExpr(n->target);
      if (const auto* name = n->target->As<expr::Name>()) Bind(name->id, Infer(n->value.get()));
    } else if (auto* n = e.As<expr::BinOp>()) {
      if (site && BinaryEligible(n->op) && Enabled(MutationRule::kChangeOperator) && Draw()) {
        Record(MutationRule::kChangeOperator, e.loc);
        n->op = *SwapBinary(n->op, rng_);
      }
      VisitExpr(n->left);
      VisitExpr(n->right);
    } else if (auto* n = e.As<expr::UnaryOp>()) {
      VisitExpr(n->operand);
    } else if (auto* n = e.As<expr::Lambda>()) {
      VisitArguments(*n->args);
      scopes_.emplace_back();
      BindParameters(*n->args);
      VisitExpr(n->body);
      scopes_.pop_back();
    } else if (auto* n = e.As<expr::IfExp>()) {
      VisitExpr(n->test);
      VisitExpr(n->body);
      VisitExpr(n->orelse);
    } else if (auto* n = e.As<expr::Dict>()) {
      for (size_t i = 0; i < n->values.size(); ++i) {
        VisitExpr(n->keys[i]);
        VisitExpr(n->values[i]);
      }
    } else if (auto* n = e.As<expr::Set>()) {
      for (auto& x : n->elts) VisitExpr(x);
    } else if (auto* n = e.As<expr::ListComp>()) {
      scopes_.emplace_back();
      VisitExpr(n->elt);
      VisitComprehensions(n->generators);
      scopes_.pop_back();
    } else if (auto* n = e.As<expr::SetComp>()) {
      scopes_.emplace_back();
      VisitExpr(n->elt);
      VisitComprehensions(n->generators);
      scopes_.pop_back();
    } else if (auto* n = e.As<expr::DictComp>()) {
      scopes_.emplace_back();
      VisitExpr(n->key);
      VisitExpr(n->value);
      VisitComprehensions(n->generators);
      scopes_.pop_back();
    } else if (auto* n = e.As<expr::GeneratorExp>()) {
      scopes_.emplace_back();
      VisitExpr(n->elt);
      VisitComprehensions(n->generators);
      scopes_.pop_back();
    } else if (auto* n = e.As<expr::Await>()) {
      VisitExpr(n->value);
    } else if (auto* n = e.As<expr::Yield>()) {
      VisitExpr(n->value);
    } else if (auto* n = e.As<expr::YieldFrom>()) {
      VisitExpr(n->value);
    } else if (auto* n = e.As<expr::Compare>()) {
      if (site) TryCompare(e, *n);
      VisitExpr(n->left);
      for (auto& c : n->comparators) VisitExpr(c);
    } else if (auto* n = e.As<expr::Call>()) {
      if (site) {
        TrySwapArgs(e, *n);
        TryReplaceCall(e, *n);
      }
      VisitExpr(n->func);
      for (auto& a : n->args) VisitExpr(a);
      for (auto& k : n->keywords) VisitExpr(k.value);
    } else if (auto* n = e.As<expr::Attribute>()) {
      VisitExpr(n->value);
    } else if (auto* n = e.As<expr::Subscript>()) {
      VisitExpr(n->value);
      VisitExpr(n->slice);
    } else if (auto* n = e.As<expr::Starred>()) {
      VisitExpr(n->value);
    } else if (auto* n = e.As<expr::Name>()) {
      if (n->ctx == ExprContext::kStore) Bind(n->id, PyType::kUnknown);
    } else if (auto* n = e.As<expr::List>()) {
      for (auto& x : n->elts) VisitExpr(x);
    } else if (auto* n = e.As<expr::Tuple>()) {
      for (auto& x : n->elts) VisitExpr(x);
    } else if (auto* n = e.As<expr::Slice>()) {
      VisitExpr(n->lower);
      VisitExpr(n->upper);
      VisitExpr(n->step);
    }
  }

  void TryCompare(Expr& e, expr::Compare& n) {
    if (!Enabled(MutationRule::kChangeOperator)) return;
    std::vector<size_t> eligible;
    for (size_t i = 0; i < n.ops.size(); ++i) {
      if (SwapCompare(n.ops[i])) eligible.push_back(i);
    }
    if (eligible.empty() || !Draw()) return;
    size_t pick = eligible.size() == 1 ? eligible[0] : eligible[rng_.Below(eligible.size())];
    Record(MutationRule::kChangeOperator, e.loc);
    n.ops[pick] = *SwapCompare(n.ops[pick]);
  }

  void TrySwapArgs(Expr& e, expr::Call& n) {
    if (!Enabled(MutationRule::kSwapArgs) || n.args.size() < 2) return;
    std::vector<std::pair<size_t, size_t>> pairs;
    std::vector<PyType> types;
    std::vector<std::string> dumps;
    for (const auto& a : n.args) {
      types.push_back(a->Is<expr::Starred>() ? PyType::kUnknown : Infer(a.get()));
      dumps.push_back(Dump(*a));
    }
    for (size_t i = 0; i < n.args.size(); ++i) {
      if (n.args[i]->Is<expr::Starred>()) continue;
      for (size_t j = i + 1; j < n.args.size(); ++j) {
        if (n.args[j]->Is<expr::Starred>() || dumps[i] == dumps[j]) continue;
        bool match = types[i] == types[j] &&
                     (types[i] != PyType::kUnknown || config_.allow_unknown_types);
        if (match) pairs.emplace_back(i, j);
      }
    }
    if (pairs.empty() || !Draw()) return;
    auto [i, j] = pairs.size() == 1 ? pairs[0] : pairs[rng_.Below(pairs.size())];
    Record(MutationRule::kSwapArgs, e.loc);
    std::swap(n.args[i], n.args[j]);
  }

  void TryReplaceCall(Expr& e, expr::Call& n) {
    if (!Enabled(MutationRule::kReplaceCall) || !n.keywords.empty()) return;
    auto* callee = n.func->As<expr::Name>();
    if (!callee) return;
    for (const auto& a : n.args) {
      if (a->Is<expr::Starred>()) return;
    }
    auto self = std::find_if(signatures_.begin(), signatures_.end(),
                             [&](const Signature& s) { return s.name == callee->id; });
    if (self == signatures_.end() || self->positional != n.args.size()) return;
    std::vector<const Signature*> options;
    for (const auto& s : signatures_) {
      bool recursive = std::find(enclosing_.begin(), enclosing_.end(), s.name) != enclosing_.end();
      if (s.name != callee->id && !recursive && s.positional == n.args.size()) {
        options.push_back(&s);
      }
    }
    if (options.empty() || !Draw()) return;
    const Signature* pick =
        options.size() == 1 ? options[0] : options[rng_.Below(options.size())];
    Record(MutationRule::kReplaceCall, e.loc);
    callee->id = pick->name;
  }

  const MutationConfig& config_;
  Rng rng_;
  std::vector<Signature> signatures_;
  std::vector<std::map<std::string, PyType>> scopes_;
  std::vector<std::string> enclosing_;  // names of the functions being visited
  std::vector<AppliedMutation> applied_;
};

}  // namespace

std::string_view RuleName(MutationRule rule) { return kRuleNames[static_cast<int>(rule)]; }

MutationRule RuleFromName(std::string_view name) {
  for (size_t i = 0; i < std::size(kRuleNames); ++i) {
    if (kRuleNames[i] == name) return static_cast<MutationRule>(i);
  }
  throw std::invalid_argument("unknown mutation rule: " + std::string(name));
}

const std::set<MutationRule>& AllRules() {
  static const std::set<MutationRule> kAll = {
      MutationRule::kSwapArgs,        MutationRule::kReplaceCall,
      MutationRule::kChangeOperator,  MutationRule::kNegateCondition,
      MutationRule::kSwapIfElse,      MutationRule::kOffByOne,
      MutationRule::kDropExceptionHandler, MutationRule::kAlterReturn};
  return kAll;
}

std::vector<AppliedMutation> MutateTree(py::Module& module, const MutationConfig& config,
                                        uint64_t seed) {
  if (config.p < 0 || config.p > 1) throw std::invalid_argument("mutation p must be in [0, 1]");
  Mutator m(config, seed, CollectSignatures(module));
  m.Run(module);
  return m.TakeApplied();
}

MutationResult Mutate(std::string_view code, const MutationConfig& config) {
  py::Module module;
  try {
    module = py::Parse(code);
  } catch (const py::SyntaxError& e) {
    throw UnparseableInput(std::string("line ") + std::to_string(e.loc().line) + ": " +
                           e.message());
  }
  MutationResult result;
  result.applied = MutateTree(module, config, config.seed ^ Fnv1a64(code));
  if (result.applied.empty()) {
    result.code = std::string(code);
    return result;
  }
  result.code = py::Unparse(module);
  try {
    py::Parse(result.code);
  } catch (const py::SyntaxError&) {
    result.code = std::string(code);
    result.applied.clear();
    result.valid = false;
  }
  return result;
}

double EscalatedProbability(double p, int attempt) {
  if (attempt <= 0) return p;
  if (attempt == 1) return (p + 1.0) / 2.0;
  return 1.0;
}

SynthResult SynthNegatives(const std::vector<LabeledCandidate>& positives,
                           const MutationConfig& config,
                           const std::vector<TestArtifact>& tests,
                           const Sandbox* sandbox) {
  if (config.require_behavioral_change && !sandbox) {
    throw std::invalid_argument("behavioral check needs a sandbox");
  }
  std::map<std::string, std::vector<const TestArtifact*>> tests_by_id;
  for (const auto& t : tests) tests_by_id[t.instruction_id].push_back(&t);

  enum class Verdict { kEmitted, kNoSite, kInvalid, kNoChange, kSandboxError };
  struct Slot {
    Verdict verdict = Verdict::kNoSite;
    Mutant mutant;
  };
  std::vector<Slot> slots(positives.size());
  int parallelism = sandbox ? sandbox->config().parallelism : 1;
  ParallelFor(positives.size(), parallelism, [&](size_t idx) {
    const CandidateSolution& source = positives[idx].candidate;
    Slot& slot = slots[idx];
    bool saw_site = false;
    bool saw_invalid = false;
    for (int attempt = 0; attempt < std::max(1, config.max_attempts); ++attempt) {
      MutationConfig c = config;
      c.p = EscalatedProbability(config.p, attempt);
      c.seed = DeriveSeed(config.seed, static_cast<uint64_t>(attempt));
      MutationResult r;
      try {
        r = Mutate(source.code, c);
      } catch (const UnparseableInput&) {
        slot.verdict = Verdict::kInvalid;
        return;
      }
      if (!r.valid) {
        saw_invalid = true;
        continue;
      }
      if (r.applied.empty()) continue;
      saw_site = true;
      if (config.require_behavioral_change) {
        bool failed = false;
        bool infra = false;
        auto it = tests_by_id.find(source.instruction_id);
        if (it != tests_by_id.end()) {
          for (const TestArtifact* t : it->second) {
            ExecutionOutcome o =
                sandbox->Execute(sandbox->MakeRequest(AssembleProgram(r.code, t->test_code)));
            if (o.status == ExecStatus::kSandboxError) {
              infra = true;
              break;
            }
            if (o.status != ExecStatus::kPass) {
              failed = true;
              break;
            }
          }
        }
        if (infra) {
          slot.verdict = Verdict::kSandboxError;
          return;
        }
        if (!failed) continue;
      }
      slot.verdict = Verdict::kEmitted;
      slot.mutant.candidate = source;
      slot.mutant.candidate.code = r.code;
      slot.mutant.candidate.raw_completion = r.code;
      slot.mutant.applied = std::move(r.applied);
      slot.mutant.attempts = attempt + 1;
      return;
    }
    slot.verdict = saw_site ? Verdict::kNoChange
                            : (saw_invalid ? Verdict::kInvalid : Verdict::kNoSite);
  });

  SynthResult out;
  out.stats.positives = positives.size();
  for (auto& slot : slots) {
    switch (slot.verdict) {
      case Verdict::kEmitted:
        ++out.stats.emitted;
        out.mutants.push_back(std::move(slot.mutant));
        break;
      case Verdict::kNoSite:
        ++out.stats.skipped_no_site;
        break;
      case Verdict::kInvalid:
        ++out.stats.skipped_invalid;
        break;
      case Verdict::kNoChange:
        ++out.stats.skipped_no_behavior_change;
        break;
      case Verdict::kSandboxError:
        ++out.stats.sandbox_errors;
        break;
    }
  }
  return out;
}

Json ToJson(const AppliedMutation& m) {
  Json j;
  j["rule"] = std::string(RuleName(m.rule));
  j["line"] = m.loc.line;
  j["col"] = m.loc.col;
  return j;
}

Json ToJson(const Mutant& m) {
  Json j = ToJson(m.candidate);
  Json rules = Json::array();
  for (const auto& a : m.applied) rules.push_back(ToJson(a));
  j["applied_rules"] = rules;
  return j;
}

Json ToJson(const SynthStats& s) {
  Json j;
  j["positives"] = s.positives;
  j["emitted"] = s.emitted;
  j["skipped_no_site"] = s.skipped_no_site;
  j["skipped_invalid"] = s.skipped_invalid;
  j["skipped_no_behavior_change"] = s.skipped_no_behavior_change;
  j["sandbox_errors"] = s.sandbox_errors;
  return j;
}

MutationConfig MutationConfigFromJson(const Json& j) {
  MutationConfig c;
  c.p = j.value("p", c.p);
  c.seed = j.value("seed", c.seed);
  if (j.contains("enabled_rules")) {
    c.enabled_rules.clear();
    for (const auto& r : j["enabled_rules"]) c.enabled_rules.insert(RuleFromName(r.get<std::string>()));
  }
  if (j.contains("max_mutations_per_program") && !j["max_mutations_per_program"].is_null()) {
    c.max_mutations_per_program = j["max_mutations_per_program"].get<size_t>();
  }
  c.allow_unknown_types = j.value("allow_unknown_types", c.allow_unknown_types);
  c.require_behavioral_change = j.value("require_behavioral_change", c.require_behavioral_change);
  c.max_attempts = j.value("max_attempts", c.max_attempts);
  if (c.p < 0 || c.p > 1) throw std::invalid_argument("mutation.p must be in [0, 1]");
  if (c.max_attempts < 1) throw std::invalid_argument("mutation.max_attempts must be >= 1");
  return c;
}

}  // namespace plum
