#pragma once

#include <cassert>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dalign/core.hpp"

namespace dalign {

// ---------------------------------------------------------------------------
// Variable references inside conditions.
//
// A condition variable is either bound to a constraint role (activation or
// target), to the guard placeholder of an alternation ordering condition, or
// directly to a concrete event. Role-bound variables turn into event-bound
// ones via instantiate().

enum class VarRole { Activation, Target, Guard, Event };

struct VarRef {
  VarRole role = VarRole::Event;
  EventId event;  // meaningful for role == Event
  std::string var;
  Sort sort = Sort::Int;

  bool operator==(const VarRef& o) const {
    return role == o.role && var == o.var &&
           (role != VarRole::Event || event == o.event);
  }

  std::string key() const {
    switch (role) {
      case VarRole::Activation: return "A." + var;
      case VarRole::Target: return "T." + var;
      case VarRole::Guard: return "G." + var;
      case VarRole::Event: return event.str() + "." + var;
    }
    return var;
  }
};

// Environment for evaluation: resolves a variable reference to a value, or
// nothing when the variable is unbound.
using Env = std::function<std::optional<Value>(const VarRef&)>;

// Three-valued result for evaluation under partial knowledge.
enum class Tri { False, True, Unknown };

inline Tri tri_of(bool b) { return b ? Tri::True : Tri::False; }
inline Tri tri_not(Tri t) {
  if (t == Tri::Unknown) return Tri::Unknown;
  return t == Tri::True ? Tri::False : Tri::True;
}

// ---------------------------------------------------------------------------
// Data condition AST

struct Cond;
struct Term;
using CondPtr = std::shared_ptr<const Cond>;
using TermPtr = std::shared_ptr<const Term>;

enum class CmpOp { Ge, Gt, Le, Lt, Eq, Ne };

inline const char* cmp_text(CmpOp op) {
  switch (op) {
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
    case CmpOp::Le: return "<=";
    case CmpOp::Lt: return "<";
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
  }
  return "?";
}

struct Term {
  enum class Kind { Var, IntConst, RatConst, Add, Neg, Mul, Mod, Ite } kind;
  // Var
  VarRef var;
  // constants
  BigInt int_val;
  BigRat rat_val;
  // Add / Mul / Mod / Neg / Ite operands
  TermPtr lhs, rhs;
  BigRat coeff;    // Mul: coeff * lhs
  BigInt modulus;  // Mod: lhs mod modulus
  CondPtr cond;    // Ite: cond ? lhs : rhs
  Sort sort = Sort::Int;
};

struct Cond {
  enum class Kind { BoolConst, BoolVar, Cmp, StrEq, Not, And, Or, Ite } kind;
  bool bval = false;      // BoolConst
  VarRef var;             // BoolVar; also StrEq operands below
  CmpOp op = CmpOp::Eq;   // Cmp; StrEq uses Eq/Ne
  TermPtr lhs, rhs;       // Cmp
  // StrEq operands: each side is a string variable or an interned constant.
  struct StrAtom {
    bool is_var = false;
    VarRef var;
    std::int64_t code = 0;
  };
  StrAtom sl, sr;
  CondPtr a, b, c;  // Not: a; And/Or: a,b; Ite: a?b:c
};

// --- constructors ---

inline CondPtr mk_true() {
  auto n = std::make_shared<Cond>();
  n->kind = Cond::Kind::BoolConst;
  n->bval = true;
  return n;
}
inline CondPtr mk_false() {
  auto n = std::make_shared<Cond>();
  n->kind = Cond::Kind::BoolConst;
  n->bval = false;
  return n;
}
inline CondPtr mk_bool_var(VarRef v) {
  auto n = std::make_shared<Cond>();
  n->kind = Cond::Kind::BoolVar;
  v.sort = Sort::Bool;
  n->var = std::move(v);
  return n;
}
inline CondPtr mk_cmp(CmpOp op, TermPtr l, TermPtr r) {
  if (!same_base(l->sort, r->sort))
    throw ParseError("comparison between different sorts");
  auto n = std::make_shared<Cond>();
  n->kind = Cond::Kind::Cmp;
  n->op = op;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}
inline CondPtr mk_str_eq(Cond::StrAtom l, Cond::StrAtom r, bool negated = false) {
  auto n = std::make_shared<Cond>();
  n->kind = Cond::Kind::StrEq;
  n->op = negated ? CmpOp::Ne : CmpOp::Eq;
  n->sl = std::move(l);
  n->sr = std::move(r);
  return n;
}
inline CondPtr mk_not(CondPtr c) {
  auto n = std::make_shared<Cond>();
  n->kind = Cond::Kind::Not;
  n->a = std::move(c);
  return n;
}
inline CondPtr mk_and(CondPtr l, CondPtr r) {
  auto n = std::make_shared<Cond>();
  n->kind = Cond::Kind::And;
  n->a = std::move(l);
  n->b = std::move(r);
  return n;
}
inline CondPtr mk_or(CondPtr l, CondPtr r) {
  auto n = std::make_shared<Cond>();
  n->kind = Cond::Kind::Or;
  n->a = std::move(l);
  n->b = std::move(r);
  return n;
}
inline CondPtr mk_implies(CondPtr l, CondPtr r) {
  return mk_or(mk_not(std::move(l)), std::move(r));
}
inline CondPtr mk_cond_ite(CondPtr c, CondPtr t, CondPtr e) {
  auto n = std::make_shared<Cond>();
  n->kind = Cond::Kind::Ite;
  n->a = std::move(c);
  n->b = std::move(t);
  n->c = std::move(e);
  return n;
}

inline TermPtr mk_var(VarRef v) {
  auto n = std::make_shared<Term>();
  n->kind = Term::Kind::Var;
  n->sort = base_sort(v.sort);
  n->var = std::move(v);
  return n;
}
inline TermPtr mk_int(BigInt v) {
  auto n = std::make_shared<Term>();
  n->kind = Term::Kind::IntConst;
  n->int_val = std::move(v);
  n->sort = Sort::Int;
  return n;
}
inline TermPtr mk_rat(BigRat v) {
  auto n = std::make_shared<Term>();
  n->kind = Term::Kind::RatConst;
  n->rat_val = std::move(v);
  n->sort = Sort::Rat;
  return n;
}
inline TermPtr mk_add(TermPtr l, TermPtr r) {
  if (!same_base(l->sort, r->sort)) throw ParseError("sum over different sorts");
  auto n = std::make_shared<Term>();
  n->kind = Term::Kind::Add;
  n->sort = base_sort(l->sort);
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}
inline TermPtr mk_neg(TermPtr t) {
  auto n = std::make_shared<Term>();
  n->kind = Term::Kind::Neg;
  n->sort = base_sort(t->sort);
  n->lhs = std::move(t);
  return n;
}
inline TermPtr mk_sub(TermPtr l, TermPtr r) { return mk_add(std::move(l), mk_neg(std::move(r))); }
inline TermPtr mk_mul(BigRat coeff, TermPtr t) {
  if (base_sort(t->sort) == Sort::Int && denominator(coeff) != 1)
    throw ParseError("non-integer coefficient on integer term");
  auto n = std::make_shared<Term>();
  n->kind = Term::Kind::Mul;
  n->sort = base_sort(t->sort);
  n->coeff = std::move(coeff);
  n->lhs = std::move(t);
  return n;
}
inline TermPtr mk_mod(TermPtr t, BigInt m) {
  if (base_sort(t->sort) != Sort::Int) throw ParseError("mod on non-integer term");
  if (m <= 0) throw ParseError("mod by non-positive constant");
  auto n = std::make_shared<Term>();
  n->kind = Term::Kind::Mod;
  n->sort = Sort::Int;
  n->lhs = std::move(t);
  n->modulus = std::move(m);
  return n;
}
inline TermPtr mk_term_ite(CondPtr c, TermPtr t, TermPtr e) {
  if (!same_base(t->sort, e->sort)) throw ParseError("ite branches of different sorts");
  auto n = std::make_shared<Term>();
  n->kind = Term::Kind::Ite;
  n->sort = base_sort(t->sort);
  n->cond = std::move(c);
  n->lhs = std::move(t);
  n->rhs = std::move(e);
  return n;
}

// ---------------------------------------------------------------------------
// Evaluation

inline Tri eval3(const CondPtr& c, const Env& env);

inline std::optional<BigRat> eval_term3(const TermPtr& t, const Env& env) {
  switch (t->kind) {
    case Term::Kind::Var: {
      auto v = env(t->var);
      if (!v) return std::nullopt;
      if (!is_numeric(v->sort())) throw EvalError("numeric variable bound to non-numeric value: " + t->var.key());
      return v->numeric();
    }
    case Term::Kind::IntConst: return BigRat(t->int_val);
    case Term::Kind::RatConst: return t->rat_val;
    case Term::Kind::Add: {
      auto l = eval_term3(t->lhs, env), r = eval_term3(t->rhs, env);
      if (!l || !r) return std::nullopt;
      return *l + *r;
    }
    case Term::Kind::Neg: {
      auto l = eval_term3(t->lhs, env);
      if (!l) return std::nullopt;
      return -*l;
    }
    case Term::Kind::Mul: {
      auto l = eval_term3(t->lhs, env);
      if (!l) return std::nullopt;
      return t->coeff * *l;
    }
    case Term::Kind::Mod: {
      auto l = eval_term3(t->lhs, env);
      if (!l) return std::nullopt;
      BigInt n = numerator(*l);  // integer term by construction
      BigInt m = t->modulus;
      BigInt r = n % m;
      if (r < 0) r += m;  // SMT-LIB mod is non-negative for positive modulus
      return BigRat(r);
    }
    case Term::Kind::Ite: {
      Tri c = eval3(t->cond, env);
      if (c == Tri::Unknown) {
        // Both branches agreeing still yields a value.
        auto l = eval_term3(t->lhs, env), r = eval_term3(t->rhs, env);
        if (l && r && *l == *r) return l;
        return std::nullopt;
      }
      return eval_term3(c == Tri::True ? t->lhs : t->rhs, env);
    }
  }
  return std::nullopt;
}

inline Tri eval3(const CondPtr& c, const Env& env) {
  switch (c->kind) {
    case Cond::Kind::BoolConst: return tri_of(c->bval);
    case Cond::Kind::BoolVar: {
      auto v = env(c->var);
      if (!v) return Tri::Unknown;
      if (v->sort() != Sort::Bool) throw EvalError("boolean variable bound to non-boolean value: " + c->var.key());
      return tri_of(v->as_bool());
    }
    case Cond::Kind::Cmp: {
      auto l = eval_term3(c->lhs, env), r = eval_term3(c->rhs, env);
      if (!l || !r) return Tri::Unknown;
      switch (c->op) {
        case CmpOp::Ge: return tri_of(*l >= *r);
        case CmpOp::Gt: return tri_of(*l > *r);
        case CmpOp::Le: return tri_of(*l <= *r);
        case CmpOp::Lt: return tri_of(*l < *r);
        case CmpOp::Eq: return tri_of(*l == *r);
        case CmpOp::Ne: return tri_of(*l != *r);
      }
      return Tri::Unknown;
    }
    case Cond::Kind::StrEq: {
      auto side = [&](const Cond::StrAtom& s) -> std::optional<std::int64_t> {
        if (!s.is_var) return s.code;
        auto v = env(s.var);
        if (!v) return std::nullopt;
        if (v->sort() != Sort::String) throw EvalError("string variable bound to non-string value: " + s.var.key());
        return v->as_string_code();
      };
      auto l = side(c->sl), r = side(c->sr);
      if (!l || !r) return Tri::Unknown;
      bool eq = *l == *r;
      return tri_of(c->op == CmpOp::Eq ? eq : !eq);
    }
    case Cond::Kind::Not: return tri_not(eval3(c->a, env));
    case Cond::Kind::And: {
      Tri l = eval3(c->a, env);
      if (l == Tri::False) return Tri::False;
      Tri r = eval3(c->b, env);
      if (r == Tri::False) return Tri::False;
      if (l == Tri::True && r == Tri::True) return Tri::True;
      return Tri::Unknown;
    }
    case Cond::Kind::Or: {
      Tri l = eval3(c->a, env);
      if (l == Tri::True) return Tri::True;
      Tri r = eval3(c->b, env);
      if (r == Tri::True) return Tri::True;
      if (l == Tri::False && r == Tri::False) return Tri::False;
      return Tri::Unknown;
    }
    case Cond::Kind::Ite: {
      Tri g = eval3(c->a, env);
      if (g == Tri::True) return eval3(c->b, env);
      if (g == Tri::False) return eval3(c->c, env);
      Tri t = eval3(c->b, env), e = eval3(c->c, env);
      if (t == e) return t;
      return Tri::Unknown;
    }
  }
  return Tri::Unknown;
}

// Total evaluation; an unbound variable is an error.
inline bool eval_data(const CondPtr& c, const Env& env) {
  bool missing = false;
  std::string who;
  Env strict = [&](const VarRef& v) -> std::optional<Value> {
    auto r = env(v);
    if (!r && !missing) {
      missing = true;
      who = v.key();
    }
    return r;
  };
  Tri t = eval3(c, strict);
  if (t == Tri::Unknown || missing) {
    if (t != Tri::Unknown) return t == Tri::True;  // short-circuit hid the gap
    throw EvalError("unbound variable in condition: " + who);
  }
  return t == Tri::True;
}

// Evaluation convention used by the trace oracle: a condition that cannot be
// fully evaluated counts as not satisfied.
inline bool eval_or_false(const CondPtr& c, const Env& env) {
  return eval3(c, env) == Tri::True;
}

// ---------------------------------------------------------------------------
// Substitution

// Replaces role-bound variables with event-bound ones. Activation variables
// require `act`, target variables require `tgt`.
inline VarRef instantiate_ref(const VarRef& v, const std::optional<EventId>& act,
                              const std::optional<EventId>& tgt) {
  switch (v.role) {
    case VarRole::Activation:
      if (!act) throw EvalError("activation variable with no activation event: " + v.key());
      return VarRef{VarRole::Event, *act, v.var, v.sort};
    case VarRole::Target:
      if (!tgt) throw EvalError("target variable with no target event: " + v.key());
      return VarRef{VarRole::Event, *tgt, v.var, v.sort};
    default:
      return v;
  }
}

inline TermPtr instantiate_term(const TermPtr& t, const std::optional<EventId>& act,
                                const std::optional<EventId>& tgt);

inline CondPtr instantiate(const CondPtr& c, const std::optional<EventId>& act,
                           const std::optional<EventId>& tgt) {
  switch (c->kind) {
    case Cond::Kind::BoolConst: return c;
    case Cond::Kind::BoolVar: return mk_bool_var(instantiate_ref(c->var, act, tgt));
    case Cond::Kind::Cmp:
      return mk_cmp(c->op, instantiate_term(c->lhs, act, tgt), instantiate_term(c->rhs, act, tgt));
    case Cond::Kind::StrEq: {
      auto sub = [&](Cond::StrAtom s) {
        if (s.is_var) s.var = instantiate_ref(s.var, act, tgt);
        return s;
      };
      return mk_str_eq(sub(c->sl), sub(c->sr), c->op == CmpOp::Ne);
    }
    case Cond::Kind::Not: return mk_not(instantiate(c->a, act, tgt));
    case Cond::Kind::And: return mk_and(instantiate(c->a, act, tgt), instantiate(c->b, act, tgt));
    case Cond::Kind::Or: return mk_or(instantiate(c->a, act, tgt), instantiate(c->b, act, tgt));
    case Cond::Kind::Ite:
      return mk_cond_ite(instantiate(c->a, act, tgt), instantiate(c->b, act, tgt),
                         instantiate(c->c, act, tgt));
  }
  return c;
}

inline TermPtr instantiate_term(const TermPtr& t, const std::optional<EventId>& act,
                                const std::optional<EventId>& tgt) {
  switch (t->kind) {
    case Term::Kind::Var: return mk_var(instantiate_ref(t->var, act, tgt));
    case Term::Kind::IntConst:
    case Term::Kind::RatConst: return t;
    case Term::Kind::Add:
      return mk_add(instantiate_term(t->lhs, act, tgt), instantiate_term(t->rhs, act, tgt));
    case Term::Kind::Neg: return mk_neg(instantiate_term(t->lhs, act, tgt));
    case Term::Kind::Mul: return mk_mul(t->coeff, instantiate_term(t->lhs, act, tgt));
    case Term::Kind::Mod: return mk_mod(instantiate_term(t->lhs, act, tgt), t->modulus);
    case Term::Kind::Ite:
      return mk_term_ite(instantiate(t->cond, act, tgt), instantiate_term(t->lhs, act, tgt),
                         instantiate_term(t->rhs, act, tgt));
  }
  return t;
}

// Guard substitution for alternation conditions: guard-labelled variables get
// bound to a concrete intervening event.
inline CondPtr bind_guard(const CondPtr& c, EventId e);

inline VarRef bind_guard_ref(const VarRef& v, EventId e) {
  if (v.role == VarRole::Guard) return VarRef{VarRole::Event, e, v.var, v.sort};
  return v;
}

inline TermPtr bind_guard_term(const TermPtr& t, EventId e) {
  switch (t->kind) {
    case Term::Kind::Var: return mk_var(bind_guard_ref(t->var, e));
    case Term::Kind::IntConst:
    case Term::Kind::RatConst: return t;
    case Term::Kind::Add: return mk_add(bind_guard_term(t->lhs, e), bind_guard_term(t->rhs, e));
    case Term::Kind::Neg: return mk_neg(bind_guard_term(t->lhs, e));
    case Term::Kind::Mul: return mk_mul(t->coeff, bind_guard_term(t->lhs, e));
    case Term::Kind::Mod: return mk_mod(bind_guard_term(t->lhs, e), t->modulus);
    case Term::Kind::Ite:
      return mk_term_ite(bind_guard(t->cond, e), bind_guard_term(t->lhs, e),
                         bind_guard_term(t->rhs, e));
  }
  return t;
}

inline CondPtr bind_guard(const CondPtr& c, EventId e) {
  switch (c->kind) {
    case Cond::Kind::BoolConst: return c;
    case Cond::Kind::BoolVar: return mk_bool_var(bind_guard_ref(c->var, e));
    case Cond::Kind::Cmp: return mk_cmp(c->op, bind_guard_term(c->lhs, e), bind_guard_term(c->rhs, e));
    case Cond::Kind::StrEq: {
      auto sub = [&](Cond::StrAtom s) {
        if (s.is_var) s.var = bind_guard_ref(s.var, e);
        return s;
      };
      return mk_str_eq(sub(c->sl), sub(c->sr), c->op == CmpOp::Ne);
    }
    case Cond::Kind::Not: return mk_not(bind_guard(c->a, e));
    case Cond::Kind::And: return mk_and(bind_guard(c->a, e), bind_guard(c->b, e));
    case Cond::Kind::Or: return mk_or(bind_guard(c->a, e), bind_guard(c->b, e));
    case Cond::Kind::Ite:
      return mk_cond_ite(bind_guard(c->a, e), bind_guard(c->b, e), bind_guard(c->c, e));
  }
  return c;
}

// Relabels activation/target-bound variables (used when evaluating one parsed
// condition against events in swapped roles is required by tests).
inline void collect_vars(const CondPtr& c, std::vector<VarRef>& out);

inline void collect_vars_term(const TermPtr& t, std::vector<VarRef>& out) {
  switch (t->kind) {
    case Term::Kind::Var: out.push_back(t->var); return;
    case Term::Kind::IntConst:
    case Term::Kind::RatConst: return;
    case Term::Kind::Add:
      collect_vars_term(t->lhs, out);
      collect_vars_term(t->rhs, out);
      return;
    case Term::Kind::Neg:
    case Term::Kind::Mul: collect_vars_term(t->lhs, out); return;
    case Term::Kind::Mod: collect_vars_term(t->lhs, out); return;
    case Term::Kind::Ite:
      collect_vars(t->cond, out);
      collect_vars_term(t->lhs, out);
      collect_vars_term(t->rhs, out);
      return;
  }
}

inline void collect_vars(const CondPtr& c, std::vector<VarRef>& out) {
  switch (c->kind) {
    case Cond::Kind::BoolConst: return;
    case Cond::Kind::BoolVar: out.push_back(c->var); return;
    case Cond::Kind::Cmp:
      collect_vars_term(c->lhs, out);
      collect_vars_term(c->rhs, out);
      return;
    case Cond::Kind::StrEq:
      if (c->sl.is_var) out.push_back(c->sl.var);
      if (c->sr.is_var) out.push_back(c->sr.var);
      return;
    case Cond::Kind::Not: collect_vars(c->a, out); return;
    case Cond::Kind::And:
    case Cond::Kind::Or:
      collect_vars(c->a, out);
      collect_vars(c->b, out);
      return;
    case Cond::Kind::Ite:
      collect_vars(c->a, out);
      collect_vars(c->b, out);
      collect_vars(c->c, out);
      return;
  }
}

inline bool is_trivially_true(const CondPtr& c) {
  return c->kind == Cond::Kind::BoolConst && c->bval;
}
inline bool is_trivially_false(const CondPtr& c) {
  return c->kind == Cond::Kind::BoolConst && !c->bval;
}

// ---------------------------------------------------------------------------
// Canonical printing (also used as structural fingerprint)

inline std::string print_canonical(const CondPtr& c);

inline std::string print_canonical_term(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Var: return t->var.key();
    case Term::Kind::IntConst: return t->int_val.str();
    case Term::Kind::RatConst: return t->rat_val.str();
    case Term::Kind::Add:
      return "(+ " + print_canonical_term(t->lhs) + " " + print_canonical_term(t->rhs) + ")";
    case Term::Kind::Neg: return "(- " + print_canonical_term(t->lhs) + ")";
    case Term::Kind::Mul:
      return "(* " + t->coeff.str() + " " + print_canonical_term(t->lhs) + ")";
    case Term::Kind::Mod:
      return "(mod " + print_canonical_term(t->lhs) + " " + t->modulus.str() + ")";
    case Term::Kind::Ite:
      return "(ite " + print_canonical(t->cond) + " " + print_canonical_term(t->lhs) + " " +
             print_canonical_term(t->rhs) + ")";
  }
  return "?";
}

inline std::string print_canonical(const CondPtr& c) {
  switch (c->kind) {
    case Cond::Kind::BoolConst: return c->bval ? "true" : "false";
    case Cond::Kind::BoolVar: return c->var.key();
    case Cond::Kind::Cmp:
      return "(" + std::string(cmp_text(c->op)) + " " + print_canonical_term(c->lhs) + " " +
             print_canonical_term(c->rhs) + ")";
    case Cond::Kind::StrEq: {
      auto side = [](const Cond::StrAtom& s) {
        return s.is_var ? s.var.key() : "$" + std::to_string(s.code);
      };
      return "(" + std::string(c->op == CmpOp::Eq ? "s== " : "s!= ") + side(c->sl) + " " +
             side(c->sr) + ")";
    }
    case Cond::Kind::Not: return "(not " + print_canonical(c->a) + ")";
    case Cond::Kind::And:
      return "(and " + print_canonical(c->a) + " " + print_canonical(c->b) + ")";
    case Cond::Kind::Or:
      return "(or " + print_canonical(c->a) + " " + print_canonical(c->b) + ")";
    case Cond::Kind::Ite:
      return "(ite " + print_canonical(c->a) + " " + print_canonical(c->b) + " " +
             print_canonical(c->c) + ")";
  }
  return "?";
}

inline bool structurally_equal(const CondPtr& a, const CondPtr& b) {
  return print_canonical(a) == print_canonical(b);
}

// ---------------------------------------------------------------------------
// Ordering conditions

struct Ord;
using OrdPtr = std::shared_ptr<const Ord>;

struct Ord {
  enum class Kind { True, Before, DirectlyBefore, First, Last, AltBefore, Not } kind;
  EventId a, b;          // Before / DirectlyBefore / AltBefore endpoints; First/Last use a
  std::string activity;  // AltBefore: forbidden intervening activity
  CondPtr guard;         // AltBefore: guard over VarRole::Guard variables
  OrdPtr inner;          // Not
};

inline OrdPtr mk_ord_true() {
  auto n = std::make_shared<Ord>();
  n->kind = Ord::Kind::True;
  return n;
}
inline OrdPtr mk_before(EventId a, EventId b) {
  auto n = std::make_shared<Ord>();
  n->kind = Ord::Kind::Before;
  n->a = a;
  n->b = b;
  return n;
}
inline OrdPtr mk_directly_before(EventId a, EventId b) {
  auto n = std::make_shared<Ord>();
  n->kind = Ord::Kind::DirectlyBefore;
  n->a = a;
  n->b = b;
  return n;
}
inline OrdPtr mk_first(EventId e) {
  auto n = std::make_shared<Ord>();
  n->kind = Ord::Kind::First;
  n->a = e;
  return n;
}
inline OrdPtr mk_last(EventId e) {
  auto n = std::make_shared<Ord>();
  n->kind = Ord::Kind::Last;
  n->a = e;
  return n;
}
inline OrdPtr mk_alt_before(EventId a, EventId b, std::string activity, CondPtr guard) {
  auto n = std::make_shared<Ord>();
  n->kind = Ord::Kind::AltBefore;
  n->a = a;
  n->b = b;
  n->activity = std::move(activity);
  n->guard = std::move(guard);
  return n;
}
inline OrdPtr mk_ord_not(OrdPtr o) {
  auto n = std::make_shared<Ord>();
  n->kind = Ord::Kind::Not;
  n->inner = std::move(o);
  return n;
}

inline std::string print_canonical_ord(const OrdPtr& o) {
  switch (o->kind) {
    case Ord::Kind::True: return "otrue";
    case Ord::Kind::Before: return "(< " + o->a.str() + " " + o->b.str() + ")";
    case Ord::Kind::DirectlyBefore: return "(<. " + o->a.str() + " " + o->b.str() + ")";
    case Ord::Kind::First: return "(first " + o->a.str() + ")";
    case Ord::Kind::Last: return "(last " + o->a.str() + ")";
    case Ord::Kind::AltBefore:
      return "(<alt " + o->a.str() + " " + o->b.str() + " " + o->activity + " " +
             print_canonical(o->guard) + ")";
    case Ord::Kind::Not: return "(not " + print_canonical_ord(o->inner) + ")";
  }
  return "?";
}

inline void ord_events(const OrdPtr& o, std::vector<EventId>& out) {
  switch (o->kind) {
    case Ord::Kind::True: return;
    case Ord::Kind::Before:
    case Ord::Kind::DirectlyBefore:
    case Ord::Kind::AltBefore:
      out.push_back(o->a);
      out.push_back(o->b);
      return;
    case Ord::Kind::First:
    case Ord::Kind::Last: out.push_back(o->a); return;
    case Ord::Kind::Not: ord_events(o->inner, out); return;
  }
}

// ---------------------------------------------------------------------------
// Interpreter over a concrete linear order.
//
// `order` is the sequence of all events of the state; `values` resolves a
// concrete event's attribute. Used by the enumeration oracle in tests and by
// the engine's evaluation shortcut on fully decided states.

struct ConcreteWorld {
  std::vector<Event> order;  // events in their linear order

  int position_of(EventId id) const {
    for (std::size_t i = 0; i < order.size(); ++i)
      if (order[i].id == id) return static_cast<int>(i);
    return -1;
  }

  Env env_for(const Event& e) const {
    return [&e](const VarRef& v) -> std::optional<Value> {
      if (v.role != VarRole::Event) throw EvalError("unresolved role variable: " + v.key());
      return std::nullopt;  // placeholder; not used directly
    };
  }

  std::optional<Value> value_of(EventId id, const std::string& var) const {
    int p = position_of(id);
    if (p < 0) return std::nullopt;
    return order[static_cast<std::size_t>(p)].value_of(var);
  }

  Env event_env() const {
    return [this](const VarRef& v) -> std::optional<Value> {
      if (v.role != VarRole::Event) throw EvalError("unresolved role variable: " + v.key());
      return value_of(v.event, v.var);
    };
  }
};

inline bool ord_satisfied(const OrdPtr& o, const ConcreteWorld& w) {
  switch (o->kind) {
    case Ord::Kind::True: return true;
    case Ord::Kind::Before: {
      int pa = w.position_of(o->a), pb = w.position_of(o->b);
      return pa >= 0 && pb >= 0 && pa < pb;
    }
    case Ord::Kind::DirectlyBefore: {
      int pa = w.position_of(o->a), pb = w.position_of(o->b);
      return pa >= 0 && pb == pa + 1;
    }
    case Ord::Kind::First: return w.position_of(o->a) == 0;
    case Ord::Kind::Last:
      return w.position_of(o->a) == static_cast<int>(w.order.size()) - 1;
    case Ord::Kind::AltBefore: {
      int pa = w.position_of(o->a), pb = w.position_of(o->b);
      if (pa < 0 || pb < 0 || pa >= pb) return false;
      Env env = w.event_env();
      for (int k = pa + 1; k < pb; ++k) {
        const Event& mid = w.order[static_cast<std::size_t>(k)];
        if (mid.activity != o->activity) continue;
        CondPtr g = bind_guard(o->guard, mid.id);
        if (eval_or_false(g, env)) return false;
      }
      return true;
    }
    case Ord::Kind::Not: return !ord_satisfied(o->inner, w);
  }
  return false;
}

}  // namespace dalign
