#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dalign/conditions.hpp"
#include "dalign/core.hpp"

namespace dalign {

// ---------------------------------------------------------------------------
// Template catalog

enum class TemplateKind {
  Existence,
  Absence,
  Init,
  End,
  Choice,
  RespondedExistence,
  Response,
  AlternateResponse,
  ChainResponse,
  Precedence,
  AlternatePrecedence,
  ChainPrecedence,
  NotResponse,
  NotRespondedExistence,
  NotChainResponse,
};

inline const std::vector<std::pair<TemplateKind, const char*>>& template_names() {
  static const std::vector<std::pair<TemplateKind, const char*>> names = {
      {TemplateKind::Existence, "Existence"},
      {TemplateKind::Absence, "Absence"},
      {TemplateKind::Init, "Init"},
      {TemplateKind::End, "End"},
      {TemplateKind::Choice, "Choice"},
      {TemplateKind::RespondedExistence, "RespondedExistence"},
      {TemplateKind::Response, "Response"},
      {TemplateKind::AlternateResponse, "AlternateResponse"},
      {TemplateKind::ChainResponse, "ChainResponse"},
      {TemplateKind::Precedence, "Precedence"},
      {TemplateKind::AlternatePrecedence, "AlternatePrecedence"},
      {TemplateKind::ChainPrecedence, "ChainPrecedence"},
      {TemplateKind::NotResponse, "NotResponse"},
      {TemplateKind::NotRespondedExistence, "NotRespondedExistence"},
      {TemplateKind::NotChainResponse, "NotChainResponse"},
  };
  return names;
}

inline std::string template_name(TemplateKind k) {
  for (auto& [kind, name] : template_names())
    if (kind == k) return name;
  return "?";
}

inline std::optional<TemplateKind> template_from_name(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; }),
          s.end());
  for (auto& [kind, name] : template_names()) {
    std::string n = name;
    if (s == n) return kind;
  }
  return std::nullopt;
}

inline bool is_response_family(TemplateKind k) {
  return k == TemplateKind::RespondedExistence || k == TemplateKind::Response ||
         k == TemplateKind::AlternateResponse || k == TemplateKind::ChainResponse;
}
inline bool is_precedence_family(TemplateKind k) {
  return k == TemplateKind::Precedence || k == TemplateKind::AlternatePrecedence ||
         k == TemplateKind::ChainPrecedence;
}
inline bool is_negation_family(TemplateKind k) {
  return k == TemplateKind::NotResponse || k == TemplateKind::NotRespondedExistence ||
         k == TemplateKind::NotChainResponse;
}
inline bool is_unary(TemplateKind k) {
  return k == TemplateKind::Existence || k == TemplateKind::Absence ||
         k == TemplateKind::Init || k == TemplateKind::End;
}
inline bool has_count(TemplateKind k) {
  return k == TemplateKind::Existence || k == TemplateKind::Absence;
}
// Templates whose instances have an activation role.
inline bool has_activation(TemplateKind k) {
  return is_response_family(k) || is_precedence_family(k) || is_negation_family(k);
}

// ---------------------------------------------------------------------------
// Constraints with data

struct DeclareConstraint {
  TemplateKind kind = TemplateKind::Existence;
  std::string activity_a;  // template variable A
  std::string activity_b;  // template variable B (empty for unary templates)
  int count = 1;           // n for Existence / Absence
  CondPtr act = mk_true();
  CondPtr tgt = mk_true();
  CondPtr cor = mk_true();

  // In response and negation templates A is the activation and B the target;
  // in precedence templates B is the activation.
  std::string activation_activity() const {
    if (is_response_family(kind) || is_negation_family(kind)) return activity_a;
    if (is_precedence_family(kind)) return activity_b;
    return {};
  }
  std::string target_activity() const {
    if (is_response_family(kind) || is_negation_family(kind)) return activity_b;
    if (is_precedence_family(kind)) return activity_a;
    return activity_a;  // unary templates target A
  }
  std::vector<std::string> target_activities() const {
    if (kind == TemplateKind::Choice) return {activity_a, activity_b};
    return {target_activity()};
  }

  std::string label() const {
    std::string s = template_name(kind) + "[";
    if (has_count(kind)) s += std::to_string(count) + ", ";
    s += activity_a;
    if (!activity_b.empty()) s += ", " + activity_b;
    return s + "]";
  }
};

// Turns the activation condition into the guard of an alternation ordering
// condition: activation-bound variables become guard-bound placeholders.
inline CondPtr act_condition_as_guard(const CondPtr& c) {
  std::vector<VarRef> vars;
  collect_vars(c, vars);
  // Rebuild with Activation -> Guard. Reuse instantiate machinery via a
  // manual walk: cheapest is to round-trip through bind: instantiate demands
  // events, so walk explicitly.
  struct Walker {
    static VarRef ref(const VarRef& v) {
      if (v.role == VarRole::Activation) return VarRef{VarRole::Guard, {}, v.var, v.sort};
      return v;
    }
    static TermPtr term(const TermPtr& t) {
      switch (t->kind) {
        case Term::Kind::Var: return mk_var(ref(t->var));
        case Term::Kind::IntConst:
        case Term::Kind::RatConst: return t;
        case Term::Kind::Add: return mk_add(term(t->lhs), term(t->rhs));
        case Term::Kind::Neg: return mk_neg(term(t->lhs));
        case Term::Kind::Mul: return mk_mul(t->coeff, term(t->lhs));
        case Term::Kind::Mod: return mk_mod(term(t->lhs), t->modulus);
        case Term::Kind::Ite: return mk_term_ite(cond(t->cond), term(t->lhs), term(t->rhs));
      }
      return t;
    }
    static CondPtr cond(const CondPtr& c) {
      switch (c->kind) {
        case Cond::Kind::BoolConst: return c;
        case Cond::Kind::BoolVar: return mk_bool_var(ref(c->var));
        case Cond::Kind::Cmp: return mk_cmp(c->op, term(c->lhs), term(c->rhs));
        case Cond::Kind::StrEq: {
          auto sub = [](Cond::StrAtom s) {
            if (s.is_var) s.var = ref(s.var);
            return s;
          };
          return mk_str_eq(sub(c->sl), sub(c->sr), c->op == CmpOp::Ne);
        }
        case Cond::Kind::Not: return mk_not(cond(c->a));
        case Cond::Kind::And: return mk_and(cond(c->a), cond(c->b));
        case Cond::Kind::Or: return mk_or(cond(c->a), cond(c->b));
        case Cond::Kind::Ite: return mk_cond_ite(cond(c->a), cond(c->b), cond(c->c));
      }
      return c;
    }
  };
  return Walker::cond(c);
}

// Ordering condition a constraint imposes between an activation event and a
// target event (binary templates), or on a single target event (Init / End).
inline OrdPtr ord(const DeclareConstraint& psi, EventId act, std::optional<EventId> tgt) {
  switch (psi.kind) {
    case TemplateKind::Response: return mk_before(act, *tgt);
    case TemplateKind::Precedence: return mk_before(*tgt, act);
    case TemplateKind::ChainResponse: return mk_directly_before(act, *tgt);
    case TemplateKind::ChainPrecedence: return mk_directly_before(*tgt, act);
    case TemplateKind::NotResponse: return mk_ord_not(mk_before(act, *tgt));
    case TemplateKind::NotChainResponse: return mk_ord_not(mk_directly_before(act, *tgt));
    case TemplateKind::AlternateResponse:
      return mk_alt_before(act, *tgt, psi.activation_activity(),
                           act_condition_as_guard(psi.act));
    case TemplateKind::AlternatePrecedence:
      return mk_alt_before(*tgt, act, psi.activation_activity(),
                           act_condition_as_guard(psi.act));
    default: return mk_ord_true();
  }
}

// Unary form: Init / End constrain the target's position, everything else is
// unconstrained.
inline OrdPtr ord_unary(const DeclareConstraint& psi, EventId target) {
  if (psi.kind == TemplateKind::Init) return mk_first(target);
  if (psi.kind == TemplateKind::End) return mk_last(target);
  return mk_ord_true();
}

// The prohibited ordering pattern of a negation template: the shape an
// (activation, target) pair must not realize. NotRespondedExistence forbids
// mere co-occurrence, so its pattern carries no ordering.
inline OrdPtr negation_pattern(const DeclareConstraint& psi, EventId act, EventId tgt) {
  switch (psi.kind) {
    case TemplateKind::NotResponse: return mk_before(act, tgt);
    case TemplateKind::NotChainResponse: return mk_directly_before(act, tgt);
    default: return mk_ord_true();
  }
}

// ---------------------------------------------------------------------------
// Specification

struct DeclareModel {
  std::vector<std::string> activities;
  std::vector<VarDecl> variables;  // always includes the timestamp variable
  // Payload signature per activity: which variables its events carry.
  std::map<std::string, std::vector<std::string>> payload;
  std::vector<DeclareConstraint> constraints;

  std::optional<Sort> var_sort(const std::string& name) const {
    for (auto& v : variables)
      if (v.name == name) return v.sort;
    return std::nullopt;
  }

  bool has_activity(const std::string& a) const {
    return std::find(activities.begin(), activities.end(), a) != activities.end();
  }

  // Variables expected on synthesized events of an activity: the declared
  // payload plus anything the constraints mention for that activity's roles.
  std::vector<std::string> payload_of(const std::string& activity) const {
    std::set<std::string> vars;
    auto it = payload.find(activity);
    if (it != payload.end()) vars.insert(it->second.begin(), it->second.end());
    for (auto& psi : constraints) {
      std::vector<VarRef> refs;
      collect_vars(psi.act, refs);
      collect_vars(psi.tgt, refs);
      collect_vars(psi.cor, refs);
      bool as_act = psi.activation_activity() == activity;
      auto tas = psi.target_activities();
      bool as_tgt = std::find(tas.begin(), tas.end(), activity) != tas.end();
      for (auto& r : refs) {
        if (r.var == kTimestampVar) continue;
        if ((r.role == VarRole::Activation && as_act) ||
            (r.role == VarRole::Target && as_tgt) || (r.role == VarRole::Guard && as_act))
          vars.insert(r.var);
      }
    }
    return {vars.begin(), vars.end()};
  }
};

inline DeclareModel make_model(std::vector<std::string> activities,
                               std::vector<VarDecl> variables,
                               std::vector<DeclareConstraint> constraints) {
  DeclareModel m;
  m.activities = std::move(activities);
  m.variables = std::move(variables);
  bool has_ts = false;
  for (auto& v : m.variables)
    if (v.name == kTimestampVar) has_ts = true;
  if (!has_ts) m.variables.push_back({kTimestampVar, Sort::Timestamp});
  m.constraints = std::move(constraints);
  return m;
}

inline void validate_model(const DeclareModel& m) {
  for (auto& psi : m.constraints) {
    if (!m.has_activity(psi.activity_a))
      throw ParseError("constraint " + psi.label() + " uses undeclared activity " + psi.activity_a);
    if (!is_unary(psi.kind)) {
      if (!m.has_activity(psi.activity_b))
        throw ParseError("constraint " + psi.label() + " uses undeclared activity " +
                         psi.activity_b);
      if (psi.activity_a == psi.activity_b)
        throw ParseError("constraint " + psi.label() +
                         ": activation and target activity must differ");
    }
    if (has_count(psi.kind) && psi.count < 1)
      throw ParseError("constraint " + psi.label() + ": count must be at least 1");
    if (!has_activation(psi.kind)) {
      if (!is_trivially_true(psi.act) || !is_trivially_true(psi.cor))
        throw ParseError("constraint " + psi.label() +
                         ": only the target condition may be set on this template");
    }
  }
}

// ---------------------------------------------------------------------------
// Trace semantics (the ground-truth oracle)

namespace detail {

inline Env pair_env(const Event* act, const Event* tgt) {
  return [act, tgt](const VarRef& v) -> std::optional<Value> {
    switch (v.role) {
      case VarRole::Activation:
        if (!act) return std::nullopt;
        return act->value_of(v.var);
      case VarRole::Target:
        if (!tgt) return std::nullopt;
        return tgt->value_of(v.var);
      default: return std::nullopt;
    }
  };
}

inline bool activates(const DeclareConstraint& psi, const Event& e) {
  return eval_or_false(psi.act, pair_env(&e, nullptr));
}

inline bool target_matches(const DeclareConstraint& psi, const Event& act, const Event& tgt) {
  Env env = pair_env(&act, &tgt);
  return eval_or_false(psi.tgt, env) && eval_or_false(psi.cor, env);
}

inline bool target_only_matches(const DeclareConstraint& psi, const Event& tgt) {
  return eval_or_false(psi.tgt, pair_env(nullptr, &tgt));
}

}  // namespace detail

// Satisfaction of one constraint by a complete trace. Response, precedence
// and negation templates quantify over every activation event; a condition
// referencing an unassigned attribute counts as not satisfied for that event.
inline bool trace_satisfies(const DeclareConstraint& psi, const Trace& trace) {
  using detail::activates;
  using detail::target_matches;
  using detail::target_only_matches;
  const auto& ev = trace.events;
  const int m = static_cast<int>(ev.size());

  switch (psi.kind) {
    case TemplateKind::Existence: {
      int hits = 0;
      for (auto& e : ev)
        if (e.activity == psi.activity_a && target_only_matches(psi, e)) ++hits;
      return hits >= psi.count;
    }
    case TemplateKind::Absence: {
      DeclareConstraint ex = psi;
      ex.kind = TemplateKind::Existence;
      return !trace_satisfies(ex, trace);
    }
    case TemplateKind::Init:
      return m > 0 && ev[0].activity == psi.activity_a && target_only_matches(psi, ev[0]);
    case TemplateKind::End:
      return m > 0 && ev[static_cast<std::size_t>(m - 1)].activity == psi.activity_a &&
             target_only_matches(psi, ev[static_cast<std::size_t>(m - 1)]);
    case TemplateKind::Choice:
      for (auto& e : ev)
        if ((e.activity == psi.activity_a || e.activity == psi.activity_b) &&
            target_only_matches(psi, e))
          return true;
      return false;
    case TemplateKind::RespondedExistence:
      for (int i = 0; i < m; ++i) {
        const Event& a = ev[static_cast<std::size_t>(i)];
        if (a.activity != psi.activity_a || !activates(psi, a)) continue;
        bool ok = false;
        for (int j = 0; j < m && !ok; ++j)
          if (j != i && ev[static_cast<std::size_t>(j)].activity == psi.activity_b &&
              target_matches(psi, a, ev[static_cast<std::size_t>(j)]))
            ok = true;
        if (!ok) return false;
      }
      return true;
    case TemplateKind::Response:
      for (int i = 0; i < m; ++i) {
        const Event& a = ev[static_cast<std::size_t>(i)];
        if (a.activity != psi.activity_a || !activates(psi, a)) continue;
        bool ok = false;
        for (int j = i + 1; j < m && !ok; ++j)
          if (ev[static_cast<std::size_t>(j)].activity == psi.activity_b &&
              target_matches(psi, a, ev[static_cast<std::size_t>(j)]))
            ok = true;
        if (!ok) return false;
      }
      return true;
    case TemplateKind::AlternateResponse:
      for (int i = 0; i < m; ++i) {
        const Event& a = ev[static_cast<std::size_t>(i)];
        if (a.activity != psi.activity_a || !activates(psi, a)) continue;
        bool ok = false;
        for (int j = i + 1; j < m && !ok; ++j) {
          if (ev[static_cast<std::size_t>(j)].activity != psi.activity_b ||
              !target_matches(psi, a, ev[static_cast<std::size_t>(j)]))
            continue;
          bool blocked = false;
          for (int k = i + 1; k < j && !blocked; ++k) {
            const Event& mid = ev[static_cast<std::size_t>(k)];
            if (mid.activity == psi.activity_a && activates(psi, mid)) blocked = true;
          }
          if (!blocked) ok = true;
        }
        if (!ok) return false;
      }
      return true;
    case TemplateKind::ChainResponse:
      for (int i = 0; i < m; ++i) {
        const Event& a = ev[static_cast<std::size_t>(i)];
        if (a.activity != psi.activity_a || !activates(psi, a)) continue;
        if (i + 1 >= m) return false;
        const Event& nxt = ev[static_cast<std::size_t>(i + 1)];
        if (nxt.activity != psi.activity_b || !target_matches(psi, a, nxt)) return false;
      }
      return true;
    case TemplateKind::Precedence:
      for (int i = 0; i < m; ++i) {
        const Event& b = ev[static_cast<std::size_t>(i)];
        if (b.activity != psi.activity_b || !activates(psi, b)) continue;
        bool ok = false;
        for (int j = 0; j < i && !ok; ++j)
          if (ev[static_cast<std::size_t>(j)].activity == psi.activity_a &&
              target_matches(psi, b, ev[static_cast<std::size_t>(j)]))
            ok = true;
        if (!ok) return false;
      }
      return true;
    case TemplateKind::AlternatePrecedence:
      for (int i = 0; i < m; ++i) {
        const Event& b = ev[static_cast<std::size_t>(i)];
        if (b.activity != psi.activity_b || !activates(psi, b)) continue;
        bool ok = false;
        for (int j = 0; j < i && !ok; ++j) {
          if (ev[static_cast<std::size_t>(j)].activity != psi.activity_a ||
              !target_matches(psi, b, ev[static_cast<std::size_t>(j)]))
            continue;
          bool blocked = false;
          for (int k = j + 1; k < i && !blocked; ++k) {
            const Event& mid = ev[static_cast<std::size_t>(k)];
            if (mid.activity == psi.activity_b && activates(psi, mid)) blocked = true;
          }
          if (!blocked) ok = true;
        }
        if (!ok) return false;
      }
      return true;
    case TemplateKind::ChainPrecedence:
      for (int i = 0; i < m; ++i) {
        const Event& b = ev[static_cast<std::size_t>(i)];
        if (b.activity != psi.activity_b || !activates(psi, b)) continue;
        if (i == 0) return false;
        const Event& prv = ev[static_cast<std::size_t>(i - 1)];
        if (prv.activity != psi.activity_a || !target_matches(psi, b, prv)) return false;
      }
      return true;
    case TemplateKind::NotResponse:
      for (int i = 0; i < m; ++i) {
        const Event& a = ev[static_cast<std::size_t>(i)];
        if (a.activity != psi.activity_a || !activates(psi, a)) continue;
        for (int j = i + 1; j < m; ++j)
          if (ev[static_cast<std::size_t>(j)].activity == psi.activity_b &&
              target_matches(psi, a, ev[static_cast<std::size_t>(j)]))
            return false;
      }
      return true;
    case TemplateKind::NotRespondedExistence:
      for (int i = 0; i < m; ++i) {
        const Event& a = ev[static_cast<std::size_t>(i)];
        if (a.activity != psi.activity_a || !activates(psi, a)) continue;
        for (int j = 0; j < m; ++j)
          if (j != i && ev[static_cast<std::size_t>(j)].activity == psi.activity_b &&
              target_matches(psi, a, ev[static_cast<std::size_t>(j)]))
            return false;
      }
      return true;
    case TemplateKind::NotChainResponse:
      for (int i = 0; i < m; ++i) {
        const Event& a = ev[static_cast<std::size_t>(i)];
        if (a.activity != psi.activity_a || !activates(psi, a)) continue;
        if (i + 1 < m) {
          const Event& nxt = ev[static_cast<std::size_t>(i + 1)];
          if (nxt.activity == psi.activity_b && target_matches(psi, a, nxt)) return false;
        }
      }
      return true;
  }
  return false;
}

inline bool model_satisfies(const DeclareModel& m, const Trace& trace) {
  for (auto& psi : m.constraints)
    if (!trace_satisfies(psi, trace)) return false;
  return true;
}

}  // namespace dalign
