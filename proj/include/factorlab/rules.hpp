#pragma once

// Root rewrite rules. Each rule maps a term to the list of its root reducts
// (non-deterministic rules return several). Rules are functions of the
// alpha-class of their input: side conditions that are satisfiable by
// renaming the bound variable (the sigma rules, the fresh binder of Z) are
// enforced by renaming, never by failing.

#include <functional>
#include <string>
#include <vector>

#include "term.hpp"

namespace factorlab {

struct RootRule {
  std::string name;
  std::function<std::vector<Term>(const Term&)> apply;
};

// (λx.p) q  ->  p[x := q]
inline std::vector<Term> root_beta(const Term& t) {
  if (!is_beta_redex(t)) return {};
  return {subst(t.fun().body(), t.fun().name(), t.arg())};
}

// (λx.p) v  ->  p[x := v],  v a value
inline std::vector<Term> root_betav(const Term& t) {
  if (!is_betav_redex(t)) return {};
  return {subst(t.fun().body(), t.fun().name(), t.arg())};
}

// oplus t p  ->  t   and   oplus t p  ->  p   (oplus a constant, fully applied)
inline std::vector<Term> root_oplus(const Term& t) {
  if (t.kind() != TermKind::App) return {};
  const Term& inner = t.fun();
  if (inner.kind() != TermKind::App) return {};
  const Term& head = inner.fun();
  if (head.kind() != TermKind::Con || head.name() != "oplus") return {};
  return {inner.arg(), t.arg()};
}

namespace detail {

// Abstraction with its binder renamed away from `avoid` if necessary.
inline Term binder_apart(const Term& lam, const std::set<std::string>& avoid) {
  if (!avoid.count(lam.name())) return lam;
  std::set<std::string> all = avoid;
  auto body_fv = free_vars(lam.body());
  all.insert(body_fv.begin(), body_fv.end());
  std::string b = fresh_name(lam.name(), all);
  return Term::abs(b, subst(lam.body(), lam.name(), Term::var(b)));
}

}  // namespace detail

// (λx.t) u s  ->  (λx.t s) u   with x not free in s (by renaming)
inline std::vector<Term> root_sigma1(const Term& t) {
  if (t.kind() != TermKind::App) return {};
  const Term& inner = t.fun();
  if (inner.kind() != TermKind::App || inner.fun().kind() != TermKind::Abs) return {};
  const Term& s = t.arg();
  Term lam = detail::binder_apart(inner.fun(), free_vars(s));
  return {Term::app(Term::abs(lam.name(), Term::app(lam.body(), s)), inner.arg())};
}

// v ((λx.t) u)  ->  (λx.v t) u   with v a value and x not free in v (by renaming)
inline std::vector<Term> root_sigma3(const Term& t) {
  if (t.kind() != TermKind::App || !is_value(t.fun())) return {};
  const Term& redex = t.arg();
  if (redex.kind() != TermKind::App || redex.fun().kind() != TermKind::Abs) return {};
  const Term& v = t.fun();
  Term lam = detail::binder_apart(redex.fun(), free_vars(v));
  return {Term::app(Term::abs(lam.name(), Term::app(v, lam.body())), redex.arg())};
}

// Y p  ->  p (Y p)
inline std::vector<Term> root_fix_y(const Term& t) {
  if (t.kind() != TermKind::App) return {};
  const Term& head = t.fun();
  if (head.kind() != TermKind::Con || head.name() != "Y") return {};
  return {Term::app(t.arg(), t)};
}

// Z v  ->  λx.v (Z v) x   with v a value, x fresh for v
inline std::vector<Term> root_fix_z(const Term& t) {
  if (t.kind() != TermKind::App) return {};
  const Term& head = t.fun();
  if (head.kind() != TermKind::Con || head.name() != "Z") return {};
  const Term& v = t.arg();
  if (!is_value(v)) return {};
  std::string x = fresh_name("x", free_vars(v));
  return {Term::abs(x, Term::app(Term::app(v, t), Term::var(x)))};
}

// λx.t x  ->  t   with x not free in t (substantive check: alpha-invariant)
inline std::vector<Term> root_eta(const Term& t) {
  if (t.kind() != TermKind::Abs) return {};
  const Term& body = t.body();
  if (body.kind() != TermKind::App) return {};
  const Term& arg = body.arg();
  if (arg.kind() != TermKind::Var || arg.name() != t.name()) return {};
  if (free_vars(body.fun()).count(t.name())) return {};
  return {body.fun()};
}

inline const std::vector<RootRule>& rule_registry() {
  static const std::vector<RootRule> rules = {
      {"beta", root_beta},     {"betav", root_betav},   {"oplus", root_oplus},
      {"sigma1", root_sigma1}, {"sigma3", root_sigma3}, {"Y", root_fix_y},
      {"Z", root_fix_z},       {"eta", root_eta},
  };
  return rules;
}

inline const RootRule& rule_by_name(const std::string& name) {
  for (const auto& r : rule_registry())
    if (r.name == name) return r;
  throw std::invalid_argument("unknown rule: " + name);
}

inline std::vector<Term> root_apply(const std::string& rule, const Term& t) {
  return rule_by_name(rule).apply(t);
}

}  // namespace factorlab
