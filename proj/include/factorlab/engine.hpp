#pragma once

// Contextual closure of the root rules: step enumeration in a deterministic
// order (leftmost-outermost position, then rule name, then result index),
// calculus descriptions, and the two per-rule checkers used throughout the
// suites: substitutivity and shape preservation of inessential steps.

#include <optional>
#include <string>
#include <vector>

#include "rules.hpp"
#include "term.hpp"

namespace factorlab {

struct Step {
  Term source;
  std::string rule;
  Position pos;
  Term target;
  ClassSet classes;
};

inline nlohmann::json step_to_json(const Step& s) {
  nlohmann::json classes = nlohmann::json::array();
  for (ContextClass c : {ContextClass::Head, ContextClass::Left, ContextClass::Weak, ContextClass::Full})
    if (s.classes.contains(c)) classes.push_back(class_name(c));
  return {{"source", to_text(s.source)},
          {"rule", s.rule},
          {"pos", position_to_json(s.pos)},
          {"target", to_text(s.target)},
          {"classes", classes}};
}

struct Calculus {
  std::string name;
  std::vector<std::string> rules;  // names from the registry, kept sorted
  ContextClass essential = ContextClass::Head;
  std::set<std::string> constants;
  bool allows_choice = false;

  static Calculus make(std::string name, std::vector<std::string> rule_names,
                       ContextClass essential, std::set<std::string> constants = {},
                       bool allows_choice = false) {
    for (const auto& r : rule_names) rule_by_name(r);  // validate
    std::sort(rule_names.begin(), rule_names.end());
    return Calculus{std::move(name), std::move(rule_names), essential, std::move(constants),
                    allows_choice};
  }

  // Same calculus restricted to a subset of its rules.
  Calculus restrict(std::vector<std::string> subset, std::string new_name) const {
    Calculus c = make(std::move(new_name), std::move(subset), essential, constants, allows_choice);
    return c;
  }
};

inline nlohmann::json calculus_to_json(const Calculus& c) {
  return {{"name", c.name},
          {"rules", c.rules},
          {"essential", class_name(c.essential)},
          {"constants", std::vector<std::string>(c.constants.begin(), c.constants.end())},
          {"allows_choice", c.allows_choice}};
}

inline Calculus calculus_from_json(const nlohmann::json& j) {
  std::set<std::string> constants;
  if (j.contains("constants"))
    for (const auto& e : j.at("constants")) constants.insert(e.get<std::string>());
  return Calculus::make(j.at("name").get<std::string>(),
                        j.at("rules").get<std::vector<std::string>>(),
                        class_from_name(j.at("essential").get<std::string>()), std::move(constants),
                        j.value("allows_choice", false));
}

// Keep steps in a given class, steps outside it, or all steps.
struct StepFilter {
  std::optional<ContextClass> cls;
  bool negate = false;

  static StepFilter any() { return {}; }
  static StepFilter in(ContextClass c) { return {c, false}; }
  static StepFilter not_in(ContextClass c) { return {c, true}; }

  bool keep(const ClassSet& s) const {
    if (!cls) return true;
    return s.contains(*cls) != negate;
  }
};

namespace detail {

struct StepWalk {
  const Calculus& cal;
  const Term& root;
  const StepFilter& filter;
  std::vector<Step>& out;
  Position pos;

  void emit(const Term& sub, const ClassSet& classes) {
    if (!filter.keep(classes)) return;
    for (const auto& rule : cal.rules) {
      std::vector<Term> results = root_apply(rule, sub);
      std::vector<std::string> seen;
      for (const Term& r : results) {
        std::string key = alpha_key(r);
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
        seen.push_back(std::move(key));
        out.push_back(Step{root, rule, pos, replace_at(root, pos, r), classes});
      }
    }
  }

  // flags mirror classify(); kept incremental so enumeration stays linear in
  // the number of positions.
  void walk(const Term& t, bool head, bool seen_fun, bool left, bool weak) {
    ClassSet classes;
    if (head) classes.add(ContextClass::Head);
    if (left) classes.add(ContextClass::Left);
    if (weak) classes.add(ContextClass::Weak);
    classes.add(ContextClass::Full);
    emit(t, classes);
    switch (t.kind()) {
      case TermKind::Var:
      case TermKind::Con: return;
      case TermKind::Abs:
        pos.push_back(Dir::Body);
        walk(t.body(), head && !seen_fun, seen_fun, false, false);
        pos.pop_back();
        return;
      case TermKind::App:
        pos.push_back(Dir::Fun);
        walk(t.fun(), head, true, left, weak);
        pos.pop_back();
        pos.push_back(Dir::Arg);
        walk(t.arg(), false, seen_fun, left && is_value(t.fun()), weak);
        pos.pop_back();
        return;
      case TermKind::Choice:
        pos.push_back(Dir::Left);
        walk(t.left(), false, seen_fun, false, false);
        pos.pop_back();
        pos.push_back(Dir::Right);
        walk(t.right(), false, seen_fun, false, false);
        pos.pop_back();
        return;
    }
  }
};

}  // namespace detail

inline std::vector<Step> enumerate_steps(const Calculus& cal, const Term& t,
                                         const StepFilter& filter = StepFilter::any()) {
  if (t.has_choice() && !cal.allows_choice)
    throw std::invalid_argument("calculus '" + cal.name + "' does not admit choice terms");
  std::vector<Step> out;
  detail::StepWalk walk{cal, t, filter, out, {}};
  walk.walk(t, true, false, true, true);
  return out;
}

inline std::vector<Step> essential_steps(const Calculus& cal, const Term& t) {
  return enumerate_steps(cal, t, StepFilter::in(cal.essential));
}
inline std::vector<Step> inessential_steps(const Calculus& cal, const Term& t) {
  return enumerate_steps(cal, t, StepFilter::not_in(cal.essential));
}

// Root steps only (the rule applied at the empty position).
inline std::vector<Step> root_steps(const Term& t, const std::string& rule) {
  std::vector<Step> out;
  std::vector<std::string> seen;
  for (const Term& r : root_apply(rule, t)) {
    std::string key = alpha_key(r);
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(std::move(key));
    out.push_back(Step{t, rule, {}, r, classify(t, {})});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Substitutivity: r root-rewrites to r' implies r[x:=q] root-rewrites to
// r'[x:=q] (same rule, up to alpha).

struct SubstTriple {
  Term redex;
  std::string var;
  Term substituend;
};

struct SubstitutivityViolation {
  SubstTriple triple;
  Term reduct;  // the r' whose substituted image was not reachable
};

struct SubstitutivityReport {
  std::string rule;
  std::size_t checked = 0;  // (triple, reduct) pairs examined
  std::vector<SubstitutivityViolation> violations;
  bool ok() const { return violations.empty(); }
};

inline SubstitutivityReport check_substitutive(const std::string& rule,
                                               const std::vector<SubstTriple>& triples) {
  SubstitutivityReport rep{rule, 0, {}};
  for (const auto& tr : triples) {
    std::vector<Term> reducts = root_apply(rule, tr.redex);
    if (reducts.empty()) continue;
    Term lhs = subst(tr.redex, tr.var, tr.substituend);
    std::vector<Term> lhs_reducts = root_apply(rule, lhs);
    for (const Term& r : reducts) {
      ++rep.checked;
      Term want = subst(r, tr.var, tr.substituend);
      bool found = false;
      for (const Term& got : lhs_reducts)
        if (alpha_eq(got, want)) { found = true; break; }
      if (!found) rep.violations.push_back({tr, r});
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Shape preservation of inessential steps. For every t -> u outside the
// essential class:
//   - u is never an atom;
//   - u an abstraction: t is one, same binder, and the step happened in the
//     body (for head-essential calculi the body step is again non-head);
//   - u an application: t is one, exactly one component stepped, and the
//     component step is again inessential where the class demands it
//     (weak: always; left: in the function, and in the argument when the
//     function is a value);
//   - u a beta/betav-redex (whichever rule the calculus carries): so is t;
//   - u a constant-headed spine K u1..uk: t is K t1..tk;
//   - left-essential calculi: u a value implies t a value.

struct ShapeViolation {
  Step step;
  std::string clause;
};

struct ShapeReport {
  std::size_t terms = 0;
  std::size_t steps_checked = 0;
  std::vector<ShapeViolation> violations;
  bool ok() const { return violations.empty(); }
};

namespace detail {

inline bool position_inessential_in(const Term& sub, const Position& inner, ContextClass essential) {
  return !classify(sub, inner).contains(essential);
}

inline void check_shape_step(const Calculus& cal, const Step& s, ShapeReport& rep) {
  const Term& t = s.source;
  const Term& u = s.target;
  auto flag = [&](const char* clause) { rep.violations.push_back({s, clause}); };

  if (is_atom(u)) {
    flag("atom-created");
    return;
  }
  if (u.kind() == TermKind::Abs) {
    if (t.kind() != TermKind::Abs || t.name() != u.name() || s.pos.empty() ||
        s.pos.front() != Dir::Body) {
      flag("abs-shape");
    } else if (cal.essential == ContextClass::Head) {
      Position inner(s.pos.begin() + 1, s.pos.end());
      if (!position_inessential_in(t.body(), inner, ContextClass::Head)) flag("abs-body-head");
    }
  }
  if (u.kind() == TermKind::App) {
    if (t.kind() != TermKind::App || s.pos.empty() ||
        (s.pos.front() != Dir::Fun && s.pos.front() != Dir::Arg)) {
      flag("app-shape");
    } else {
      bool in_fun = s.pos.front() == Dir::Fun;
      const Term& untouched = in_fun ? t.arg() : t.fun();
      const Term& same = in_fun ? u.arg() : u.fun();
      if (!syntactic_eq(untouched, same)) flag("app-other-component");
      Position inner(s.pos.begin() + 1, s.pos.end());
      if (cal.essential == ContextClass::Weak) {
        if (!position_inessential_in(in_fun ? t.fun() : t.arg(), inner, ContextClass::Weak))
          flag("app-weak-localize");
      } else if (cal.essential == ContextClass::Left) {
        if (in_fun) {
          if (!position_inessential_in(t.fun(), inner, ContextClass::Left))
            flag("app-left-fun-localize");
        } else if (is_value(t.fun())) {
          if (!position_inessential_in(t.arg(), inner, ContextClass::Left))
            flag("app-left-arg-localize");
        }
      }
    }
  }
  bool has_beta = std::find(cal.rules.begin(), cal.rules.end(), "beta") != cal.rules.end();
  bool has_betav = std::find(cal.rules.begin(), cal.rules.end(), "betav") != cal.rules.end();
  if (has_beta && is_beta_redex(u) && !is_beta_redex(t)) flag("beta-redex-created");
  if (has_betav && is_betav_redex(u) && !is_betav_redex(t)) flag("betav-redex-created");
  auto [uh, uargs] = spine(u);
  if (uh.kind() == TermKind::Con && !uargs.empty()) {
    auto [th, targs] = spine(t);
    if (th.kind() != TermKind::Con || th.name() != uh.name() || targs.size() != uargs.size())
      flag("constant-spine");
  }
  if (cal.essential == ContextClass::Left && is_value(u) && !is_value(t)) flag("value-created");
}

}  // namespace detail

template <typename TermRange>
ShapeReport check_shape_preservation(const Calculus& cal, const TermRange& corpus) {
  ShapeReport rep;
  for (const Term& t : corpus) {
    ++rep.terms;
    for (const Step& s : inessential_steps(cal, t)) {
      ++rep.steps_checked;
      detail::check_shape_step(cal, s, rep);
    }
  }
  return rep;
}

inline nlohmann::json shape_report_to_json(const ShapeReport& r) {
  nlohmann::json violations = nlohmann::json::array();
  for (const ShapeViolation& v : r.violations)
    violations.push_back({{"step", step_to_json(v.step)}, {"clause", v.clause}});
  return {{"check", "inessential steps preserve term shape"},
          {"terms", r.terms},
          {"steps_checked", r.steps_checked},
          {"ok", r.ok()},
          {"violations", violations}};
}

}  // namespace factorlab
