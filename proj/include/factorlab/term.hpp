#pragma once

// Lambda terms with named binders, plus the positional machinery the rest of
// the library is built on: capture-avoiding substitution, alpha-equivalence
// via canonical keys, positions, context classification (head / left / weak /
// full), a parenthesized text format and a JSON tree encoding.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace factorlab {

enum class TermKind : std::uint8_t { Var, Con, Abs, App, Choice };

// Immutable term; cheap to copy (shared structure). Equality of Terms is
// deliberately not operator==: use syntactic_eq or alpha_eq explicitly.
class Term {
 public:
  Term() = delete;

  static Term var(std::string name) { return leaf(TermKind::Var, std::move(name)); }
  static Term con(std::string name) { return leaf(TermKind::Con, std::move(name)); }
  static Term abs(std::string binder, Term body) {
    auto n = std::make_shared<Node>();
    n->kind = TermKind::Abs;
    n->name = std::move(binder);
    n->kids.push_back(std::move(body));
    seal(*n);
    return Term(std::move(n));
  }
  static Term app(Term fun, Term arg) { return pair(TermKind::App, std::move(fun), std::move(arg)); }
  static Term choice(Term left, Term right) {
    return pair(TermKind::Choice, std::move(left), std::move(right));
  }

  TermKind kind() const { return node_->kind; }
  // Variable/constant name, or the binder for Abs.
  const std::string& name() const { return node_->name; }
  const Term& body() const { return child(TermKind::Abs, 0); }
  const Term& fun() const { return child(TermKind::App, 0); }
  const Term& arg() const { return child(TermKind::App, 1); }
  const Term& left() const { return child(TermKind::Choice, 0); }
  const Term& right() const { return child(TermKind::Choice, 1); }

  // Node count; an abstraction is one node plus its body.
  std::size_t size() const { return node_->size; }
  bool has_choice() const { return node_->has_choice; }

 private:
  struct Node {
    TermKind kind;
    std::string name;
    std::vector<Term> kids;
    std::size_t size = 1;
    bool has_choice = false;
  };

  static void seal(Node& n) {
    n.size = 1;
    n.has_choice = n.kind == TermKind::Choice;
    for (const auto& kid : n.kids) {
      n.size += kid.size();
      n.has_choice = n.has_choice || kid.has_choice();
    }
  }
  static Term leaf(TermKind k, std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->name = std::move(name);
    seal(*n);
    return Term(std::move(n));
  }
  static Term pair(TermKind k, Term a, Term b) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->kids.push_back(std::move(a));
    n->kids.push_back(std::move(b));
    seal(*n);
    return Term(std::move(n));
  }

  const Term& child(TermKind expect, std::size_t i) const {
    if (node_->kind != expect) throw std::invalid_argument("term: wrong kind for accessor");
    return node_->kids[i];
  }

  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

inline bool is_atom(const Term& t) {
  return t.kind() == TermKind::Var || t.kind() == TermKind::Con;
}

// Values: variables, constants, abstractions.
inline bool is_value(const Term& t) { return is_atom(t) || t.kind() == TermKind::Abs; }

inline bool syntactic_eq(const Term& a, const Term& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TermKind::Var:
    case TermKind::Con: return a.name() == b.name();
    case TermKind::Abs:
      return a.name() == b.name() && syntactic_eq(a.body(), b.body());
    case TermKind::App:
      return syntactic_eq(a.fun(), b.fun()) && syntactic_eq(a.arg(), b.arg());
    case TermKind::Choice:
      return syntactic_eq(a.left(), b.left()) && syntactic_eq(a.right(), b.right());
  }
  return false;
}

inline void free_vars_into(const Term& t, std::vector<std::string>& bound, std::set<std::string>& out) {
  switch (t.kind()) {
    case TermKind::Var:
      if (std::find(bound.begin(), bound.end(), t.name()) == bound.end()) out.insert(t.name());
      return;
    case TermKind::Con: return;
    case TermKind::Abs:
      bound.push_back(t.name());
      free_vars_into(t.body(), bound, out);
      bound.pop_back();
      return;
    case TermKind::App:
      free_vars_into(t.fun(), bound, out);
      free_vars_into(t.arg(), bound, out);
      return;
    case TermKind::Choice:
      free_vars_into(t.left(), bound, out);
      free_vars_into(t.right(), bound, out);
      return;
  }
}

inline std::set<std::string> free_vars(const Term& t) {
  std::set<std::string> out;
  std::vector<std::string> bound;
  free_vars_into(t, bound, out);
  return out;
}

// Deterministic fresh-name supply: strip trailing digits from the base, then
// take the bare stem or its first numbered variant not in `avoid`.
inline std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  std::string stem = base;
  while (!stem.empty() && std::isdigit(static_cast<unsigned char>(stem.back()))) stem.pop_back();
  if (stem.empty()) stem = "v";
  if (!avoid.count(stem)) return stem;
  for (int i = 1;; ++i) {
    std::string candidate = stem + std::to_string(i);
    if (!avoid.count(candidate)) return candidate;
  }
}

// Canonical alpha key: bound variables render as de Bruijn distances, so two
// terms are alpha-equivalent iff their keys coincide. Also used for hashing
// and for deterministic ordering of term sets.
inline void alpha_key_into(const Term& t, std::vector<const std::string*>& binders, std::string& out) {
  switch (t.kind()) {
    case TermKind::Var: {
      for (std::size_t i = binders.size(); i-- > 0;) {
        if (*binders[i] == t.name()) {
          out += 'b';
          out += std::to_string(binders.size() - 1 - i);
          out += ';';
          return;
        }
      }
      out += "f:";
      out += t.name();
      out += ';';
      return;
    }
    case TermKind::Con:
      out += "c:";
      out += t.name();
      out += ';';
      return;
    case TermKind::Abs:
      out += "(\\";
      binders.push_back(&t.name());
      alpha_key_into(t.body(), binders, out);
      binders.pop_back();
      out += ')';
      return;
    case TermKind::App:
      out += "(@";
      alpha_key_into(t.fun(), binders, out);
      alpha_key_into(t.arg(), binders, out);
      out += ')';
      return;
    case TermKind::Choice:
      out += "(+";
      alpha_key_into(t.left(), binders, out);
      alpha_key_into(t.right(), binders, out);
      out += ')';
      return;
  }
}

inline std::string alpha_key(const Term& t) {
  std::string out;
  out.reserve(t.size() * 4);
  std::vector<const std::string*> binders;
  alpha_key_into(t, binders, out);
  return out;
}

inline bool alpha_eq(const Term& a, const Term& b) { return alpha_key(a) == alpha_key(b); }

// Capture-avoiding substitution t[x := q]. Binders are renamed (with
// fresh_name) only when they would capture a free variable of q; untouched
// subtrees are shared with the input.
inline Term subst(const Term& t, const std::string& x, const Term& q) {
  switch (t.kind()) {
    case TermKind::Var: return t.name() == x ? q : t;
    case TermKind::Con: return t;
    case TermKind::App: return Term::app(subst(t.fun(), x, q), subst(t.arg(), x, q));
    case TermKind::Choice: return Term::choice(subst(t.left(), x, q), subst(t.right(), x, q));
    case TermKind::Abs: {
      if (t.name() == x) return t;
      auto body_fv = free_vars(t.body());
      if (!body_fv.count(x)) return t;
      auto q_fv = free_vars(q);
      if (q_fv.count(t.name())) {
        std::set<std::string> avoid = body_fv;
        avoid.insert(q_fv.begin(), q_fv.end());
        avoid.insert(x);
        std::string b = fresh_name(t.name(), avoid);
        Term renamed = subst(t.body(), t.name(), Term::var(b));
        return Term::abs(b, subst(renamed, x, q));
      }
      return Term::abs(t.name(), subst(t.body(), x, q));
    }
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Positions and context classification.

enum class Dir : std::uint8_t { Body, Fun, Arg, Left, Right };
using Position = std::vector<Dir>;

inline const Term& step_into(const Term& t, Dir d) {
  switch (d) {
    case Dir::Body:
      if (t.kind() == TermKind::Abs) return t.body();
      break;
    case Dir::Fun:
      if (t.kind() == TermKind::App) return t.fun();
      break;
    case Dir::Arg:
      if (t.kind() == TermKind::App) return t.arg();
      break;
    case Dir::Left:
      if (t.kind() == TermKind::Choice) return t.left();
      break;
    case Dir::Right:
      if (t.kind() == TermKind::Choice) return t.right();
      break;
  }
  throw std::invalid_argument("position does not resolve in term");
}

inline Term subterm_at(const Term& t, const Position& pos) {
  const Term* cur = &t;
  for (Dir d : pos) cur = &step_into(*cur, d);
  return *cur;
}

inline Term replace_at(const Term& t, const Position& pos, const Term& s, std::size_t from = 0) {
  if (from == pos.size()) return s;
  Dir d = pos[from];
  step_into(t, d);  // validates
  switch (d) {
    case Dir::Body: return Term::abs(t.name(), replace_at(t.body(), pos, s, from + 1));
    case Dir::Fun: return Term::app(replace_at(t.fun(), pos, s, from + 1), t.arg());
    case Dir::Arg: return Term::app(t.fun(), replace_at(t.arg(), pos, s, from + 1));
    case Dir::Left: return Term::choice(replace_at(t.left(), pos, s, from + 1), t.right());
    case Dir::Right: return Term::choice(t.left(), replace_at(t.right(), pos, s, from + 1));
  }
  throw std::logic_error("unreachable");
}

enum class ContextClass : std::uint8_t { Head = 1, Left = 2, Weak = 4, Full = 8 };

struct ClassSet {
  std::uint8_t bits = 0;
  bool contains(ContextClass c) const { return bits & static_cast<std::uint8_t>(c); }
  void add(ContextClass c) { bits |= static_cast<std::uint8_t>(c); }
  bool operator==(const ClassSet& o) const { return bits == o.bits; }
};

// Classifies the hole position `pos` of `root`:
//  - Head: a lambda prefix then an application spine, i.e. Body* then Fun*.
//  - Left: Fun descents freely; Arg descents only under a value function.
//  - Weak: Fun/Arg descents only (never under a binder, never into a choice).
//  - Full: always.
// The empty position lands in every class; each class is prefix-monotone.
inline ClassSet classify(const Term& root, const Position& pos) {
  bool head = true, left = true, weak = true;
  bool seen_fun = false;
  const Term* cur = &root;
  for (Dir d : pos) {
    const Term& next = step_into(*cur, d);
    switch (d) {
      case Dir::Body:
        if (seen_fun) head = false;
        left = false;
        weak = false;
        break;
      case Dir::Fun:
        seen_fun = true;
        break;
      case Dir::Arg:
        head = false;
        if (!is_value(cur->fun())) left = false;
        break;
      case Dir::Left:
      case Dir::Right:
        head = false;
        left = false;
        weak = false;
        break;
    }
    cur = &next;
  }
  ClassSet out;
  if (head) out.add(ContextClass::Head);
  if (left) out.add(ContextClass::Left);
  if (weak) out.add(ContextClass::Weak);
  out.add(ContextClass::Full);
  return out;
}

// All positions of t in leftmost-outermost (pre-)order.
inline void all_positions_into(const Term& t, Position& cur, std::vector<Position>& out) {
  out.push_back(cur);
  auto descend = [&](Dir d, const Term& sub) {
    cur.push_back(d);
    all_positions_into(sub, cur, out);
    cur.pop_back();
  };
  switch (t.kind()) {
    case TermKind::Var:
    case TermKind::Con: return;
    case TermKind::Abs: descend(Dir::Body, t.body()); return;
    case TermKind::App:
      descend(Dir::Fun, t.fun());
      descend(Dir::Arg, t.arg());
      return;
    case TermKind::Choice:
      descend(Dir::Left, t.left());
      descend(Dir::Right, t.right());
      return;
  }
}

inline std::vector<Position> all_positions(const Term& t) {
  std::vector<Position> out;
  Position cur;
  all_positions_into(t, cur, out);
  return out;
}

// Application spine: t = head a1 ... an, args left to right.
inline std::pair<Term, std::vector<Term>> spine(const Term& t) {
  std::vector<Term> args;
  const Term* cur = &t;
  while (cur->kind() == TermKind::App) {
    args.push_back(cur->arg());
    cur = &cur->fun();
  }
  std::reverse(args.begin(), args.end());
  return {*cur, args};
}

inline bool is_beta_redex(const Term& t) {
  return t.kind() == TermKind::App && t.fun().kind() == TermKind::Abs;
}
inline bool is_betav_redex(const Term& t) {
  return is_beta_redex(t) && is_value(t.arg());
}

// ---------------------------------------------------------------------------
// Text format. Grammar (identifiers [A-Za-z_][A-Za-z0-9_']*):
//   term   := ("λ" | "\") ident "." term | choice
//   choice := app ( "(+)" (app | lambda) )*
//   app    := atom+
//   atom   := ident | "(" term ")"
// Application binds tightest, then "(+)", and a lambda body extends as far
// right as possible. Names listed in `constants` parse as constants.

inline void print_into(const Term& t, int min_prec, std::string& out) {
  // precedence: abs 0, choice 1, app 2, atom 3
  auto wrap = [&](int prec, auto&& body) {
    bool paren = prec < min_prec;
    if (paren) out += '(';
    body();
    if (paren) out += ')';
  };
  switch (t.kind()) {
    case TermKind::Var:
    case TermKind::Con: out += t.name(); return;
    case TermKind::Abs:
      wrap(0, [&] {
        out += "\xce\xbb";  // λ
        out += t.name();
        out += '.';
        print_into(t.body(), 0, out);
      });
      return;
    case TermKind::App:
      wrap(2, [&] {
        print_into(t.fun(), 2, out);
        out += ' ';
        print_into(t.arg(), 3, out);
      });
      return;
    case TermKind::Choice:
      wrap(1, [&] {
        print_into(t.left(), 2, out);
        out += " (+) ";
        print_into(t.right(), 2, out);
      });
      return;
  }
}

inline std::string to_text(const Term& t) {
  std::string out;
  print_into(t, 0, out);
  return out;
}

namespace detail {

struct Parser {
  const std::string& src;
  std::size_t pos = 0;
  const std::set<std::string>& constants;

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("parse error at offset " + std::to_string(pos) + ": " + msg);
  }
  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }
  bool at_lambda() {
    if (pos < src.size() && src[pos] == '\\') return true;
    return pos + 1 < src.size() && static_cast<unsigned char>(src[pos]) == 0xce &&
           static_cast<unsigned char>(src[pos + 1]) == 0xbb;
  }
  void eat_lambda() { pos += src[pos] == '\\' ? 1 : 2; }
  bool at_choice_op() { return src.compare(pos, 3, "(+)") == 0; }
  static bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }
  std::string ident() {
    if (pos >= src.size() || !ident_start(src[pos])) fail("expected identifier");
    std::size_t start = pos;
    while (pos < src.size() && ident_char(src[pos])) ++pos;
    return src.substr(start, pos - start);
  }
  Term atom_name() {
    std::string n = ident();
    return constants.count(n) ? Term::con(n) : Term::var(n);
  }

  Term term() {
    skip_ws();
    if (at_lambda()) return lambda();
    return choice_expr();
  }
  Term lambda() {
    eat_lambda();
    skip_ws();
    std::string binder = ident();
    skip_ws();
    if (pos >= src.size() || src[pos] != '.') fail("expected '.' after binder");
    ++pos;
    return Term::abs(std::move(binder), term());
  }
  Term choice_expr() {
    Term acc = app_expr();
    skip_ws();
    while (pos < src.size() && at_choice_op()) {
      pos += 3;
      skip_ws();
      Term rhs = at_lambda() ? lambda() : app_expr();
      acc = Term::choice(std::move(acc), std::move(rhs));
      skip_ws();
    }
    return acc;
  }
  Term app_expr() {
    skip_ws();
    Term acc = atom();
    while (true) {
      skip_ws();
      if (pos >= src.size() || at_choice_op()) break;
      char c = src[pos];
      if (c == ')' ) break;
      if (c == '(' || ident_start(c)) {
        acc = Term::app(std::move(acc), atom());
      } else {
        break;
      }
    }
    return acc;
  }
  Term atom() {
    skip_ws();
    if (pos < src.size() && src[pos] == '(') {
      ++pos;
      Term inner = term();
      skip_ws();
      if (pos >= src.size() || src[pos] != ')') fail("expected ')'");
      ++pos;
      return inner;
    }
    return atom_name();
  }
};

}  // namespace detail

inline const std::set<std::string>& default_constants() {
  static const std::set<std::string> names = {"oplus", "Y", "Z"};
  return names;
}

inline Term parse_term(const std::string& text, const std::set<std::string>& constants = default_constants()) {
  detail::Parser p{text, 0, constants};
  Term t = p.term();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return t;
}

// ---------------------------------------------------------------------------
// JSON tree encoding.

inline nlohmann::json term_to_json(const Term& t) {
  using nlohmann::json;
  switch (t.kind()) {
    case TermKind::Var: return json{{"var", t.name()}};
    case TermKind::Con: return json{{"const", t.name()}};
    case TermKind::Abs:
      return json{{"abs", json{{"binder", t.name()}, {"body", term_to_json(t.body())}}}};
    case TermKind::App:
      return json{{"app", json{{"fun", term_to_json(t.fun())}, {"arg", term_to_json(t.arg())}}}};
    case TermKind::Choice:
      return json{{"choice", json{{"left", term_to_json(t.left())}, {"right", term_to_json(t.right())}}}};
  }
  throw std::logic_error("unreachable");
}

inline Term term_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.size() != 1) throw std::invalid_argument("term json: expected one-key object");
  if (j.contains("var")) return Term::var(j.at("var").get<std::string>());
  if (j.contains("const")) return Term::con(j.at("const").get<std::string>());
  if (j.contains("abs")) {
    const auto& a = j.at("abs");
    return Term::abs(a.at("binder").get<std::string>(), term_from_json(a.at("body")));
  }
  if (j.contains("app")) {
    const auto& a = j.at("app");
    return Term::app(term_from_json(a.at("fun")), term_from_json(a.at("arg")));
  }
  if (j.contains("choice")) {
    const auto& a = j.at("choice");
    return Term::choice(term_from_json(a.at("left")), term_from_json(a.at("right")));
  }
  throw std::invalid_argument("term json: unknown node kind");
}

inline const char* dir_name(Dir d) {
  switch (d) {
    case Dir::Body: return "body";
    case Dir::Fun: return "fun";
    case Dir::Arg: return "arg";
    case Dir::Left: return "left";
    case Dir::Right: return "right";
  }
  return "?";
}

inline Dir dir_from_name(const std::string& s) {
  if (s == "body") return Dir::Body;
  if (s == "fun") return Dir::Fun;
  if (s == "arg") return Dir::Arg;
  if (s == "left") return Dir::Left;
  if (s == "right") return Dir::Right;
  throw std::invalid_argument("unknown direction: " + s);
}

inline nlohmann::json position_to_json(const Position& p) {
  nlohmann::json a = nlohmann::json::array();
  for (Dir d : p) a.push_back(dir_name(d));
  return a;
}

inline Position position_from_json(const nlohmann::json& j) {
  Position p;
  for (const auto& e : j) p.push_back(dir_from_name(e.get<std::string>()));
  return p;
}

inline const char* class_name(ContextClass c) {
  switch (c) {
    case ContextClass::Head: return "head";
    case ContextClass::Left: return "left";
    case ContextClass::Weak: return "weak";
    case ContextClass::Full: return "full";
  }
  return "?";
}

inline ContextClass class_from_name(const std::string& s) {
  if (s == "head") return ContextClass::Head;
  if (s == "left") return ContextClass::Left;
  if (s == "weak") return ContextClass::Weak;
  if (s == "full") return ContextClass::Full;
  throw std::invalid_argument("unknown context class: " + s);
}

}  // namespace factorlab
