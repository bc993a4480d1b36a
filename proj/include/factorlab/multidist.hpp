#pragma once
// Probabilistic call-by-value reduction on multi-distributions: exact
// rational weights, per-term beta-v / choice steps, subset lifting of those
// steps to multi-distributions, the surface swap check, and a surface-first
// factorization oracle over the lifted relation.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "engine.hpp"
#include "kernel.hpp"
#include "term.hpp"

namespace factorlab {

// ---------------------------------------------------------------------------
// Exact rationals.  Weights stay tiny (denominators are small powers of two
// at the search depths used here), so a normalized int64 pair suffices.

struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("rational: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  static Rational zero() { return Rational(); }
  static Rational one() { return Rational(1, 1); }
  static Rational half() { return Rational(1, 2); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return a.num * b.den < b.num * a.den;
  }
  friend bool operator<=(const Rational& a, const Rational& b) { return a < b || a == b; }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num * b.num, a.den * b.den);
  }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

inline nlohmann::json rational_to_json(const Rational& r) {
  return nlohmann::json{{"num", r.num}, {"den", r.den}};
}

// ---------------------------------------------------------------------------
// Multi-distributions: multisets of weighted terms with total mass at most 1.
// Duplicate entries stay distinct; entries are kept in a canonical order so
// that equality and hashing are multiset equality over exact weights and
// alpha-classes.

struct WeightedTerm {
  Rational p;
  Term t;
};

class MultiDist {
 public:
  MultiDist() = default;

  explicit MultiDist(std::vector<WeightedTerm> entries) : entries_(std::move(entries)) {
    Rational total = Rational::zero();
    for (const WeightedTerm& e : entries_) {
      if (!(Rational::zero() < e.p) || Rational::one() < e.p)
        throw std::invalid_argument("multidist: entry weight outside (0,1]");
      total = total + e.p;
    }
    if (Rational::one() < total) throw std::invalid_argument("multidist: total mass exceeds 1");
    canonicalize();
  }

  static MultiDist point(const Term& t) { return MultiDist({WeightedTerm{Rational::one(), t}}); }

  const std::vector<WeightedTerm>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  // Total node count across entries; used by search budgets to bound states.
  std::size_t node_count() const {
    std::size_t n = 0;
    for (const WeightedTerm& e : entries_) n += e.t.size();
    return n;
  }

  Rational mass() const {
    Rational total = Rational::zero();
    for (const WeightedTerm& e : entries_) total = total + e.p;
    return total;
  }

  std::string key() const {
    std::string out;
    for (const WeightedTerm& e : entries_) {
      out += e.p.str();
      out += '*';
      out += alpha_key(e.t);
      out += '|';
    }
    return out;
  }

  std::string to_text() const {
    std::string out = "[";
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (i) out += ", ";
      out += entries_[i].p.str();
      out += ' ';
      out += factorlab::to_text(entries_[i].t);
    }
    out += ']';
    return out;
  }

  friend bool operator==(const MultiDist& a, const MultiDist& b) {
    if (a.entries_.size() != b.entries_.size()) return false;
    for (std::size_t i = 0; i < a.entries_.size(); ++i) {
      if (a.entries_[i].p != b.entries_[i].p) return false;
      if (!alpha_eq(a.entries_[i].t, b.entries_[i].t)) return false;
    }
    return true;
  }
  friend bool operator!=(const MultiDist& a, const MultiDist& b) { return !(a == b); }

 private:
  void canonicalize() {
    std::vector<std::pair<std::string, std::size_t>> order;
    order.reserve(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) order.emplace_back(alpha_key(entries_[i].t), i);
    std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      const Rational &pa = entries_[a.second].p, &pb = entries_[b.second].p;
      if (pa != pb) return pa < pb;
      return a.second < b.second;
    });
    std::vector<WeightedTerm> sorted;
    sorted.reserve(entries_.size());
    for (const auto& [k, i] : order) sorted.push_back(std::move(entries_[i]));
    entries_ = std::move(sorted);
  }

  std::vector<WeightedTerm> entries_;
};

inline MultiDist mdist_sum(const MultiDist& a, const MultiDist& b) {
  std::vector<WeightedTerm> entries = a.entries();
  entries.insert(entries.end(), b.entries().begin(), b.entries().end());
  return MultiDist(std::move(entries));  // the constructor rejects mass overflow
}

inline MultiDist mdist_scale(const Rational& q, const MultiDist& m) {
  if (!(Rational::zero() < q) || Rational::one() < q)
    throw std::invalid_argument("mdist_scale: scalar outside (0,1]");
  std::vector<WeightedTerm> entries;
  entries.reserve(m.size());
  for (const WeightedTerm& e : m.entries()) entries.push_back(WeightedTerm{q * e.p, e.t});
  return MultiDist(std::move(entries));
}

inline nlohmann::json mdist_to_json(const MultiDist& m) {
  nlohmann::json arr = nlohmann::json::array();
  for (const WeightedTerm& e : m.entries())
    arr.push_back(nlohmann::json{{"num", e.p.num}, {"den", e.p.den}, {"term", to_text(e.t)}});
  return arr;
}

// ---------------------------------------------------------------------------
// Per-term probabilistic steps.  beta-v fires under arbitrary contexts and
// yields a one-point distribution; choice fires under weak contexts only
// (application paths, never under a binder or inside a choice branch) and
// splits the surrounding context over both branches with weight 1/2 each.
// A step is surface exactly when its context is weak; every choice step is.

enum class ProbRule { BetaV, Oplus };

inline const char* prob_rule_name(ProbRule r) { return r == ProbRule::BetaV ? "betav" : "oplus"; }

struct TermProbStep {
  ProbRule rule;
  bool surface = false;
  Position pos;
  MultiDist target;
};

inline std::vector<TermProbStep> term_prob_steps(const Term& t) {
  std::vector<TermProbStep> out;
  for (const Position& pos : all_positions(t)) {
    bool weak = std::all_of(pos.begin(), pos.end(),
                            [](Dir d) { return d == Dir::Fun || d == Dir::Arg; });
    Term sub = subterm_at(t, pos);
    if (is_betav_redex(sub)) {
      Term reduct = subst(sub.fun().body(), sub.fun().name(), sub.arg());
      out.push_back(TermProbStep{ProbRule::BetaV, weak, pos,
                                 MultiDist::point(replace_at(t, pos, reduct))});
    }
    if (sub.kind() == TermKind::Choice && weak) {
      MultiDist target({WeightedTerm{Rational::half(), replace_at(t, pos, sub.left())},
                        WeightedTerm{Rational::half(), replace_at(t, pos, sub.right())}});
      out.push_back(TermProbStep{ProbRule::Oplus, true, pos, std::move(target)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lifting per-term steps to multi-distributions: every entry independently
// either stays put or takes one admitted step, at least one entry moving; the
// results are combined by the weight-scaled sum.  The all-identity choice is
// excluded here and recovered by reflexive-transitive closure in the oracle.

enum class LiftKind { BetaV, BetaVSurface, BetaVInternal, Oplus, Union };

inline const char* lift_kind_label(LiftKind k) {
  switch (k) {
    case LiftKind::BetaV: return "betav";
    case LiftKind::BetaVSurface: return "betav-surface";
    case LiftKind::BetaVInternal: return "betav-internal";
    case LiftKind::Oplus: return "oplus";
    case LiftKind::Union: return "union";
  }
  return "?";
}

inline bool lift_admits(LiftKind k, const TermProbStep& s) {
  switch (k) {
    case LiftKind::BetaV: return s.rule == ProbRule::BetaV;
    case LiftKind::BetaVSurface: return s.rule == ProbRule::BetaV && s.surface;
    case LiftKind::BetaVInternal: return s.rule == ProbRule::BetaV && !s.surface;
    case LiftKind::Oplus: return s.rule == ProbRule::Oplus;
    case LiftKind::Union: return true;
  }
  return false;
}

struct LiftEnum {
  std::vector<MultiDist> results;  // deduplicated, in canonical enumeration order
  bool complete = true;            // false when max_results truncated the enumeration
};

inline LiftEnum lift_enum(LiftKind kind, const MultiDist& m,
                          std::size_t max_results = std::size_t(1) << 20) {
  LiftEnum out;
  const auto& entries = m.entries();
  std::vector<std::vector<MultiDist>> options(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (TermProbStep& s : term_prob_steps(entries[i].t))
      if (lift_admits(kind, s)) options[i].push_back(std::move(s.target));
  }

  // Mixed-radix counter over per-entry choices; digit 0 is the identity.
  std::vector<std::size_t> digits(entries.size(), 0);
  std::unordered_set<std::string> seen;
  while (true) {
    // advance to the next choice vector (the all-identity vector is skipped)
    std::size_t i = digits.size();
    while (i > 0) {
      --i;
      if (digits[i] < options[i].size()) {
        ++digits[i];
        std::fill(digits.begin() + static_cast<std::ptrdiff_t>(i) + 1, digits.end(), 0);
        break;
      }
      if (i == 0) return out;  // counter rolled over: enumeration finished
    }
    if (digits.empty()) return out;

    std::vector<WeightedTerm> combined;
    for (std::size_t j = 0; j < entries.size(); ++j) {
      if (digits[j] == 0) {
        combined.push_back(entries[j]);
      } else {
        for (const WeightedTerm& e : options[j][digits[j] - 1].entries())
          combined.push_back(WeightedTerm{entries[j].p * e.p, e.t});
      }
    }
    MultiDist result(std::move(combined));
    if (seen.insert(result.key()).second) {
      if (out.results.size() >= max_results) {
        out.complete = false;
        return out;
      }
      out.results.push_back(std::move(result));
    }
  }
}

inline std::vector<MultiDist> lift(LiftKind kind, const MultiDist& m) {
  return lift_enum(kind, m).results;
}

// ---------------------------------------------------------------------------
// Mass conservation: every lifted step preserves total mass exactly (beta-v
// reducts are one-point mass-1 distributions and choice splits 1/2 + 1/2).

struct MassReport {
  long long sources = 0;   // distinct multi-distributions visited
  long long lifts = 0;     // lifted steps checked
  long long violations = 0;
  std::vector<std::string> violation_samples;

  static constexpr std::size_t kSampleCap = 8;
  bool ok() const { return violations == 0; }
};

inline MassReport check_mass_conservation(const std::vector<Term>& corpus, int depth = 2,
                                          long long budget = 100000) {
  MassReport rep;
  static constexpr LiftKind kKinds[] = {LiftKind::BetaVSurface, LiftKind::BetaVInternal,
                                        LiftKind::Oplus, LiftKind::Union};
  std::unordered_set<std::string> visited;
  for (const Term& t : corpus) {
    std::deque<std::pair<MultiDist, int>> queue{{MultiDist::point(t), 0}};
    while (!queue.empty() && budget > 0) {
      auto [m, d] = std::move(queue.front());
      queue.pop_front();
      if (!visited.insert(m.key()).second) continue;
      ++rep.sources;
      --budget;
      Rational mass = m.mass();
      for (LiftKind kind : kKinds) {
        for (MultiDist& r : lift(kind, m)) {
          ++rep.lifts;
          if (r.mass() != mass) {
            ++rep.violations;
            if (rep.violation_samples.size() < MassReport::kSampleCap)
              rep.violation_samples.push_back(lift_kind_label(kind) + std::string(": ") +
                                              m.to_text() + " => " + r.to_text());
          }
          if (kind != LiftKind::Union && d + 1 <= depth) queue.emplace_back(std::move(r), d + 1);
        }
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Embedding of the plain calculus: on choice-free terms, the probabilistic
// beta-v steps are in weight-1 one-point correspondence with the plain beta-v
// steps, position by position, and the surface flag coincides with the weak
// context class.

struct EmbeddingReport {
  long long terms = 0;
  long long steps = 0;
  long long mismatches = 0;
  std::vector<std::string> mismatch_samples;

  static constexpr std::size_t kSampleCap = 8;
  bool ok() const { return mismatches == 0; }
};

inline EmbeddingReport check_betav_embedding(const std::vector<Term>& corpus) {
  EmbeddingReport rep;
  Calculus cal = Calculus::make("betav-embedding", {"betav"}, ContextClass::Weak, {});
  for (const Term& t : corpus) {
    if (t.has_choice()) continue;
    ++rep.terms;

    // (position, reduct alpha-class, surface?) triples from both sides
    std::vector<std::tuple<Position, std::string, bool>> plain, prob;
    for (const Step& s : enumerate_steps(cal, t))
      plain.emplace_back(s.pos, alpha_key(s.target), s.classes.contains(ContextClass::Weak));
    for (const TermProbStep& s : term_prob_steps(t)) {
      bool point_ok = s.target.size() == 1 && s.target.entries()[0].p == Rational::one();
      if (!point_ok) {
        ++rep.mismatches;
        if (rep.mismatch_samples.size() < EmbeddingReport::kSampleCap)
          rep.mismatch_samples.push_back(to_text(t) + ": non-point beta-v lift " +
                                         s.target.to_text());
        continue;
      }
      prob.emplace_back(s.pos, alpha_key(s.target.entries()[0].t), s.surface);
    }
    std::sort(plain.begin(), plain.end());
    std::sort(prob.begin(), prob.end());
    rep.steps += static_cast<long long>(plain.size());
    if (plain != prob) {
      ++rep.mismatches;
      if (rep.mismatch_samples.size() < EmbeddingReport::kSampleCap)
        rep.mismatch_samples.push_back(to_text(t) + ": step sets differ (" +
                                       std::to_string(plain.size()) + " plain vs " +
                                       std::to_string(prob.size()) + " lifted)");
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Surface swap: an internal beta-v step followed by a choice step reorders as
// the choice step first, then at most one lifted beta-v step.

struct ProbPeakCase {
  Term source;
  Position betav_pos;  // the internal beta-v step out of source
  Position oplus_pos;  // the choice step out of the beta-v reduct
  MultiDist peak_target;
  bool closed = false;
  Position close_oplus_pos;  // the choice step out of source that closes
  int lifted_betav = 0;      // 0 or 1 lifted beta-v steps after it
};

inline nlohmann::json prob_peak_to_json(const ProbPeakCase& c) {
  nlohmann::json j{{"source", to_text(c.source)},
                   {"betav_pos", position_to_json(c.betav_pos)},
                   {"oplus_pos", position_to_json(c.oplus_pos)},
                   {"peak_target", mdist_to_json(c.peak_target)},
                   {"closed", c.closed}};
  if (c.closed) {
    j["close_oplus_pos"] = position_to_json(c.close_oplus_pos);
    j["lifted_betav"] = c.lifted_betav;
  }
  return j;
}

struct ProbSwapReport {
  long long terms = 0;
  long long peaks = 0;
  long long closed = 0;
  long long failed = 0;
  std::vector<ProbPeakCase> failures;
  std::vector<ProbPeakCase> closed_samples;

  static constexpr std::size_t kSampleCap = 8;
  bool holds() const { return failed == 0; }
};

inline nlohmann::json prob_swap_report_to_json(const ProbSwapReport& rep) {
  nlohmann::json fails = nlohmann::json::array(), samples = nlohmann::json::array();
  for (const ProbPeakCase& c : rep.failures) fails.push_back(prob_peak_to_json(c));
  for (const ProbPeakCase& c : rep.closed_samples) samples.push_back(prob_peak_to_json(c));
  return nlohmann::json{{"check", "internal-betav-then-oplus reorders as oplus-then-lifted-betav"},
                        {"terms", rep.terms},
                        {"peaks", rep.peaks},
                        {"closed", rep.closed},
                        {"failed", rep.failed},
                        {"holds", rep.holds()},
                        {"failures", std::move(fails)},
                        {"closed_samples", std::move(samples)}};
}

inline ProbSwapReport check_prob_surface_swap(const std::vector<Term>& corpus) {
  ProbSwapReport rep;
  for (const Term& t : corpus) {
    ++rep.terms;
    for (const TermProbStep& b : term_prob_steps(t)) {
      if (b.rule != ProbRule::BetaV || b.surface) continue;
      const Term& mid = b.target.entries()[0].t;
      for (const TermProbStep& o : term_prob_steps(mid)) {
        if (o.rule != ProbRule::Oplus) continue;
        ++rep.peaks;
        ProbPeakCase c{t, b.pos, o.pos, o.target, false, {}, 0};
        for (const TermProbStep& first : term_prob_steps(t)) {
          if (first.rule != ProbRule::Oplus) continue;
          if (first.target == o.target) {
            c.closed = true;
            c.close_oplus_pos = first.pos;
            c.lifted_betav = 0;
            break;
          }
          for (const MultiDist& after : lift(LiftKind::BetaV, first.target)) {
            if (after == o.target) {
              c.closed = true;
              c.close_oplus_pos = first.pos;
              c.lifted_betav = 1;
              break;
            }
          }
          if (c.closed) break;
        }
        if (c.closed) {
          ++rep.closed;
          if (rep.closed_samples.size() < ProbSwapReport::kSampleCap) rep.closed_samples.push_back(c);
        } else {
          ++rep.failed;
          if (rep.failures.size() < ProbSwapReport::kSampleCap) rep.failures.push_back(c);
        }
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Factorization oracle over the lifted relation.  One-step sources are the
// three disjoint lifted step kinds (surface beta-v, internal beta-v, choice);
// the surface phase is surface-beta-v plus choice, the internal phase is
// internal beta-v alone.  Mixed lifts decompose into consecutive pure-kind
// lifts, so reachability — and with it every verdict — is unchanged.

struct ProbLiftStep {
  LiftKind kind = LiftKind::Union;
  MultiDist target;
};

inline bool prob_surface_kind(LiftKind k) {
  return k == LiftKind::BetaVSurface || k == LiftKind::Oplus;
}

struct ProbEndpoint {
  MultiDist endpoint;
  int distance = 0;
  Verdict verdict = Verdict::Unknown;
  std::vector<ProbLiftStep> witness;  // surface phase then internal phase
};

struct ProbFactorization {
  MultiDist source;
  bool endpoints_complete = true;
  bool closure_complete = true;
  std::vector<ProbEndpoint> endpoints;
};

namespace detail {

// Two-phase closure over multi-distributions, mirroring the term oracle:
// surface closure first, then the internal closure seeded by every surface
// state in discovery order.
struct ProbTwoPhase {
  struct Node {
    MultiDist m;
    std::string pred;
    std::optional<ProbLiftStep> step;
  };
  std::unordered_map<std::string, Node> s_nodes, i_nodes;
  std::vector<std::string> s_order;
  bool complete = true;

  static constexpr LiftKind kSurface[] = {LiftKind::BetaVSurface, LiftKind::Oplus};

  void build(const MultiDist& source, SearchBudget& budget) {
    std::string source_key = source.key();
    s_nodes.emplace(source_key, Node{source, "", std::nullopt});
    s_order.push_back(source_key);
    i_nodes.emplace(source_key, Node{source, "", std::nullopt});

    std::deque<std::string> queue{source_key};
    while (!queue.empty()) {
      std::string key = std::move(queue.front());
      queue.pop_front();
      if (!budget.spend()) {
        complete = false;
        break;
      }
      MultiDist m = s_nodes.at(key).m;
      for (LiftKind kind : kSurface) {
        LiftEnum lifts = lift_enum(kind, m);
        if (!lifts.complete) complete = false;
        for (MultiDist& r : lifts.results) {
          if (r.node_count() > budget.size_cap) {
            complete = false;
            continue;
          }
          std::string rk = r.key();
          if (s_nodes.count(rk)) continue;
          s_nodes.emplace(rk, Node{r, key, ProbLiftStep{kind, r}});
          s_order.push_back(rk);
          i_nodes.emplace(rk, Node{std::move(r), "", std::nullopt});
          queue.push_back(std::move(rk));
        }
      }
    }

    std::deque<std::string> iqueue(s_order.begin(), s_order.end());
    while (!iqueue.empty()) {
      std::string key = std::move(iqueue.front());
      iqueue.pop_front();
      if (!budget.spend()) {
        complete = false;
        break;
      }
      MultiDist m = i_nodes.at(key).m;
      LiftEnum lifts = lift_enum(LiftKind::BetaVInternal, m);
      if (!lifts.complete) complete = false;
      for (MultiDist& r : lifts.results) {
        if (r.node_count() > budget.size_cap) {
          complete = false;
          continue;
        }
        std::string rk = r.key();
        if (i_nodes.count(rk)) continue;
        i_nodes.emplace(rk, Node{r, key, ProbLiftStep{LiftKind::BetaVInternal, std::move(r)}});
        iqueue.push_back(std::move(rk));
      }
    }
  }

  bool reaches(const std::string& key) const { return i_nodes.count(key) != 0; }

  std::vector<ProbLiftStep> path_to(const std::string& key) const {
    std::vector<ProbLiftStep> internal_part;
    std::string cur = key;
    while (true) {
      const Node& n = i_nodes.at(cur);
      if (!n.step) break;
      internal_part.push_back(*n.step);
      cur = n.pred;
    }
    std::vector<ProbLiftStep> path;
    std::string seed = cur;
    while (true) {
      const Node& n = s_nodes.at(seed);
      if (!n.step) break;
      path.push_back(*n.step);
      seed = n.pred;
    }
    std::reverse(path.begin(), path.end());
    std::reverse(internal_part.begin(), internal_part.end());
    path.insert(path.end(), internal_part.begin(), internal_part.end());
    return path;
  }
};

}  // namespace detail

inline ProbFactorization prob_factorize(const MultiDist& source, int seq_depth,
                                        SearchBudget& budget) {
  ProbFactorization out{source, true, true, {}};
  static constexpr LiftKind kAll[] = {LiftKind::BetaVSurface, LiftKind::BetaVInternal,
                                      LiftKind::Oplus};

  struct Reached {
    MultiDist m;
    int dist;
  };
  std::vector<Reached> reached{{source, 0}};
  {
    std::unordered_set<std::string> visited{source.key()};
    std::deque<Reached> queue{{source, 0}};
    while (!queue.empty()) {
      Reached n = std::move(queue.front());
      queue.pop_front();
      if (n.dist == seq_depth) continue;
      if (!budget.spend()) {
        out.endpoints_complete = false;
        break;
      }
      for (LiftKind kind : kAll) {
        LiftEnum lifts = lift_enum(kind, n.m);
        if (!lifts.complete) out.endpoints_complete = false;
        for (MultiDist& r : lifts.results) {
          if (r.node_count() > budget.size_cap) {
            out.endpoints_complete = false;
            continue;
          }
          if (!visited.insert(r.key()).second) continue;
          reached.push_back({r, n.dist + 1});
          queue.push_back({std::move(r), n.dist + 1});
        }
      }
    }
  }

  detail::ProbTwoPhase closure;
  closure.build(source, budget);
  out.closure_complete = closure.complete;

  for (const Reached& r : reached) {
    ProbEndpoint ep{r.m, r.dist, Verdict::Unknown, {}};
    std::string key = r.m.key();
    if (closure.reaches(key)) {
      ep.verdict = Verdict::Holds;
      ep.witness = closure.path_to(key);
    } else {
      ep.verdict = closure.complete ? Verdict::Refuted : Verdict::Unknown;
    }
    out.endpoints.push_back(std::move(ep));
  }
  return out;
}

// Replays a surface-then-internal witness through the lift enumerator.
inline WitnessCheck verify_prob_witness(const MultiDist& source,
                                        const std::vector<ProbLiftStep>& steps,
                                        bool require_phase_order = true) {
  WitnessCheck out;
  MultiDist cur = source;
  bool internal_seen = false;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const ProbLiftStep& s = steps[i];
    if (require_phase_order) {
      if (prob_surface_kind(s.kind) && internal_seen) {
        out.ok = false;
        out.error = "step " + std::to_string(i) + ": surface step after an internal step";
        return out;
      }
      if (!prob_surface_kind(s.kind)) internal_seen = true;
    }
    bool found = false;
    for (const MultiDist& r : lift(s.kind, cur)) {
      if (r == s.target) {
        found = true;
        break;
      }
    }
    if (!found) {
      out.ok = false;
      out.error = "step " + std::to_string(i) + ": target not a " +
                  lift_kind_label(s.kind) + " lift of " + cur.to_text();
      return out;
    }
    cur = s.target;
  }
  return out;
}

struct ProbSummary {
  int seq_depth = 3;
  long long per_source_budget = 20000;
  long long sources = 0, endpoints = 0, holds = 0, refuted = 0, unknown = 0;
  long long incomplete_sources = 0;
  std::vector<ProbFactorization> refuted_samples, unknown_samples;

  static constexpr std::size_t kSampleCap = 8;
  bool definite() const { return unknown == 0; }
  bool holds_everywhere() const { return refuted == 0 && unknown == 0; }
};

inline ProbSummary prob_factorization_oracle(const std::vector<Term>& corpus, int seq_depth = 3,
                                             long long per_source_budget = 20000) {
  ProbSummary sum;
  sum.seq_depth = seq_depth;
  sum.per_source_budget = per_source_budget;
  for (const Term& t : corpus) {
    SearchBudget budget{per_source_budget};
    ProbFactorization f = prob_factorize(MultiDist::point(t), seq_depth, budget);
    ++sum.sources;
    if (!f.endpoints_complete || !f.closure_complete) ++sum.incomplete_sources;
    bool any_refuted = false, any_unknown = false;
    for (const ProbEndpoint& ep : f.endpoints) {
      ++sum.endpoints;
      switch (ep.verdict) {
        case Verdict::Holds: ++sum.holds; break;
        case Verdict::Refuted:
          ++sum.refuted;
          any_refuted = true;
          break;
        case Verdict::Unknown:
          ++sum.unknown;
          any_unknown = true;
          break;
      }
    }
    if (any_refuted && sum.refuted_samples.size() < ProbSummary::kSampleCap)
      sum.refuted_samples.push_back(f);
    if (any_unknown && sum.unknown_samples.size() < ProbSummary::kSampleCap)
      sum.unknown_samples.push_back(f);
  }
  return sum;
}

inline nlohmann::json prob_summary_to_json(const ProbSummary& sum) {
  nlohmann::json refuted = nlohmann::json::array(), unknown = nlohmann::json::array();
  for (const ProbFactorization& f : sum.refuted_samples) refuted.push_back(f.source.to_text());
  for (const ProbFactorization& f : sum.unknown_samples) unknown.push_back(f.source.to_text());
  return nlohmann::json{{"check", "surface-first factorization of the lifted relation"},
                        {"seq_depth", sum.seq_depth},
                        {"per_source_budget", sum.per_source_budget},
                        {"sources", sum.sources},
                        {"endpoints", sum.endpoints},
                        {"holds", sum.holds},
                        {"refuted", sum.refuted},
                        {"unknown", sum.unknown},
                        {"incomplete_sources", sum.incomplete_sources},
                        {"holds_everywhere", sum.holds_everywhere()},
                        {"refuted_samples", std::move(refuted)},
                        {"unknown_samples", std::move(unknown)}};
}

inline nlohmann::json mass_report_to_json(const MassReport& rep) {
  return nlohmann::json{{"check", "lifted steps preserve total mass exactly"},
                        {"sources", rep.sources},
                        {"lifts", rep.lifts},
                        {"violations", rep.violations},
                        {"ok", rep.ok()},
                        {"violation_samples", rep.violation_samples}};
}

inline nlohmann::json embedding_report_to_json(const EmbeddingReport& rep) {
  return nlohmann::json{
      {"check", "choice-free lifted beta-v bisimulates plain beta-v, surface = weak"},
      {"terms", rep.terms},
      {"steps", rep.steps},
      {"mismatches", rep.mismatches},
      {"ok", rep.ok()},
      {"mismatch_samples", rep.mismatch_samples}};
}

}  // namespace factorlab
