#pragma once

// The rewriting kernel: bounded checks for the local commutation conditions
// (strong postponement, linear swaps, root linear swaps, linear postponement)
// and a budgeted two-phase breadth-first oracle that decides, per reachable
// endpoint, whether an essential-then-inessential path exists.  Every positive
// answer carries a step-by-step witness that can be replayed independently.

#include <algorithm>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "engine.hpp"

namespace factorlab {

// ---- step selection --------------------------------------------------------

// Scope of a sub-relation: all steps of the listed rules, only those whose
// context lies in the calculus' essential class, only those outside it, or
// only root steps (empty context).
enum class Scope { Any, Essential, Inessential, Root };

inline const char* scope_name(Scope s) {
  switch (s) {
    case Scope::Any: return "any";
    case Scope::Essential: return "essential";
    case Scope::Inessential: return "inessential";
    case Scope::Root: return "root";
  }
  return "?";
}

struct StepSource {
  std::vector<std::string> rules;  // empty means every rule of the calculus
  Scope scope = Scope::Any;
};

inline std::string source_label(const StepSource& src) {
  std::string rules = src.rules.empty() ? "*" : "";
  for (std::size_t i = 0; i < src.rules.size(); ++i) {
    if (i) rules += "+";
    rules += src.rules[i];
  }
  return std::string(scope_name(src.scope)) + "(" + rules + ")";
}

inline bool source_admits(const Calculus& cal, const StepSource& src, const Step& s) {
  if (!src.rules.empty() &&
      std::find(src.rules.begin(), src.rules.end(), s.rule) == src.rules.end())
    return false;
  switch (src.scope) {
    case Scope::Any: return true;
    case Scope::Essential: return s.classes.contains(cal.essential);
    case Scope::Inessential: return !s.classes.contains(cal.essential);
    case Scope::Root: return s.pos.empty();
  }
  return false;
}

inline std::vector<Step> select_steps(const Calculus& cal, const StepSource& src, const Term& t) {
  std::vector<Step> out;
  for (Step& s : enumerate_steps(cal, t))
    if (source_admits(cal, src, s)) out.push_back(std::move(s));
  return out;
}

// ---- search budget ---------------------------------------------------------

// Every search spends one unit per expanded state.  A search that runs out of
// budget reports "unknown" rather than a definite negative answer.
struct SearchBudget {
  long long remaining = 100000;
  // Closure searches do not explore terms larger than this; hitting one marks
  // the closure incomplete (verdicts degrade to Unknown, never Refuted).
  std::size_t size_cap = 512;
  bool exhausted = false;

  bool spend(long long cost = 1) {
    if (exhausted) return false;
    if (remaining < cost) {
      exhausted = true;
      return false;
    }
    remaining -= cost;
    return true;
  }

  bool admits(const Term& t) const { return t.size() <= size_cap; }
};

// ---- swap conditions -------------------------------------------------------

// A swap condition is a local inclusion: every peak  t -(peak_first)-> u
// -(peak_second)-> v  must close as  t -(close_first)^{close_min..close_max}->
// w -(tail)^{tail_min..tail_max}-> v.  The five stock shapes:
//
//   StrongPostponement    i . e  <=  e^* . i^=          (close 0..k, tail 0..1)
//   LinearSwap            i_a . e_g  <=  e_g . a^*      (close 1,    tail 0..k)
//   RootLinearSwap        i_a . root_g  <=  e_g . a^*   (close 1,    tail 0..k)
//   LinearPostponement1   i . e  <=  e . i^*            (close 1,    tail 0..k)
//   LinearPostponement2   i . e  <=  e . any^=          (close 1,    tail 0..1)
enum class SwapKind {
  StrongPostponement,
  LinearSwap,
  RootLinearSwap,
  LinearPostponement1,
  LinearPostponement2,
};

inline const char* swap_kind_name(SwapKind k) {
  switch (k) {
    case SwapKind::StrongPostponement: return "strong-postponement";
    case SwapKind::LinearSwap: return "linear-swap";
    case SwapKind::RootLinearSwap: return "root-linear-swap";
    case SwapKind::LinearPostponement1: return "linear-postponement-1";
    case SwapKind::LinearPostponement2: return "linear-postponement-2";
  }
  return "?";
}

struct SwapSpec {
  std::string name;
  SwapKind kind = SwapKind::LinearSwap;
  StepSource peak_first, peak_second;
  StepSource close_first, tail;
  // close_min must be 0 or 1; the search assumes no larger lower bound.
  int close_min = 1, close_max = 1;
  int tail_min = 0, tail_max = 0;
};

inline SwapSpec make_strong_postponement(int path_bound) {
  SwapSpec s;
  s.name = "strong-postponement";
  s.kind = SwapKind::StrongPostponement;
  s.peak_first = {{}, Scope::Inessential};
  s.peak_second = {{}, Scope::Essential};
  s.close_first = {{}, Scope::Essential};
  s.tail = {{}, Scope::Inessential};
  s.close_min = 0;
  s.close_max = path_bound;
  s.tail_min = 0;
  s.tail_max = 1;
  return s;
}

inline SwapSpec make_linear_swap(const std::vector<std::string>& alpha_rules,
                                 const std::vector<std::string>& gamma_rules, int tail_bound) {
  SwapSpec s;
  s.name = "linear-swap(" + source_label({alpha_rules, Scope::Inessential}) + " . " +
           source_label({gamma_rules, Scope::Essential}) + ")";
  s.kind = SwapKind::LinearSwap;
  s.peak_first = {alpha_rules, Scope::Inessential};
  s.peak_second = {gamma_rules, Scope::Essential};
  s.close_first = {gamma_rules, Scope::Essential};
  s.tail = {alpha_rules, Scope::Any};
  s.close_min = s.close_max = 1;
  s.tail_min = 0;
  s.tail_max = tail_bound;
  return s;
}

// The peak's second step is a root step; the closing step is an essential (or,
// with close_scope = Root, a root) step of the same rules.
inline SwapSpec make_root_linear_swap(const std::vector<std::string>& alpha_rules,
                                      const std::vector<std::string>& gamma_rules, int tail_bound,
                                      Scope close_scope = Scope::Essential) {
  SwapSpec s;
  s.name = "root-linear-swap(" + source_label({alpha_rules, Scope::Inessential}) + " . " +
           source_label({gamma_rules, Scope::Root}) + ")";
  s.kind = SwapKind::RootLinearSwap;
  s.peak_first = {alpha_rules, Scope::Inessential};
  s.peak_second = {gamma_rules, Scope::Root};
  s.close_first = {gamma_rules, close_scope};
  s.tail = {alpha_rules, Scope::Any};
  s.close_min = s.close_max = 1;
  s.tail_min = 0;
  s.tail_max = tail_bound;
  return s;
}

inline SwapSpec make_linear_postponement1(int tail_bound) {
  SwapSpec s;
  s.name = "linear-postponement-1";
  s.kind = SwapKind::LinearPostponement1;
  s.peak_first = {{}, Scope::Inessential};
  s.peak_second = {{}, Scope::Essential};
  s.close_first = {{}, Scope::Essential};
  s.tail = {{}, Scope::Inessential};
  s.close_min = s.close_max = 1;
  s.tail_min = 0;
  s.tail_max = tail_bound;
  return s;
}

inline SwapSpec make_linear_postponement2() {
  SwapSpec s;
  s.name = "linear-postponement-2";
  s.kind = SwapKind::LinearPostponement2;
  s.peak_first = {{}, Scope::Inessential};
  s.peak_second = {{}, Scope::Essential};
  s.close_first = {{}, Scope::Essential};
  s.tail = {{}, Scope::Any};
  s.close_min = s.close_max = 1;
  s.tail_min = 0;
  s.tail_max = 1;
  return s;
}

// Searches for a closing path  from -(close_first)^{close_min..close_max}->
// mid -(tail)^{tail_min..tail_max}-> target.  Returns the full step sequence
// on success.  On failure, budget.exhausted distinguishes "searched the whole
// bounded space" from "ran out of budget".
inline std::optional<std::vector<Step>> search_close(const Calculus& cal, const Term& from,
                                                     const std::string& target_key,
                                                     const SwapSpec& spec, SearchBudget& budget) {
  struct Node {
    Term t;
    std::vector<Step> path;
  };

  // Phase one: collect mid states in breadth-first discovery order.  A state
  // is emitted when an edge reaches it at depth >= close_min, so a state first
  // seen too early (only the source, since close_min <= 1) is still emitted if
  // a loop re-enters it.
  std::vector<Node> mids;
  {
    std::unordered_set<std::string> visited{alpha_key(from)}, emitted;
    if (spec.close_min == 0) {
      mids.push_back({from, {}});
      emitted.insert(alpha_key(from));
    }
    std::deque<Node> queue{{from, {}}};
    while (!queue.empty()) {
      Node n = std::move(queue.front());
      queue.pop_front();
      int depth = static_cast<int>(n.path.size());
      if (depth == spec.close_max) continue;
      if (!budget.spend()) break;
      for (Step& s : select_steps(cal, spec.close_first, n.t)) {
        std::string key = alpha_key(s.target);
        Node next{s.target, n.path};
        next.path.push_back(std::move(s));
        if (depth + 1 >= spec.close_min && emitted.insert(key).second) mids.push_back(next);
        if (visited.insert(std::move(key)).second) queue.push_back(std::move(next));
      }
    }
  }

  // Phase two: from each mid state, breadth-first over tail steps.  The
  // target test fires on every traversed edge (and on the mid itself when
  // tail_min == 0), so exact-length requirements like tail_min == 1 work even
  // if the target equals an already-visited state.
  for (const Node& mid : mids) {
    if (spec.tail_min == 0 && alpha_key(mid.t) == target_key) return mid.path;
    std::unordered_set<std::string> visited{alpha_key(mid.t)};
    std::deque<Node> queue{{mid.t, {}}};
    while (!queue.empty()) {
      Node n = std::move(queue.front());
      queue.pop_front();
      int depth = static_cast<int>(n.path.size());
      if (depth == spec.tail_max) continue;
      if (!budget.spend()) break;
      for (Step& s : select_steps(cal, spec.tail, n.t)) {
        std::string key = alpha_key(s.target);
        Node next{s.target, n.path};
        next.path.push_back(std::move(s));
        if (depth + 1 >= spec.tail_min && key == target_key) {
          std::vector<Step> witness = mid.path;
          witness.insert(witness.end(), next.path.begin(), next.path.end());
          return witness;
        }
        if (visited.insert(std::move(key)).second) queue.push_back(std::move(next));
      }
    }
    if (budget.exhausted) break;
  }
  return std::nullopt;
}

enum class PeakStatus { Closed, Failed, Unknown };

inline const char* peak_status_name(PeakStatus s) {
  switch (s) {
    case PeakStatus::Closed: return "closed";
    case PeakStatus::Failed: return "failed";
    case PeakStatus::Unknown: return "unknown";
  }
  return "?";
}

struct PeakCase {
  Step first, second;
  PeakStatus status = PeakStatus::Closed;
  std::vector<Step> witness;  // only for closed peaks
};

struct SwapReport {
  SwapSpec spec;
  long long peaks = 0, closed = 0, failed = 0, unknown = 0;
  std::vector<PeakCase> failures, unknowns, closed_samples;

  static constexpr std::size_t kSampleCap = 8;
  bool holds() const { return failed == 0 && unknown == 0; }
};

// Checks the swap condition over every peak rooted at a corpus term.  Each
// peak gets a fresh budget, so one diverging close search cannot starve the
// rest of the corpus.
inline SwapReport check_swap(const Calculus& cal, const SwapSpec& spec,
                             const std::vector<Term>& corpus, long long per_peak_budget = 100000) {
  SwapReport rep;
  rep.spec = spec;
  for (const Term& t : corpus) {
    for (const Step& s1 : select_steps(cal, spec.peak_first, t)) {
      for (const Step& s2 : select_steps(cal, spec.peak_second, s1.target)) {
        ++rep.peaks;
        SearchBudget budget{per_peak_budget};
        auto witness = search_close(cal, t, alpha_key(s2.target), spec, budget);
        if (witness) {
          ++rep.closed;
          if (rep.closed_samples.size() < SwapReport::kSampleCap)
            rep.closed_samples.push_back({s1, s2, PeakStatus::Closed, *witness});
        } else if (budget.exhausted) {
          ++rep.unknown;
          if (rep.unknowns.size() < SwapReport::kSampleCap)
            rep.unknowns.push_back({s1, s2, PeakStatus::Unknown, {}});
        } else {
          ++rep.failed;
          if (rep.failures.size() < SwapReport::kSampleCap)
            rep.failures.push_back({s1, s2, PeakStatus::Failed, {}});
        }
      }
    }
  }
  return rep;
}

inline SwapReport check_strong_postponement(const Calculus& cal, const std::vector<Term>& corpus,
                                            int path_bound = 6,
                                            long long per_peak_budget = 100000) {
  return check_swap(cal, make_strong_postponement(path_bound), corpus, per_peak_budget);
}

inline nlohmann::json peak_case_to_json(const PeakCase& p) {
  nlohmann::json witness = nlohmann::json::array();
  for (const Step& s : p.witness) witness.push_back(step_to_json(s));
  return {{"source", to_text(p.first.source)},
          {"first", step_to_json(p.first)},
          {"second", step_to_json(p.second)},
          {"status", peak_status_name(p.status)},
          {"witness", witness}};
}

inline nlohmann::json swap_report_to_json(const SwapReport& r) {
  nlohmann::json failures = nlohmann::json::array(), unknowns = nlohmann::json::array();
  for (const PeakCase& p : r.failures) failures.push_back(peak_case_to_json(p));
  for (const PeakCase& p : r.unknowns) unknowns.push_back(peak_case_to_json(p));
  return {{"condition", r.spec.name},
          {"kind", swap_kind_name(r.spec.kind)},
          {"peaks", r.peaks},
          {"closed", r.closed},
          {"failed", r.failed},
          {"unknown", r.unknown},
          {"failure_samples", failures},
          {"unknown_samples", unknowns}};
}

// ---- factorization oracle --------------------------------------------------

enum class Verdict { Holds, Refuted, Unknown };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Refuted: return "refuted";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

namespace detail {

// Two-phase reachability: first the closure of the source under essential
// steps, then the closure of that set under inessential steps.  A term is in
// the final set exactly when an essential*-then-inessential* path reaches it.
// Predecessor links allow witness reconstruction.
struct TwoPhase {
  struct Node {
    Term t;
    std::string pred;          // key of the predecessor ("" for the source / a seed)
    std::optional<Step> step;  // step from pred into this node
  };

  std::unordered_map<std::string, Node> e_nodes, i_nodes;
  std::vector<std::string> e_order;
  bool complete = true;

  // Builds both closures.  If target_key is given, stops early once it is
  // reached (leaving complete = true only if the search already drained).
  void build(const Calculus& cal, const Term& source, SearchBudget& budget,
             const std::string* target_key = nullptr) {
    std::string source_key = alpha_key(source);
    e_nodes.emplace(source_key, Node{source, "", std::nullopt});
    e_order.push_back(source_key);
    i_nodes.emplace(source_key, Node{source, "", std::nullopt});
    if (target_key && source_key == *target_key) return;

    std::deque<std::string> queue{source_key};
    while (!queue.empty()) {
      std::string key = std::move(queue.front());
      queue.pop_front();
      if (!budget.spend()) {
        complete = false;
        break;
      }
      Term t = e_nodes.at(key).t;
      for (Step& s : essential_steps(cal, t)) {
        if (!budget.admits(s.target)) {
          complete = false;
          continue;
        }
        std::string tk = alpha_key(s.target);
        if (e_nodes.count(tk)) continue;
        e_nodes.emplace(tk, Node{s.target, key, std::move(s)});
        e_order.push_back(tk);
        i_nodes.emplace(tk, Node{e_nodes.at(tk).t, "", std::nullopt});
        if (target_key && tk == *target_key) return;
        queue.push_back(std::move(tk));
      }
    }

    std::deque<std::string> iqueue(e_order.begin(), e_order.end());
    while (!iqueue.empty()) {
      std::string key = std::move(iqueue.front());
      iqueue.pop_front();
      if (!budget.spend()) {
        complete = false;
        break;
      }
      Term t = i_nodes.at(key).t;
      for (Step& s : inessential_steps(cal, t)) {
        if (!budget.admits(s.target)) {
          complete = false;
          continue;
        }
        std::string tk = alpha_key(s.target);
        if (i_nodes.count(tk)) continue;
        i_nodes.emplace(tk, Node{s.target, key, std::move(s)});
        if (target_key && tk == *target_key) return;
        iqueue.push_back(std::move(tk));
      }
    }
  }

  bool reaches(const std::string& key) const { return i_nodes.count(key) != 0; }

  // Reconstructs the essential-then-inessential witness to a reached key.
  std::vector<Step> path_to(const std::string& key) const {
    std::vector<Step> inessential_part;
    std::string cur = key;
    while (true) {
      const Node& n = i_nodes.at(cur);
      if (!n.step) break;  // reached a seed, i.e. an essential-phase state
      inessential_part.push_back(*n.step);
      cur = n.pred;
    }
    std::vector<Step> path;
    std::string seed = cur;
    while (true) {
      const Node& n = e_nodes.at(seed);
      if (!n.step) break;
      path.push_back(*n.step);
      seed = n.pred;
    }
    std::reverse(path.begin(), path.end());
    std::reverse(inessential_part.begin(), inessential_part.end());
    path.insert(path.end(), inessential_part.begin(), inessential_part.end());
    return path;
  }
};

}  // namespace detail

struct EndpointResult {
  Term endpoint;
  int distance = 0;  // length of the discovering reduction from the source
  Verdict verdict = Verdict::Unknown;
  std::vector<Step> witness;  // essential*-then-inessential* path when Holds
};

struct TermFactorization {
  Term source;
  bool endpoints_complete = true;  // endpoint enumeration finished within budget
  bool closure_complete = true;    // both closures drained within budget
  std::vector<EndpointResult> endpoints;
};

// Decides factorization for every endpoint reachable from t in at most
// seq_depth steps: Holds (with witness), Refuted (the fully-explored
// essential*-then-inessential* reachable set misses the endpoint), or Unknown
// (the budget ran out before the space was closed).
inline TermFactorization factorize_term(const Calculus& cal, const Term& t, int seq_depth,
                                        SearchBudget& budget) {
  TermFactorization out{t, true, true, {}};

  struct Reached {
    Term t;
    int dist;
  };
  std::vector<Reached> reached{{t, 0}};
  {
    std::unordered_set<std::string> visited{alpha_key(t)};
    std::deque<Reached> queue{{t, 0}};
    while (!queue.empty()) {
      Reached n = std::move(queue.front());
      queue.pop_front();
      if (n.dist == seq_depth) continue;
      if (!budget.spend()) {
        out.endpoints_complete = false;
        break;
      }
      for (Step& s : enumerate_steps(cal, n.t)) {
        if (!visited.insert(alpha_key(s.target)).second) continue;
        reached.push_back({s.target, n.dist + 1});
        queue.push_back({std::move(s.target), n.dist + 1});
      }
    }
  }

  detail::TwoPhase closure;
  closure.build(cal, t, budget);
  out.closure_complete = closure.complete;

  for (const Reached& r : reached) {
    EndpointResult er{r.t, r.dist, Verdict::Unknown, {}};
    std::string key = alpha_key(r.t);
    if (closure.reaches(key)) {
      er.verdict = Verdict::Holds;
      er.witness = closure.path_to(key);
    } else {
      er.verdict = closure.complete ? Verdict::Refuted : Verdict::Unknown;
    }
    out.endpoints.push_back(std::move(er));
  }
  return out;
}

struct FactorizationSummary {
  std::string calculus;
  int seq_depth = 4;
  long long per_term_budget = 100000;
  long long terms = 0, endpoints = 0, holds = 0, refuted = 0, unknown = 0;
  long long incomplete_terms = 0;  // terms whose search hit the budget
  std::vector<TermFactorization> refuted_samples, unknown_samples;

  static constexpr std::size_t kSampleCap = 8;
  bool definite() const { return unknown == 0; }
  bool holds_everywhere() const { return refuted == 0 && unknown == 0; }
};

inline FactorizationSummary factorization_oracle(const Calculus& cal,
                                                 const std::vector<Term>& corpus, int seq_depth = 4,
                                                 long long per_term_budget = 100000) {
  FactorizationSummary sum;
  sum.calculus = cal.name;
  sum.seq_depth = seq_depth;
  sum.per_term_budget = per_term_budget;
  for (const Term& t : corpus) {
    SearchBudget budget{per_term_budget};
    TermFactorization f = factorize_term(cal, t, seq_depth, budget);
    ++sum.terms;
    if (!f.endpoints_complete || !f.closure_complete) ++sum.incomplete_terms;
    bool any_refuted = false, any_unknown = false;
    for (const EndpointResult& er : f.endpoints) {
      ++sum.endpoints;
      switch (er.verdict) {
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
    if (any_refuted && sum.refuted_samples.size() < FactorizationSummary::kSampleCap)
      sum.refuted_samples.push_back(f);
    else if (any_unknown && sum.unknown_samples.size() < FactorizationSummary::kSampleCap)
      sum.unknown_samples.push_back(f);
  }
  return sum;
}

// Searches for an essential*-then-inessential* path from `from` to `to`.
inline std::optional<std::vector<Step>> factorize_to(const Calculus& cal, const Term& from,
                                                     const Term& to, long long budget_amount) {
  SearchBudget budget{budget_amount};
  detail::TwoPhase closure;
  std::string key = alpha_key(to);
  closure.build(cal, from, budget, &key);
  if (!closure.reaches(key)) return std::nullopt;
  return closure.path_to(key);
}

// Reorders an arbitrary reduction sequence into an essential*-then-
// inessential* sequence with the same endpoints, if one exists.
inline std::optional<std::vector<Step>> reorder_sequence(const Calculus& cal,
                                                         const std::vector<Step>& seq,
                                                         long long budget_amount = 100000) {
  if (seq.empty()) return std::vector<Step>{};
  return factorize_to(cal, seq.front().source, seq.back().target, budget_amount);
}

// ---- witness replay --------------------------------------------------------

struct WitnessCheck {
  bool ok = true;
  std::string error;
};

// Replays a step sequence against the calculus itself: every step must be
// re-derivable by enumeration from the current term (same rule, same position,
// alpha-equivalent target).  With require_phase_order, essential steps must
// all precede inessential ones.
inline WitnessCheck verify_witness(const Calculus& cal, const Term& source,
                                   const std::vector<Step>& steps,
                                   bool require_phase_order = false) {
  Term cur = source;
  bool seen_inessential = false;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const Step& claimed = steps[i];
    if (!alpha_eq(claimed.source, cur))
      return {false, "step " + std::to_string(i) + " starts from " + to_text(claimed.source) +
                         ", expected " + to_text(cur)};
    const Step* found = nullptr;
    std::vector<Step> here = enumerate_steps(cal, cur);
    for (const Step& s : here) {
      if (s.rule == claimed.rule && s.pos == claimed.pos && alpha_eq(s.target, claimed.target)) {
        found = &s;
        break;
      }
    }
    if (!found)
      return {false, "step " + std::to_string(i) + " (" + claimed.rule + ") is not derivable from " +
                         to_text(cur)};
    bool essential = found->classes.contains(cal.essential);
    if (require_phase_order) {
      if (!essential) seen_inessential = true;
      else if (seen_inessential)
        return {false, "step " + std::to_string(i) + " is essential but follows an inessential step"};
    }
    cur = found->target;
  }
  return {};
}

// ---- modular tests ---------------------------------------------------------

// The three-part test for factorization of a base reduction extended with
// extra rules: (1) the extra rules factorize on their own, (2) the root
// linear swap of an inessential base step over a root step of an extra rule
// closes essentially-first, (3) the extra rules are substitutive.
struct ModularTestOptions {
  int seq_depth = 4;
  int path_bound = 6;
  long long swap_budget = 100000;
  long long oracle_budget = 100000;
};

struct ModularTestReport {
  std::string name;
  FactorizationSummary gamma_alone;
  SwapReport root_swap;
  std::vector<SubstitutivityReport> substitutivity;

  bool swap_and_substitutivity_ok() const {
    if (!root_swap.holds()) return false;
    for (const SubstitutivityReport& r : substitutivity)
      if (!r.violations.empty()) return false;
    return true;
  }
};

inline ModularTestReport modular_test(const Calculus& cal, const std::string& base_rule,
                                      const std::vector<std::string>& gamma_rules,
                                      const std::vector<Term>& corpus,
                                      const std::vector<SubstTriple>& triples,
                                      const ModularTestOptions& opt = {}) {
  ModularTestReport rep;
  rep.name = cal.name;
  std::string gamma_label;
  for (const std::string& g : gamma_rules)
    gamma_label += (gamma_label.empty() ? "" : "+") + g;
  Calculus gamma_cal = cal.restrict(gamma_rules, cal.name + ":" + gamma_label);
  rep.gamma_alone = factorization_oracle(gamma_cal, corpus, opt.seq_depth, opt.oracle_budget);
  rep.root_swap = check_swap(cal, make_root_linear_swap({base_rule}, gamma_rules, opt.path_bound),
                             corpus, opt.swap_budget);
  for (const std::string& g : gamma_rules)
    rep.substitutivity.push_back(check_substitutive(g, triples));
  return rep;
}

inline nlohmann::json endpoint_result_to_json(const EndpointResult& e) {
  nlohmann::json witness = nlohmann::json::array();
  for (const Step& s : e.witness) witness.push_back(step_to_json(s));
  return {{"endpoint", to_text(e.endpoint)},
          {"distance", e.distance},
          {"verdict", verdict_name(e.verdict)},
          {"witness", witness}};
}

inline nlohmann::json term_factorization_to_json(const TermFactorization& f) {
  nlohmann::json eps = nlohmann::json::array();
  for (const EndpointResult& e : f.endpoints) eps.push_back(endpoint_result_to_json(e));
  return {{"source", to_text(f.source)},
          {"endpoints_complete", f.endpoints_complete},
          {"closure_complete", f.closure_complete},
          {"endpoints", eps}};
}

inline nlohmann::json factorization_summary_to_json(const FactorizationSummary& s) {
  nlohmann::json refuted = nlohmann::json::array(), unknown = nlohmann::json::array();
  for (const TermFactorization& f : s.refuted_samples) refuted.push_back(term_factorization_to_json(f));
  for (const TermFactorization& f : s.unknown_samples) unknown.push_back(term_factorization_to_json(f));
  return {{"calculus", s.calculus},
          {"seq_depth", s.seq_depth},
          {"per_term_budget", s.per_term_budget},
          {"terms", s.terms},
          {"endpoints", s.endpoints},
          {"holds", s.holds},
          {"refuted", s.refuted},
          {"unknown", s.unknown},
          {"incomplete_terms", s.incomplete_terms},
          {"refuted_samples", refuted},
          {"unknown_samples", unknown}};
}

inline nlohmann::json substitutivity_report_to_json(const SubstitutivityReport& r) {
  nlohmann::json violations = nlohmann::json::array();
  for (const SubstitutivityViolation& v : r.violations)
    violations.push_back({{"redex", to_text(v.triple.redex)},
                          {"var", v.triple.var},
                          {"substituend", to_text(v.triple.substituend)},
                          {"reduct", to_text(v.reduct)}});
  return {{"rule", r.rule}, {"checked", r.checked}, {"violations", violations}};
}

inline nlohmann::json modular_report_to_json(const ModularTestReport& r) {
  nlohmann::json subst = nlohmann::json::array();
  for (const SubstitutivityReport& s : r.substitutivity)
    subst.push_back(substitutivity_report_to_json(s));
  return {{"name", r.name},
          {"module_factorization", factorization_summary_to_json(r.gamma_alone)},
          {"root_swap", swap_report_to_json(r.root_swap)},
          {"substitutivity", subst}};
}

}  // namespace factorlab
