#pragma once
// Built-in calculi with their check suites and expected outcomes, plus the
// worked demonstration transcripts (choice duplication and non-confluence,
// sigma overlaps, the beta-eta counterexample, factorization walkthroughs,
// and the probabilistic lift).  Entries that are supposed to fail are
// first-class: suites assert the failure instead of merely tolerating it.

#include <algorithm>
#include <chrono>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "engine.hpp"
#include "gen.hpp"
#include "kernel.hpp"
#include "multidist.hpp"
#include "term.hpp"

namespace factorlab {

// ---------------------------------------------------------------------------
// Check descriptors.  Every entry bundles the checks whose outcomes the
// regression suites reproduce; `expected_pass = false` marks checks that must
// fail (with a definite counterexample, not an inconclusive search).

enum class CheckKind {
  UnionOracle,         // factorization oracle over the full rule set
  ModuleOracle,        // factorization oracle over a rule subset
  ModularBundle,       // module oracle + root swap + substitutivity in one report
  StrongPostponement,  // single-step close with at-most-one trailing step
  Swap,                // a linear / root-linear swap suite
  Substitutivity,      // root rules commute with substitution
  Shape,               // inessential steps preserve term shape
  Termination,         // the rule subset's full closure is finite everywhere
};

struct CheckDescriptor {
  std::string id;
  std::string description;
  CheckKind kind = CheckKind::UnionOracle;
  bool expected_pass = true;
  // Unknown verdicts are tolerated up to this bound; -1 means unknowns are
  // expected (non-normalizing rule sets) and never gate the check, though
  // they are still counted and reported.  Refutations always fail.
  long long unknown_tolerance = 0;
  std::vector<std::string> rules;   // Module*/Substitutivity/Termination subject
  std::optional<SwapSpec> swap;     // Swap shape
  bool use_peak_family = false;     // append the entry's constructed peaks
  std::string base_rule;            // ModularBundle: the rule being extended
  // Non-normalizing searches never finish, so checks that must stay bounded
  // carry their own per-term budget instead of the run-wide one.
  long long budget_override = 0;    // 0: use the run options budget

  CheckDescriptor() = default;
  CheckDescriptor(std::string id_, std::string description_, CheckKind kind_,
                  bool expected_pass_ = true, long long unknown_tolerance_ = 0,
                  std::vector<std::string> rules_ = {},
                  std::optional<SwapSpec> swap_ = std::nullopt, bool use_peak_family_ = false,
                  std::string base_rule_ = {}, long long budget_override_ = 0)
      : id(std::move(id_)),
        description(std::move(description_)),
        kind(kind_),
        expected_pass(expected_pass_),
        unknown_tolerance(unknown_tolerance_),
        rules(std::move(rules_)),
        swap(std::move(swap_)),
        use_peak_family(use_peak_family_),
        base_rule(std::move(base_rule_)),
        budget_override(budget_override_) {}

  bool unknowns_ok(long long unknowns) const {
    return unknown_tolerance < 0 || unknowns <= unknown_tolerance;
  }
};

struct CatalogEntry {
  std::string name;
  Calculus calculus;
  std::string claim;  // what the suite verifies, in behavioral terms
  std::string notes;
  CorpusSpec corpus;                    // the standard corpus for this entry
  std::vector<std::string> peak_family; // constructed root-swap peaks (text)
  std::vector<CheckDescriptor> checks;
};

// ---------------------------------------------------------------------------
// Swap shapes used by the catalog.

// close with one root step of the same rules, then exactly one alpha step
inline SwapSpec make_root_swap_exact_tail(const std::vector<std::string>& alpha_rules,
                                          const std::vector<std::string>& gamma_rules) {
  SwapSpec s = make_root_linear_swap(alpha_rules, gamma_rules, 1, Scope::Root);
  s.tail_min = 1;
  s.tail_max = 1;
  s.name += " [tail exactly 1]";
  return s;
}

namespace detail {

inline CorpusSpec corpus_for(std::vector<std::string> constants, bool allow_choice = false,
                             std::size_t max_size = 7) {
  CorpusSpec spec;
  spec.max_size = max_size;
  spec.free_vars = {"x", "y"};
  spec.constants = std::move(constants);
  spec.allow_choice = allow_choice;
  return spec;
}

}  // namespace detail

inline std::vector<CatalogEntry> catalog() {
  std::vector<CatalogEntry> entries;

  {
    CatalogEntry e;
    e.name = "beta-head";
    e.calculus = Calculus::make("beta-head", {"beta"}, ContextClass::Head, {});
    e.claim =
        "Head-first factorization of beta: every reduction sequence reorders "
        "into head steps followed by internal steps.";
    e.notes =
        "Strong postponement fails (internal steps duplicate head work), which is "
        "why the swap condition uses an unbounded trailing phase.";
    e.corpus = detail::corpus_for({});
    // the triplicating peak that refutes strong postponement: the internal
    // step erases work that three head-first copies must redo
    e.peak_family = {"(λx.x x x) ((λw.w) z)", "(λx.x x) ((λw.w) z)"};
    e.checks = {
        {"factorization-oracle",
         "every bounded reduction endpoint is reachable head-first",
         CheckKind::UnionOracle, true, 0, {}, std::nullopt, false},
        {"linear-self-swap",
         "internal beta then head beta reorders as head beta then beta*",
         CheckKind::Swap, true, 0, {}, make_linear_swap({"beta"}, {"beta"}, 6), true},
        {"strong-postponement",
         "expected failure: the at-most-one trailing step form is too strong for beta",
         CheckKind::StrongPostponement, false, 0, {}, std::nullopt, true},
        {"shape-preservation",
         "internal steps preserve the top constructor and head-redex shape",
         CheckKind::Shape, true, 0, {}, std::nullopt, false},
    };
    entries.push_back(std::move(e));
  }

  {
    CatalogEntry e;
    e.name = "lambda-oplus";
    e.calculus = Calculus::make("lambda-oplus", {"beta", "oplus"}, ContextClass::Head, {"oplus"});
    e.claim =
        "Head-first factorization extends to beta plus non-deterministic "
        "choice through the modular union conditions.";
    e.notes =
        "Non-confluent (choice duplication, see the nd-duplication demo); "
        "factorization holds regardless.";
    e.corpus = detail::corpus_for({"oplus"});
    e.peak_family = {
        "oplus ((λw.w) p) q",
        "oplus p ((λw.w) q)",
        "oplus ((λw.w) p) ((λw.w) q)",
        "oplus ((λw.w w) p) q",
        "oplus ((λw.p) q) q",
        "oplus (p ((λw.w) q)) p",
        "oplus ((λw.w) ((λw.w) p)) q",
        "oplus (λw.(λa.a) p) q",
        "oplus (oplus p q) r",
        "oplus r (oplus p q)",
        "oplus (oplus p q) (oplus q r)",
        "oplus (r (oplus p q)) r",
    };
    e.checks = {
        {"head-test",
         "bundled head test: choice-only factorization, the root swap, and substitutivity",
         CheckKind::ModularBundle, true, 0, {"oplus"}, std::nullopt, true, "beta"},
        {"module-oracle",
         "choice alone factorizes head-first with a definite verdict everywhere",
         CheckKind::ModuleOracle, true, 0, {"oplus"}, std::nullopt, false},
        {"root-swap-beta-oplus",
         "internal beta then root choice reorders as head choice then at most one beta",
         CheckKind::Swap, true, 0, {}, make_root_linear_swap({"beta"}, {"oplus"}, 1), true},
        {"root-swap-oplus-oplus",
         "internal choice then root choice reorders as root choice then at most one choice",
         CheckKind::Swap, true, 0, {},
         make_root_linear_swap({"oplus"}, {"oplus"}, 1, Scope::Root), true},
        {"substitutivity",
         "the choice rule commutes with substitution",
         CheckKind::Substitutivity, true, 0, {"oplus"}, std::nullopt, false},
        {"factorization-oracle",
         "the union of beta and choice factorizes head-first",
         CheckKind::UnionOracle, true, 0, {}, std::nullopt, false},
        {"shape-preservation",
         "internal steps preserve the top constructor and redex shapes",
         CheckKind::Shape, true, 0, {}, std::nullopt, false},
    };
    entries.push_back(std::move(e));
  }

  auto shuffling_entry = [](ContextClass essential) {
    std::string ess = essential == ContextClass::Left ? "left" : "weak";
    CatalogEntry e;
    e.name = "shuffling-" + ess;
    e.calculus = Calculus::make(e.name, {"betav", "sigma1", "sigma3"}, essential, {});
    e.claim = "Call-by-value factorization (" + ess +
              " essential class) for beta-v together with the sigma permutation rules.";
    e.notes =
        "The sigma rules overlap beta-v redexes non-trivially (see the sigma-overlaps "
        "demo); confluence of this calculus is not checked here.";
    e.corpus = detail::corpus_for({});
    e.peak_family = {
        "(λa.(λb.b) c) u v",
        "(λa.(λb.b) a) u v",
        "(λa.a ((λb.b) c)) u v",
        "(λa.a) u ((λb.b) c)",
        "w ((λa.(λb.b) c) u)",
        "(λa.λb.(λc.c) d) u v",
        "(λa.(λb.b) c d) u v",
        "w ((λa.(λb.b) c d) u)",
    };
    e.checks = {
        {ess + "-test",
         "bundled test: sigma-only factorization, the root swap, and substitutivity",
         CheckKind::ModularBundle, true, 0, {"sigma1", "sigma3"}, std::nullopt, true, "betav"},
        {"module-oracle",
         "the sigma rules alone factorize with a definite verdict everywhere",
         CheckKind::ModuleOracle, true, 0, {"sigma1", "sigma3"}, std::nullopt, false},
        {"sigma-termination",
         "the sigma-only closure of every corpus term is finite",
         CheckKind::Termination, true, 0, {"sigma1", "sigma3"}, std::nullopt, false},
        {"root-swap-betav-sigma",
         "internal beta-v then a root sigma step reorders as the root sigma step "
         "then exactly one beta-v step",
         CheckKind::Swap, true, 0, {},
         make_root_swap_exact_tail({"betav"}, {"sigma1", "sigma3"}), true},
        {"root-swap-sigma-sigma",
         "internal sigma then a root sigma step reorders as the root sigma step "
         "then exactly one sigma step",
         CheckKind::Swap, true, 0, {},
         make_root_swap_exact_tail({"sigma1", "sigma3"}, {"sigma1", "sigma3"}), true},
        {"substitutivity",
         "both sigma rules commute with value substitution",
         CheckKind::Substitutivity, true, 0, {"sigma1", "sigma3"}, std::nullopt, false},
        {"factorization-oracle",
         "the union of beta-v and the sigma rules factorizes " + ess + "-first",
         CheckKind::UnionOracle, true, 0, {}, std::nullopt, false},
        {"shape-preservation",
         "inessential steps preserve the top constructor and redex shapes",
         CheckKind::Shape, true, 0, {}, std::nullopt, false},
    };
    return e;
  };
  entries.push_back(shuffling_entry(ContextClass::Left));
  entries.push_back(shuffling_entry(ContextClass::Weak));

  {
    CatalogEntry e;
    e.name = "beta-y";
    e.calculus = Calculus::make("beta-y", {"beta", "Y"}, ContextClass::Head, {"Y"});
    e.claim =
        "Head-first factorization for beta with the fixpoint expansion rule "
        "Y t -> t (Y t).";
    e.notes =
        "Fixpoint expansion does not terminate, so the union oracle runs with a "
        "reduced fixed budget and reports (but is not gated by) inconclusive "
        "endpoints; the swap suite allows none.";
    e.corpus = detail::corpus_for({"Y"});
    e.peak_family = {
        "Y ((λa.a) x)",
        "Y ((λa.a) (λb.b))",
        "Y (x ((λa.a) y))",
        "Y ((λa.a a) (λb.b))",
        "Y ((λa.x) y)",
    };
    e.checks = {
        {"root-swap-beta-y",
         "internal beta then root fixpoint expansion reorders as head expansion then beta*",
         CheckKind::Swap, true, 0, {}, make_root_linear_swap({"beta"}, {"Y"}, 6), true},
        {"substitutivity",
         "fixpoint expansion commutes with substitution",
         CheckKind::Substitutivity, true, 0, {"Y"}, std::nullopt, false},
        // tolerance frozen at the unknown count measured at the default
        // configuration (size 7 corpus, fixed per-term budget below)
        {"factorization-oracle",
         "the union of beta and fixpoint expansion factorizes head-first wherever "
         "the bounded search is conclusive",
         CheckKind::UnionOracle, true, 2893, {}, std::nullopt, false, "", 2000},
        {"shape-preservation",
         "internal steps preserve the top constructor and redex shapes",
         CheckKind::Shape, true, 0, {}, std::nullopt, false},
    };
    entries.push_back(std::move(e));
  }

  {
    CatalogEntry e;
    e.name = "betav-z";
    e.calculus = Calculus::make("betav-z", {"betav", "Z"}, ContextClass::Weak, {"Z"});
    e.claim =
        "Weak factorization for beta-v with the call-by-value fixpoint "
        "expansion rule Z v -> λx. v (Z v) x.";
    e.notes =
        "As with the other fixpoint rule, the union oracle runs with a reduced "
        "fixed budget; only refutations fail it.";
    e.corpus = detail::corpus_for({"Z"});
    e.peak_family = {
        "Z (λa.(λb.b) c)",
        "Z (λa.(λb.b) a)",
        "Z (λa.a ((λb.b) c))",
        "Z (λa.(λb.b) (λc.c))",
    };
    e.checks = {
        {"root-swap-betav-z",
         "internal beta-v then root expansion reorders as weak expansion then beta-v*",
         CheckKind::Swap, true, 0, {}, make_root_linear_swap({"betav"}, {"Z"}, 6), true},
        {"substitutivity",
         "the expansion rule commutes with value substitution",
         CheckKind::Substitutivity, true, 0, {"Z"}, std::nullopt, false},
        // tolerance frozen at the unknown count measured at the default
        // configuration (size 7 corpus, fixed per-term budget below)
        {"factorization-oracle",
         "the union of beta-v and expansion factorizes weak-first wherever the "
         "bounded search is conclusive",
         CheckKind::UnionOracle, true, 252, {}, std::nullopt, false, "", 2000},
        {"shape-preservation",
         "inessential steps preserve the top constructor and redex shapes",
         CheckKind::Shape, true, 0, {}, std::nullopt, false},
    };
    entries.push_back(std::move(e));
  }

  {
    CatalogEntry e;
    e.name = "beta-eta";
    e.calculus = Calculus::make("beta-eta", {"beta", "eta"}, ContextClass::Head, {});
    e.claim =
        "Expected failure: eta does not linearly swap after internal beta, so "
        "head-first factorization of beta plus eta fails.";
    e.notes =
        "An internal beta step can erase the argument shape a root eta step needs, "
        "leaving no head-first route to the eta reduct.";
    e.corpus = detail::corpus_for({});
    e.peak_family = {
        "λx.((λz.z) (λz.z)) ((λz.z) x)",  // the canonical counterexample
        "λx.y ((λa.a) x)",                // the size-minimal failing peak
    };
    e.checks = {
        {"root-swap-beta-eta",
         "expected failure: internal beta then root eta does not reorder head-first",
         CheckKind::Swap, false, 0, {}, make_root_linear_swap({"beta"}, {"eta"}, 6), true},
        {"factorization-oracle",
         "expected failure: the union of beta and eta is refuted by a closed search",
         CheckKind::UnionOracle, false, 0, {}, std::nullopt, true},
        {"shape-preservation",
         "internal steps preserve the top constructor and redex shapes",
         CheckKind::Shape, true, 0, {}, std::nullopt, false},
    };
    entries.push_back(std::move(e));
  }

  return entries;
}

inline const CatalogEntry* find_entry(const std::vector<CatalogEntry>& cat,
                                      const std::string& name) {
  for (const CatalogEntry& e : cat)
    if (e.name == name) return &e;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Runner.

struct RunOptions {
  std::size_t max_size = 0;  // 0: use the entry's corpus spec as-is
  int seq_depth = 4;
  int path_bound = 6;
  long long budget = 100000;
  // seeded random corpus instead of the exhaustive one (0 = exhaustive)
  std::uint64_t seed = 0;
  std::size_t random_count = 500;

  CorpusSpec apply_to(CorpusSpec spec) const {
    if (max_size) spec.max_size = max_size;
    if (seed) {
      spec.mode = CorpusSpec::Mode::Random;
      spec.seed = seed;
      spec.count = random_count;
    }
    return spec;
  }
};

struct CheckOutcome {
  CheckDescriptor desc;
  bool passed = false;   // the raw result of the check
  bool matched = false;  // raw result agrees with the expected outcome
  // Mismatch caused purely by inconclusive (budget-bound) verdicts beyond the
  // tolerance, with no definite counterexample: distinguishes "raise the
  // budget" (exit 2) from "the property is wrong" (exit 1).
  bool unknown_excess = false;
  long long unknowns = 0;
  long long peaks = 0;      // swap suites: peaks inspected
  std::string detail;       // one-line human summary
  nlohmann::json report;    // full machine-readable report
  double seconds = 0.0;
};

struct EntryRun {
  std::string entry;
  std::size_t corpus_terms = 0;
  std::vector<CheckOutcome> checks;
  bool all_matched() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckOutcome& c) { return c.matched; });
  }
};

namespace detail {

inline std::vector<Term> parse_family(const CatalogEntry& e) {
  std::vector<Term> out;
  for (const std::string& s : e.peak_family) out.push_back(parse_term(s, e.calculus.constants));
  return out;
}

inline bool values_only_rule(const std::string& rule) {
  return rule == "betav" || rule == "sigma1" || rule == "sigma3" || rule == "Z";
}

}  // namespace detail

// The rule subset's closure under steps at every position, drained to a
// fixpoint; finite iff the drain completes within the budget.
struct TerminationReport {
  std::string rules;
  long long terms = 0, finite = 0, incomplete = 0;
  std::size_t largest_closure = 0;
  std::vector<std::string> incomplete_samples;

  static constexpr std::size_t kSampleCap = 8;
  bool ok() const { return incomplete == 0; }
};

inline TerminationReport check_termination(const Calculus& cal, const std::vector<Term>& corpus,
                                           long long per_term_budget = 100000) {
  TerminationReport rep;
  rep.rules = cal.name;
  for (const Term& t : corpus) {
    ++rep.terms;
    SearchBudget budget{per_term_budget};
    std::unordered_set<std::string> visited{alpha_key(t)};
    std::deque<Term> queue{t};
    bool complete = true;
    while (!queue.empty()) {
      Term cur = std::move(queue.front());
      queue.pop_front();
      if (!budget.spend()) {
        complete = false;
        break;
      }
      for (Step& s : enumerate_steps(cal, cur)) {
        if (!budget.admits(s.target)) {
          complete = false;
          continue;
        }
        if (!visited.insert(alpha_key(s.target)).second) continue;
        queue.push_back(std::move(s.target));
      }
    }
    if (complete) {
      ++rep.finite;
      rep.largest_closure = std::max(rep.largest_closure, visited.size());
    } else {
      ++rep.incomplete;
      if (rep.incomplete_samples.size() < TerminationReport::kSampleCap)
        rep.incomplete_samples.push_back(to_text(t));
    }
  }
  return rep;
}

inline nlohmann::json termination_report_to_json(const TerminationReport& rep) {
  return nlohmann::json{{"check", "full closure of the rule subset is finite"},
                        {"rules", rep.rules},
                        {"terms", rep.terms},
                        {"finite", rep.finite},
                        {"incomplete", rep.incomplete},
                        {"largest_closure", rep.largest_closure},
                        {"ok", rep.ok()},
                        {"incomplete_samples", rep.incomplete_samples}};
}

inline CheckOutcome run_check(const CatalogEntry& entry, const CheckDescriptor& desc,
                              const std::vector<Term>& corpus, const RunOptions& opt) {
  CheckOutcome out;
  out.desc = desc;
  auto started = std::chrono::steady_clock::now();

  std::vector<Term> swap_corpus;
  const std::vector<Term>* subject = &corpus;
  if (desc.use_peak_family) {
    swap_corpus = corpus;
    for (Term& t : detail::parse_family(entry)) swap_corpus.push_back(std::move(t));
    subject = &swap_corpus;
  }
  const long long budget = desc.budget_override > 0 ? desc.budget_override : opt.budget;

  // Uniform verdict folding: a definite counterexample always decides the
  // check; inconclusive verdicts beyond the tolerance flag unknown_excess.
  auto finalize = [&](bool definite_fail, long long unknowns) {
    out.unknowns = unknowns;
    out.passed = !definite_fail && desc.unknowns_ok(unknowns);
    out.matched = desc.expected_pass ? out.passed : definite_fail;
    long long tol = desc.expected_pass ? std::max<long long>(desc.unknown_tolerance, 0) : 0;
    out.unknown_excess = !out.matched && !definite_fail && unknowns > tol;
  };

  switch (desc.kind) {
    case CheckKind::UnionOracle: {
      FactorizationSummary sum =
          factorization_oracle(entry.calculus, *subject, opt.seq_depth, budget);
      finalize(sum.refuted > 0, sum.unknown);
      out.detail = std::to_string(sum.endpoints) + " endpoints, " + std::to_string(sum.refuted) +
                   " refuted, " + std::to_string(sum.unknown) + " unknown";
      out.report = factorization_summary_to_json(sum);
      break;
    }
    case CheckKind::ModuleOracle: {
      Calculus module = entry.calculus.restrict(desc.rules, entry.name + "-module");
      FactorizationSummary sum =
          factorization_oracle(module, *subject, opt.seq_depth, budget);
      finalize(sum.refuted > 0, sum.unknown);
      out.detail = std::to_string(sum.endpoints) + " endpoints, " + std::to_string(sum.refuted) +
                   " refuted, " + std::to_string(sum.unknown) + " unknown";
      out.report = factorization_summary_to_json(sum);
      break;
    }
    case CheckKind::ModularBundle: {
      bool values_only = detail::values_only_rule(desc.rules.front());
      std::vector<SubstTriple> triples = substitution_triples(entry.corpus, corpus, values_only);
      ModularTestOptions mopt;
      mopt.seq_depth = opt.seq_depth;
      mopt.path_bound = opt.path_bound;
      mopt.swap_budget = budget;
      mopt.oracle_budget = budget;
      ModularTestReport rep =
          modular_test(entry.calculus, desc.base_rule, desc.rules, *subject, triples, mopt);
      bool subst_bad = false;
      for (const SubstitutivityReport& r : rep.substitutivity)
        subst_bad = subst_bad || !r.ok();
      finalize(rep.gamma_alone.refuted > 0 || rep.root_swap.failed > 0 || subst_bad,
               rep.gamma_alone.unknown + rep.root_swap.unknown);
      out.peaks = rep.root_swap.peaks;
      out.detail = std::to_string(rep.gamma_alone.endpoints) + " module endpoints, " +
                   std::to_string(rep.root_swap.peaks) + " swap peaks, " +
                   std::to_string(rep.root_swap.failed) + " swap failures";
      out.report = modular_report_to_json(rep);
      break;
    }
    case CheckKind::StrongPostponement: {
      SwapReport rep =
          check_strong_postponement(entry.calculus, *subject, opt.path_bound, budget);
      finalize(rep.failed > 0, rep.unknown);
      out.peaks = rep.peaks;
      out.detail = std::to_string(rep.peaks) + " peaks, " + std::to_string(rep.failed) +
                   " failed, " + std::to_string(rep.unknown) + " unknown";
      out.report = swap_report_to_json(rep);
      break;
    }
    case CheckKind::Swap: {
      SwapReport rep = check_swap(entry.calculus, *desc.swap, *subject, budget);
      finalize(rep.failed > 0, rep.unknown);
      out.peaks = rep.peaks;
      out.detail = std::to_string(rep.peaks) + " peaks, " + std::to_string(rep.failed) +
                   " failed, " + std::to_string(rep.unknown) + " unknown";
      out.report = swap_report_to_json(rep);
      break;
    }
    case CheckKind::Substitutivity: {
      nlohmann::json reports = nlohmann::json::array();
      std::size_t checked = 0, violations = 0;
      for (const std::string& rule : desc.rules) {
        std::vector<SubstTriple> triples =
            substitution_triples(entry.corpus, corpus, detail::values_only_rule(rule));
        SubstitutivityReport rep = check_substitutive(rule, triples);
        checked += rep.checked;
        violations += rep.violations.size();
        reports.push_back(substitutivity_report_to_json(rep));
      }
      finalize(violations > 0, 0);
      out.detail = std::to_string(checked) + " substituted reducts, " +
                   std::to_string(violations) + " violations";
      out.report = nlohmann::json{{"check", "root rules commute with substitution"},
                                  {"rules", reports}};
      break;
    }
    case CheckKind::Shape: {
      ShapeReport rep = check_shape_preservation(entry.calculus, *subject);
      finalize(!rep.ok(), 0);
      out.detail = std::to_string(rep.steps_checked) + " steps, " +
                   std::to_string(rep.violations.size()) + " violations";
      out.report = shape_report_to_json(rep);
      break;
    }
    case CheckKind::Termination: {
      Calculus module = entry.calculus.restrict(desc.rules, entry.name + "-module");
      TerminationReport rep = check_termination(module, *subject, budget);
      // an unfinished drain is inconclusive, not a counterexample
      finalize(false, rep.incomplete);
      out.detail = std::to_string(rep.terms) + " closures, largest " +
                   std::to_string(rep.largest_closure) + " states, " +
                   std::to_string(rep.incomplete) + " unfinished";
      out.report = termination_report_to_json(rep);
      break;
    }
  }

  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

inline EntryRun run_entry(const CatalogEntry& entry, const RunOptions& opt,
                          const std::vector<std::string>* only_checks = nullptr) {
  std::vector<Term> corpus = enumerate_corpus(opt.apply_to(entry.corpus));

  EntryRun run;
  run.entry = entry.name;
  run.corpus_terms = corpus.size();
  for (const CheckDescriptor& desc : entry.checks) {
    if (only_checks && std::find(only_checks->begin(), only_checks->end(), desc.id) ==
                           only_checks->end())
      continue;
    run.checks.push_back(run_check(entry, desc, corpus, opt));
  }
  return run;
}

inline nlohmann::json check_outcome_to_json(const CheckOutcome& c) {
  return nlohmann::json{{"id", c.desc.id},
                        {"description", c.desc.description},
                        {"expected", c.desc.expected_pass ? "pass" : "fail"},
                        {"passed", c.passed},
                        {"matched", c.matched},
                        {"unknown_excess", c.unknown_excess},
                        {"unknowns", c.unknowns},
                        {"unknown_tolerance", c.desc.unknown_tolerance},
                        {"detail", c.detail},
                        {"report", c.report},
                        {"telemetry", nlohmann::json{{"seconds", c.seconds}}}};
}

inline nlohmann::json entry_run_to_json(const EntryRun& run) {
  nlohmann::json checks = nlohmann::json::array();
  for (const CheckOutcome& c : run.checks) checks.push_back(check_outcome_to_json(c));
  return nlohmann::json{{"entry", run.entry},
                        {"corpus_terms", run.corpus_terms},
                        {"all_matched", run.all_matched()},
                        {"checks", std::move(checks)}};
}


inline nlohmann::json catalog_to_json() {
  nlohmann::json arr = nlohmann::json::array();
  for (const CatalogEntry& e : catalog()) {
    nlohmann::json checks = nlohmann::json::array();
    for (const CheckDescriptor& d : e.checks)
      checks.push_back(nlohmann::json{{"id", d.id},
                                      {"description", d.description},
                                      {"expected", d.expected_pass ? "pass" : "fail"},
                                      {"unknown_tolerance", d.unknown_tolerance}});
    arr.push_back(nlohmann::json{{"name", e.name},
                                 {"rules", e.calculus.rules},
                                 {"essential", class_name(e.calculus.essential)},
                                 {"claim", e.claim},
                                 {"notes", e.notes},
                                 {"peak_family", e.peak_family},
                                 {"checks", std::move(checks)}});
  }
  return arr;
}

// ---------------------------------------------------------------------------
// The probabilistic suite is not a term calculus, so it sits beside the
// catalog with its own fixed check list.

struct ProbSuiteRun {
  std::size_t corpus_terms = 0;
  std::vector<CheckOutcome> checks;
  bool all_matched() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckOutcome& c) { return c.matched; });
  }
};

inline ProbSuiteRun run_prob_suite(const RunOptions& opt,
                                   const std::vector<std::string>* only_checks = nullptr) {
  ProbSuiteRun run;
  std::vector<Term> corpus = enumerate_corpus(opt.apply_to(detail::corpus_for({}, true, 6)));
  run.corpus_terms = corpus.size();

  auto timed = [&](CheckOutcome c, auto&& body) {
    if (only_checks && std::find(only_checks->begin(), only_checks->end(), c.desc.id) ==
                           only_checks->end())
      return;
    auto started = std::chrono::steady_clock::now();
    body(c);
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    run.checks.push_back(std::move(c));
  };

  {
    CheckOutcome c;
    c.desc = {"worked-lift",
              "the two-entry lift steps beta-v and choice simultaneously with exact weights",
              CheckKind::UnionOracle, true, 0, {}, std::nullopt, false};
    timed(std::move(c), [&](CheckOutcome& o) {
      MultiDist source({WeightedTerm{Rational::half(), parse_term("(λx.x) z", {})},
                        WeightedTerm{Rational::half(), parse_term("x (+) y", {})}});
      MultiDist target({WeightedTerm{Rational::half(), parse_term("z", {})},
                        WeightedTerm{Rational(1, 4), parse_term("x", {})},
                        WeightedTerm{Rational(1, 4), parse_term("y", {})}});
      std::vector<MultiDist> lifts = lift(LiftKind::Union, source);
      bool found = std::count(lifts.begin(), lifts.end(), target) == 1;
      o.passed = found;
      o.matched = found;
      o.detail = std::to_string(lifts.size()) + " union lifts, target " +
                 (found ? "replayed" : "missing");
      nlohmann::json all = nlohmann::json::array();
      for (const MultiDist& m : lifts) all.push_back(mdist_to_json(m));
      o.report = nlohmann::json{{"source", mdist_to_json(source)},
                                {"target", mdist_to_json(target)},
                                {"lifts", std::move(all)}};
    });
  }

  {
    CheckOutcome c;
    c.desc = {"surface-swap",
              "internal beta-v before a choice step reorders as choice then one lifted beta-v",
              CheckKind::Swap, true, 0, {}, std::nullopt, false};
    timed(std::move(c), [&](CheckOutcome& o) {
      ProbSwapReport rep = check_prob_surface_swap(corpus);
      o.passed = rep.holds();
      o.matched = o.passed;
      o.peaks = rep.peaks;
      o.detail = std::to_string(rep.peaks) + " peaks, " + std::to_string(rep.failed) + " failed";
      o.report = prob_swap_report_to_json(rep);
    });
  }

  {
    CheckOutcome c;
    c.desc = {"mass-conservation", "every enumerated lift preserves total mass exactly",
              CheckKind::Shape, true, 0, {}, std::nullopt, false};
    timed(std::move(c), [&](CheckOutcome& o) {
      MassReport rep = check_mass_conservation(corpus, 2, opt.budget);
      o.passed = rep.ok();
      o.matched = o.passed;
      o.detail = std::to_string(rep.lifts) + " lifts, " + std::to_string(rep.violations) +
                 " violations";
      o.report = mass_report_to_json(rep);
    });
  }

  {
    CheckOutcome c;
    c.desc = {"embedding",
              "on choice-free terms the lifted steps bisimulate plain beta-v, surface = weak",
              CheckKind::Shape, true, 0, {}, std::nullopt, false};
    timed(std::move(c), [&](CheckOutcome& o) {
      EmbeddingReport rep = check_betav_embedding(corpus);
      o.passed = rep.ok();
      o.matched = o.passed;
      o.detail = std::to_string(rep.terms) + " terms, " + std::to_string(rep.mismatches) +
                 " mismatches";
      o.report = embedding_report_to_json(rep);
    });
  }

  {
    CheckOutcome c;
    c.desc = {"factorization-oracle",
              "the lifted relation factorizes surface-first on one-point seeds",
              CheckKind::UnionOracle, true, 0, {}, std::nullopt, false};
    timed(std::move(c), [&](CheckOutcome& o) {
      // depth 3 keeps entry counts small while still mixing the step kinds
      ProbSummary sum = prob_factorization_oracle(corpus, 3, opt.budget);
      o.passed = sum.refuted == 0 && sum.unknown <= o.desc.unknown_tolerance;
      o.unknowns = sum.unknown;
      o.matched = o.passed;
      o.unknown_excess = sum.refuted == 0 && sum.unknown > o.desc.unknown_tolerance;
      o.detail = std::to_string(sum.endpoints) + " endpoints, " + std::to_string(sum.refuted) +
                 " refuted, " + std::to_string(sum.unknown) + " unknown";
      o.report = prob_summary_to_json(sum);
    });
  }

  return run;
}

inline nlohmann::json prob_suite_run_to_json(const ProbSuiteRun& run) {
  nlohmann::json checks = nlohmann::json::array();
  for (const CheckOutcome& c : run.checks) checks.push_back(check_outcome_to_json(c));
  return nlohmann::json{{"entry", "prob-cbv"},
                        {"corpus_terms", run.corpus_terms},
                        {"all_matched", run.all_matched()},
                        {"checks", std::move(checks)}};
}

// ---------------------------------------------------------------------------
// Demonstration transcripts.  Each demo replays a fixed scenario, verifies
// its claims, and reports a line-oriented transcript plus an ok flag.

struct Demo {
  std::string name;
  std::string title;
  std::vector<std::string> lines;
  bool ok = true;

  void say(std::string line) { lines.push_back(std::move(line)); }
  void claim(bool verified, const std::string& what) {
    ok = ok && verified;
    lines.push_back(std::string(verified ? "  [ok] " : "  [FAILED] ") + what);
  }
};

inline nlohmann::json demo_to_json(const Demo& d) {
  return nlohmann::json{
      {"name", d.name}, {"title", d.title}, {"ok", d.ok}, {"transcript", d.lines}};
}

namespace detail {

// all terms reachable from t (any number of steps), bounded drain
inline std::vector<std::string> reach_set(const Calculus& cal, const Term& t, long long budget) {
  std::unordered_set<std::string> visited{alpha_key(t)};
  std::deque<Term> queue{t};
  while (!queue.empty() && budget-- > 0) {
    Term cur = std::move(queue.front());
    queue.pop_front();
    for (Step& s : enumerate_steps(cal, cur)) {
      if (!visited.insert(alpha_key(s.target)).second) continue;
      queue.push_back(std::move(s.target));
    }
  }
  return std::vector<std::string>(visited.begin(), visited.end());
}

inline bool reaches(const Calculus& cal, const Term& from, const Term& to, long long budget) {
  std::string want = alpha_key(to);
  auto set = reach_set(cal, from, budget);
  return std::find(set.begin(), set.end(), want) != set.end();
}

}  // namespace detail

inline Demo nd_duplication_demo() {
  Demo d;
  d.name = "nd-duplication";
  d.title = "Duplicating a choice is not the same as choosing then duplicating";
  Calculus cal = Calculus::make("lambda-oplus", {"beta", "oplus"}, ContextClass::Head, {"oplus"});
  std::set<std::string> cons{"oplus"};
  Term t = parse_term("(λx.x x) (oplus p q)", cons);
  Term qp = parse_term("q p", cons);
  d.say("start: " + to_text(t));

  Term dup = parse_term("oplus p q (oplus p q)", cons);  // duplicate-first reduct
  d.say("duplicate first: beta gives " + to_text(dup) + ", then two choice steps");
  bool beta_first = false;
  for (const Step& s : enumerate_steps(cal, t))
    if (s.rule == "beta" && alpha_eq(s.target, dup)) beta_first = true;
  d.claim(beta_first, "beta duplicates the unresolved choice");
  d.claim(detail::reaches(cal, dup, qp, 1000), "mixed endpoint q p is reachable after duplication");

  Term left = parse_term("(λx.x x) p", cons), right = parse_term("(λx.x x) q", cons);
  bool flip_splits = false, flip_left = false, flip_right = false;
  for (const Step& s : enumerate_steps(cal, t)) {
    if (s.rule != "oplus") continue;
    flip_splits = true;
    if (alpha_eq(s.target, left)) flip_left = true;
    if (alpha_eq(s.target, right)) flip_right = true;
  }
  d.say("flip first: the choice resolves before duplication");
  d.claim(flip_splits && flip_left && flip_right,
          "flipping first yields " + to_text(left) + " or " + to_text(right));
  bool qp_unreachable =
      !detail::reaches(cal, left, qp, 1000) && !detail::reaches(cal, right, qp, 1000);
  d.claim(qp_unreachable, "q p is unreachable once the choice is resolved");

  Term pp = parse_term("p p", cons), qq = parse_term("q q", cons);
  bool nf = enumerate_steps(cal, pp).empty() && enumerate_steps(cal, qq).empty();
  d.claim(nf && detail::reaches(cal, t, pp, 1000) && detail::reaches(cal, t, qq, 1000),
          "p p and q q are distinct reachable normal forms: the calculus is not confluent");

  Term creates = parse_term("oplus (λa.a) y z", cons);
  std::vector<Step> before = enumerate_steps(cal, creates);
  bool no_beta_yet = std::none_of(before.begin(), before.end(),
                                  [](const Step& s) { return s.rule == "beta"; });
  Term after = parse_term("(λa.a) z", cons);
  bool choice_creates = false;
  for (const Step& s : enumerate_steps(cal, creates))
    if (s.rule == "oplus" && alpha_eq(s.target, after)) choice_creates = true;
  d.say("choice can create beta work: " + to_text(creates));
  d.claim(no_beta_yet, "no beta step exists before the choice resolves");
  d.claim(choice_creates && detail::reaches(cal, after, parse_term("z", cons), 100),
          "resolving the choice creates the beta step to z");
  return d;
}

inline Demo sigma_overlap_demo() {
  Demo d;
  d.name = "sigma-overlaps";
  d.title = "Sigma redexes overlap beta-v redexes non-trivially";
  Calculus cal =
      Calculus::make("shuffling-left", {"betav", "sigma1", "sigma3"}, ContextClass::Left, {});
  Term t1 = parse_term("(λx.x x) (λz.z) (λx.x x)", {});
  d.say("delta I delta: " + to_text(t1));
  d.claim(!root_steps(t1, "sigma1").empty(), "the whole term is a sigma-1 redex");
  bool inner_bv = false;
  for (const Step& s : enumerate_steps(cal, t1))
    if (s.rule == "betav" && s.pos == Position{Dir::Fun}) inner_bv = true;
  d.claim(inner_bv, "its function part delta I is a beta-v redex");

  Term t2 = parse_term("(λx.x x) ((λz.z) (λx.x x)) (x (λz.z))", {});
  d.say("delta (I delta) (x I): " + to_text(t2));
  d.claim(!root_steps(t2, "sigma1").empty(), "the whole term is a sigma-1 redex");
  d.claim(!root_steps(subterm_at(t2, {Dir::Fun}), "sigma3").empty(),
          "it contains the sigma-3 redex delta (I delta)");
  d.claim(is_betav_redex(subterm_at(t2, {Dir::Fun, Dir::Arg})),
          "which in turn contains the beta-v redex I delta");

  Term t3 = parse_term("(λz.z) x", {});
  d.say("I x: " + to_text(t3));
  d.claim(is_betav_redex(t3) && root_steps(t3, "sigma1").empty() &&
              root_steps(t3, "sigma3").empty(),
          "a bare beta-v redex matches neither sigma pattern");
  return d;
}

inline Demo beta_eta_counterexample_demo() {
  Demo d;
  d.name = "beta-eta-counterexample";
  d.title = "Head-first factorization fails for beta plus eta";
  Calculus cal = Calculus::make("beta-eta", {"beta", "eta"}, ContextClass::Head, {});
  Term t = parse_term("λx.((λz.z) (λz.z)) ((λz.z) x)", {});
  Term mid = parse_term("λx.((λz.z) (λz.z)) x", {});
  Term end = parse_term("(λz.z) (λz.z)", {});
  d.say("start: " + to_text(t));
  d.say("internal beta, then root eta: " + to_text(mid) + "  ->  " + to_text(end));

  bool step1 = false;
  for (const Step& s : inessential_steps(cal, t))
    if (s.rule == "beta" && alpha_eq(s.target, mid)) step1 = true;
  bool step2 = false;
  for (const Step& s : root_steps(mid, "eta"))
    if (alpha_eq(s.target, end)) step2 = true;
  d.claim(step1 && step2, "the two-step mixed sequence exists");

  SearchBudget budget{100000};
  TermFactorization f = factorize_term(cal, t, 2, budget);
  bool refuted = false;
  for (const EndpointResult& ep : f.endpoints)
    if (alpha_eq(ep.endpoint, end)) refuted = ep.verdict == Verdict::Refuted;
  d.claim(f.closure_complete, "the head-first search space from the start term is finite");
  d.claim(refuted, "no head-first reordering reaches " + to_text(end));
  return d;
}

inline Demo head_factorize_demo() {
  Demo d;
  d.name = "head-factorize-example";
  d.title = "Reordering a mixed beta sequence head-first";
  Calculus cal = Calculus::make("beta-head", {"beta"}, ContextClass::Head, {});
  Term t = parse_term("(λx.x x x) ((λw.w) z)", {});
  d.say("start: " + to_text(t));

  // the mixed sequence: internal argument step, then the head step
  std::vector<Step> mixed;
  for (const Step& s : inessential_steps(cal, t)) mixed.push_back(s);
  bool have_internal = mixed.size() == 1;
  if (have_internal)
    for (const Step& s : essential_steps(cal, mixed[0].target)) {
      mixed.push_back(s);
      break;
    }
  d.claim(mixed.size() == 2, "mixed sequence: internal step then head step");
  for (const Step& s : mixed)
    d.say(std::string("  ") + (s.classes.contains(ContextClass::Head) ? "head:     " : "internal: ") +
          to_text(s.source) + "  ->  " + to_text(s.target));

  auto reordered = reorder_sequence(cal, mixed);
  d.claim(reordered.has_value(), "the sequence reorders head-first");
  if (reordered) {
    d.say("head-first replay:");
    for (const Step& s : *reordered)
      d.say(std::string("  ") +
            (s.classes.contains(ContextClass::Head) ? "head:     " : "internal: ") +
            to_text(s.source) + "  ->  " + to_text(s.target));
    d.claim(reordered->size() == 4, "the head-first form duplicates the argument work: 4 steps");
    WitnessCheck wc = verify_witness(cal, t, *reordered, true);
    d.claim(wc.ok, "the reordered sequence replays step by step, head phase first");
  }
  return d;
}

inline Demo oplus_factorize_demo() {
  Demo d;
  d.name = "oplus-factorize-example";
  d.title = "Factorizing a beta + choice sequence head-first";
  Calculus cal = Calculus::make("lambda-oplus", {"beta", "oplus"}, ContextClass::Head, {"oplus"});
  std::set<std::string> cons{"oplus"};
  Term t = parse_term("(λx.x x x) (oplus p q)", cons);
  Term end = parse_term("p p p", cons);
  d.say("start: " + to_text(t) + "   target: " + to_text(end));
  auto path = factorize_to(cal, t, end, 100000);
  d.claim(path.has_value(), "an essential-first path reaches the target");
  if (path) {
    for (const Step& s : *path)
      d.say("  " + s.rule + (s.classes.contains(ContextClass::Head) ? " (head): " : " (internal): ") +
            to_text(s.source) + "  ->  " + to_text(s.target));
    bool shape = path->size() == 4 && (*path)[0].rule == "beta" && (*path)[1].rule == "oplus" &&
                 (*path)[2].rule == "oplus" && (*path)[3].rule == "oplus";
    d.claim(shape, "the path is one head beta, one head choice, then two internal choices");
    WitnessCheck wc = verify_witness(cal, t, *path, true);
    d.claim(wc.ok, "the path replays through the step enumerator");
  }
  return d;
}

inline Demo prob_lift_demo() {
  Demo d;
  d.name = "prob-lift";
  d.title = "Lifting reduction to a two-entry multi-distribution";
  MultiDist source({WeightedTerm{Rational::half(), parse_term("(λx.x) z", {})},
                    WeightedTerm{Rational::half(), parse_term("x (+) y", {})}});
  MultiDist target({WeightedTerm{Rational::half(), parse_term("z", {})},
                    WeightedTerm{Rational(1, 4), parse_term("x", {})},
                    WeightedTerm{Rational(1, 4), parse_term("y", {})}});
  d.say("source: " + source.to_text());
  std::vector<MultiDist> lifts = lift(LiftKind::Union, source);
  d.say("one-step lifts (each entry may stay or take one step):");
  for (const MultiDist& m : lifts) d.say("  => " + m.to_text());
  d.claim(std::count(lifts.begin(), lifts.end(), target) == 1,
          "both entries stepping at once gives " + target.to_text());
  bool mass_ok = true;
  for (const MultiDist& m : lifts) mass_ok = mass_ok && m.mass() == Rational::one();
  d.claim(mass_ok, "every lift preserves the total mass of 1 exactly");
  return d;
}

inline std::vector<std::string> demo_names() {
  return {"nd-duplication", "sigma-overlaps",        "beta-eta-counterexample",
          "head-factorize-example", "oplus-factorize-example", "prob-lift"};
}

inline Demo run_demo(const std::string& name) {
  if (name == "nd-duplication") return nd_duplication_demo();
  if (name == "sigma-overlaps") return sigma_overlap_demo();
  if (name == "beta-eta-counterexample") return beta_eta_counterexample_demo();
  if (name == "head-factorize-example") return head_factorize_demo();
  if (name == "oplus-factorize-example") return oplus_factorize_demo();
  if (name == "prob-lift") return prob_lift_demo();
  throw std::invalid_argument("unknown demo: " + name);
}

}  // namespace factorlab
