// Acceptance gate for the factorization laboratory.
//
// Each criterion below re-derives its verdict straight from the library
// (kernel searches, not the catalog plumbing), prints one PASS/FAIL line
// with indented evidence, and the binary exits nonzero if any criterion
// fails.  Expected numbers that appear literally (corpus counts, unknown
// tolerances) were measured with independent one-off programs and frozen.

#include <chrono>
#include <cstddef>
#include <deque>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "factorlab/calculi.hpp"

using namespace factorlab;

namespace {

struct Criterion {
  std::string title;
  bool pass = true;
  std::vector<std::string> evidence;
  double seconds = 0;

  explicit Criterion(std::string t) : title(std::move(t)) {}

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    evidence.push_back(std::string(ok ? "ok: " : "FAILED: ") + what);
  }
  void note(const std::string& what) { evidence.push_back(what); }
};

using Clock = std::chrono::steady_clock;

double secs_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(long long v) { return std::to_string(v); }

const CatalogEntry& entry(const std::vector<CatalogEntry>& cat, const std::string& name) {
  const CatalogEntry* e = find_entry(cat, name);
  if (!e) throw std::runtime_error("catalog entry missing: " + name);
  return *e;
}

const CheckDescriptor& check_of(const CatalogEntry& e, const std::string& id) {
  for (const CheckDescriptor& d : e.checks)
    if (d.id == id) return d;
  throw std::runtime_error(e.name + ": check missing: " + id);
}

// Plain breadth-first reachability under every rule of the calculus.
bool reaches_term(const Calculus& cal, const Term& from, const Term& to,
                  std::size_t state_cap = 5000) {
  std::string want = alpha_key(to);
  if (alpha_key(from) == want) return true;
  std::deque<Term> queue{from};
  std::unordered_set<std::string> seen{alpha_key(from)};
  while (!queue.empty() && seen.size() < state_cap) {
    Term t = queue.front();
    queue.pop_front();
    for (const Step& s : enumerate_steps(cal, t)) {
      std::string k = alpha_key(s.target);
      if (k == want) return true;
      if (seen.insert(std::move(k)).second) queue.push_back(s.target);
    }
  }
  return false;
}

// Checks that the factorization search from `source` to the last expected
// term returns exactly the given chain: same reducts in order, same rules,
// and essential steps exactly on the given prefix.
void check_chain(Criterion& c, const Calculus& cal, const std::string& label, const Term& source,
                 const std::vector<Term>& expected, const std::vector<std::string>& rules,
                 std::size_t essential_prefix) {
  std::optional<std::vector<Step>> path = factorize_to(cal, source, expected.back(), 100000);
  c.require(path.has_value(), label + ": phase-ordered reduction found");
  if (!path) return;
  c.require(path->size() == expected.size(),
            label + ": " + num(static_cast<long long>(path->size())) + " steps (expected " +
                num(static_cast<long long>(expected.size())) + ")");
  if (path->size() != expected.size()) return;
  bool exact = true;
  for (std::size_t i = 0; i < path->size(); ++i) {
    const Step& s = (*path)[i];
    exact = exact && alpha_eq(s.target, expected[i]) && s.rule == rules[i] &&
            s.classes.contains(cal.essential) == (i < essential_prefix);
  }
  c.require(exact, label + ": reducts, rules, and essential/internal phases match exactly");
  WitnessCheck w = verify_witness(cal, source, *path, true);
  c.require(w.ok, label + ": chain replays step-by-step through the step enumerator");
}

// ---------------------------------------------------------------------------
// 1. Worked-example replays, each under a second.

Criterion criterion1(const std::vector<CatalogEntry>& cat) {
  Criterion c("worked-example replays (head chain, choice chain, duplication), each < 1 s");

  {
    auto t0 = Clock::now();
    const Calculus& cal = entry(cat, "beta-head").calculus;
    Term source = parse_term("(λx.x x x) ((λw.w) z)", {});
    std::vector<Term> chain = {
        parse_term("((λw.w) z) ((λw.w) z) ((λw.w) z)", {}),
        parse_term("z ((λw.w) z) ((λw.w) z)", {}),
        parse_term("z z ((λw.w) z)", {}),
        parse_term("z z z", {}),
    };
    check_chain(c, cal, "head chain", source, chain, {"beta", "beta", "beta", "beta"}, 2);
    double s = secs_since(t0);
    c.require(s < 1.0, "head chain replay took " + std::to_string(s) + " s");
  }

  {
    auto t0 = Clock::now();
    const Calculus& cal = entry(cat, "lambda-oplus").calculus;
    Term source = parse_term("(λx.x x x) (oplus p q)", {"oplus"});
    std::vector<Term> chain = {
        parse_term("(oplus p q) (oplus p q) (oplus p q)", {"oplus"}),
        parse_term("p (oplus p q) (oplus p q)", {"oplus"}),
        parse_term("p p (oplus p q)", {"oplus"}),
        parse_term("p p p", {"oplus"}),
    };
    check_chain(c, cal, "choice chain", source, chain, {"beta", "oplus", "oplus", "oplus"}, 2);
    double s = secs_since(t0);
    c.require(s < 1.0, "choice chain replay took " + std::to_string(s) + " s");
  }

  {
    auto t0 = Clock::now();
    const Calculus& cal = entry(cat, "lambda-oplus").calculus;
    Term source = parse_term("(λx.x x) (oplus p q)", {"oplus"});
    Term duplicated = parse_term("oplus p q (oplus p q)", {"oplus"});
    Term mixed = parse_term("q p", {"oplus"});

    bool beta_duplicates = false;
    for (const Step& s : enumerate_steps(cal, source))
      if (s.rule == "beta" && s.pos.empty()) beta_duplicates = alpha_eq(s.target, duplicated);
    c.require(beta_duplicates, "duplication: root beta copies the unresolved choice");
    c.require(reaches_term(cal, duplicated, mixed),
              "duplication: q p reachable when the choice is duplicated first");

    std::vector<Term> flipped;
    for (const Step& s : enumerate_steps(cal, source))
      if (s.rule == "oplus") flipped.push_back(s.target);
    c.require(flipped.size() == 2, "duplication: the choice resolves two ways");
    bool unreachable = true;
    for (const Term& f : flipped) unreachable = unreachable && !reaches_term(cal, f, mixed);
    c.require(unreachable, "duplication: q p unreachable when the choice is resolved first");
    double s = secs_since(t0);
    c.require(s < 1.0, "duplication fixture took " + std::to_string(s) + " s");
  }

  return c;
}

// ---------------------------------------------------------------------------
// 2. Eta refutation with a fully explored finite search.

Criterion criterion2(const std::vector<CatalogEntry>& cat) {
  Criterion c("beta-eta head factorization refuted on the minimal abstraction, closed search, < 1 s");
  auto t0 = Clock::now();
  const Calculus& cal = entry(cat, "beta-eta").calculus;
  Term source = parse_term("λx.((λz.z) (λz.z)) ((λz.z) x)", {});
  Term unreachable_head_first = parse_term("(λz.z) (λz.z)", {});

  SearchBudget budget{100000};
  TermFactorization tf = factorize_term(cal, source, 4, budget);
  c.require(tf.closure_complete && tf.endpoints_complete,
            "reachability closure fully explored (finite, no budget cut)");
  long long refuted = 0;
  bool target_refuted = false;
  for (const EndpointResult& ep : tf.endpoints) {
    if (ep.verdict == Verdict::Refuted) ++refuted;
    if (alpha_eq(ep.endpoint, unreachable_head_first))
      target_refuted = ep.verdict == Verdict::Refuted;
  }
  c.require(target_refuted, "endpoint (λz.z) (λz.z) is refuted: no head-first route reaches it");
  c.note("endpoints examined: " + num(static_cast<long long>(tf.endpoints.size())) +
         ", refuted: " + num(refuted));
  double s = secs_since(t0);
  c.require(s < 1.0, "refutation took " + std::to_string(s) + " s");
  return c;
}

// ---------------------------------------------------------------------------
// 3. Choice-module head test over the exhaustive corpus.

Criterion criterion3(const std::vector<CatalogEntry>& cat) {
  Criterion c("choice-module head test, exhaustive corpus size <= 7: oracle, root swap, substitutivity");
  auto t0 = Clock::now();
  const CatalogEntry& e = entry(cat, "lambda-oplus");
  std::vector<Term> corpus = enumerate_corpus(e.corpus);
  c.note("corpus: " + num(static_cast<long long>(corpus.size())) + " terms, size <= " +
         num(static_cast<long long>(e.corpus.max_size)));

  Calculus module = e.calculus.restrict({"oplus"}, "oplus-only");
  FactorizationSummary oracle = factorization_oracle(module, corpus, 4, 100000);
  c.require(oracle.refuted == 0 && oracle.unknown == 0 && oracle.incomplete_terms == 0,
            "choice-only head oracle: " + num(oracle.endpoints) +
                " endpoints, 0 refutations, 0 unknowns");

  const CheckDescriptor& d = check_of(e, "root-swap-beta-oplus");
  const SwapSpec& swap = d.swap.value();
  c.require(swap.close_first.rules == std::vector<std::string>{"oplus"} &&
                swap.tail.rules == std::vector<std::string>{"beta"} && swap.tail_max == 1,
            "swap closes as one essential choice step then at most one beta step");
  SwapReport on_corpus = check_swap(e.calculus, swap, corpus, 100000);
  SwapReport on_family = check_swap(e.calculus, swap, detail::parse_family(e), 100000);
  c.require(on_corpus.failed == 0 && on_corpus.unknown == 0,
            "internal-beta-then-root-choice peaks close on the corpus (" + num(on_corpus.peaks) +
                " peaks)");
  c.require(on_family.failed == 0 && on_family.unknown == 0 && on_family.peaks > 0,
            "same swap on the constructed peak family (" + num(on_family.peaks) + " peaks)");

  std::vector<SubstTriple> triples = substitution_triples(e.corpus, corpus, false);
  SubstitutivityReport subst = check_substitutive("oplus", triples);
  c.require(subst.ok() && subst.checked > 0,
            "choice substitutivity: " + num(subst.checked) + " substituted reducts, 0 violations");

  double s = secs_since(t0);
  c.require(s < 300.0, "suite ran in " + std::to_string(s) + " s (target < 5 min)");
  return c;
}

// ---------------------------------------------------------------------------
// 4. Value-shuffling tests for the left and weak essential classes.

Criterion criterion4(const std::vector<CatalogEntry>& cat) {
  Criterion c("value-shuffling: sigma oracles definite, root swaps close, sigma substitutivity");
  for (const char* name : {"shuffling-left", "shuffling-weak"}) {
    const CatalogEntry& e = entry(cat, name);
    std::vector<Term> corpus = enumerate_corpus(e.corpus);

    Calculus sigma = e.calculus.restrict({"sigma1", "sigma3"}, std::string(name) + "-sigma");
    FactorizationSummary oracle = factorization_oracle(sigma, corpus, 4, 100000);
    c.require(oracle.holds_everywhere() && oracle.incomplete_terms == 0,
              std::string(name) + ": sigma-only oracle definite Holds (" + num(oracle.endpoints) +
                  " endpoints, 0 refuted, 0 unknown)");

    for (const char* id : {"root-swap-betav-sigma", "root-swap-sigma-sigma"}) {
      const SwapSpec& swap = check_of(e, id).swap.value();
      std::vector<Term> subject = corpus;
      std::vector<Term> family = detail::parse_family(e);
      subject.insert(subject.end(), family.begin(), family.end());
      SwapReport rep = check_swap(e.calculus, swap, subject, 100000);
      c.require(rep.failed == 0 && rep.unknown == 0 && rep.peaks > 0,
                std::string(name) + " " + id + ": " + num(rep.peaks) +
                    " peaks (corpus + family), all close with exactly one trailing step");
    }

    std::vector<SubstTriple> triples = substitution_triples(e.corpus, corpus, true);
    for (const char* rule : {"sigma1", "sigma3"}) {
      SubstitutivityReport subst = check_substitutive(rule, triples);
      c.require(subst.ok() && subst.checked > 0,
                std::string(name) + " " + rule + " substitutivity: " + num(subst.checked) +
                    " substituted reducts, 0 violations");
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// 5. Fixpoint-expansion suites: swaps allow no unknowns, oracles stay within
//    their frozen tolerance at the fixed reduced budget.

Criterion criterion5(const std::vector<CatalogEntry>& cat) {
  Criterion c("fixpoint expansion: root swaps close (no unknowns), substitutivity, oracle unknowns within tolerance");
  struct Row {
    const char* entry_name;
    const char* swap_id;
    const char* subst_rule;
    bool values_only;
  };
  for (const Row& row : {Row{"beta-y", "root-swap-beta-y", "Y", false},
                         Row{"betav-z", "root-swap-betav-z", "Z", true}}) {
    const CatalogEntry& e = entry(cat, row.entry_name);
    std::vector<Term> corpus = enumerate_corpus(e.corpus);

    const SwapSpec& swap = check_of(e, row.swap_id).swap.value();
    std::vector<Term> subject = corpus;
    std::vector<Term> family = detail::parse_family(e);
    subject.insert(subject.end(), family.begin(), family.end());
    SwapReport rep = check_swap(e.calculus, swap, subject, 100000);
    c.require(rep.failed == 0 && rep.unknown == 0 && rep.peaks > 0,
              std::string(row.entry_name) + " " + row.swap_id + ": " + num(rep.peaks) +
                  " peaks close, 0 failures, 0 unknowns");

    std::vector<SubstTriple> triples = substitution_triples(e.corpus, corpus, row.values_only);
    SubstitutivityReport subst = check_substitutive(row.subst_rule, triples);
    c.require(subst.ok() && subst.checked > 0,
              std::string(row.entry_name) + " " + row.subst_rule + " substitutivity: " +
                  num(subst.checked) + " substituted reducts, 0 violations");

    const CheckDescriptor& od = check_of(e, "factorization-oracle");
    FactorizationSummary oracle =
        factorization_oracle(e.calculus, corpus, 4, od.budget_override);
    c.require(oracle.refuted == 0,
              std::string(row.entry_name) + " union oracle: 0 refutations over " +
                  num(oracle.endpoints) + " endpoints");
    c.require(oracle.unknown <= od.unknown_tolerance,
              std::string(row.entry_name) + " union oracle unknowns " + num(oracle.unknown) +
                  " <= configured tolerance " + num(od.unknown_tolerance) +
                  " (non-terminating rule, fixed budget " + num(od.budget_override) + ")");
  }
  return c;
}

// ---------------------------------------------------------------------------
// 6. Shape preservation across every calculus corpus.

Criterion criterion6(const std::vector<CatalogEntry>& cat) {
  Criterion c("inessential steps preserve term shape (and redexes) across all calculi corpora");
  long long steps = 0;
  for (const CatalogEntry& e : cat) {
    std::vector<Term> corpus = enumerate_corpus(e.corpus);
    ShapeReport rep = check_shape_preservation(e.calculus, corpus);
    steps += static_cast<long long>(rep.steps_checked);
    c.require(rep.ok(), e.name + ": " + num(static_cast<long long>(rep.steps_checked)) +
                            " inessential steps, 0 shape violations");
  }
  c.note("total inessential steps checked: " + num(steps));
  return c;
}

// ---------------------------------------------------------------------------
// 7. Probabilistic suite: worked lift, surface swap, exact mass, embedding.

Criterion criterion7() {
  Criterion c("probabilistic lift suite: worked lift exact, surface swaps close, mass exact, embedding");
  CorpusSpec spec;
  spec.max_size = 6;
  spec.free_vars = {"x", "y"};
  spec.allow_choice = true;
  std::vector<Term> corpus = enumerate_corpus(spec);
  c.note("choice corpus: " + num(static_cast<long long>(corpus.size())) + " terms, size <= 6");

  MultiDist source({{Rational(1, 2), parse_term("(λx.x) z", {})},
                    {Rational(1, 2), parse_term("x (+) y", {})}});
  MultiDist target({{Rational(1, 2), parse_term("z", {})},
                    {Rational(1, 4), parse_term("x", {})},
                    {Rational(1, 4), parse_term("y", {})}});
  long long hits = 0;
  std::vector<MultiDist> lifts = lift(LiftKind::Union, source);
  for (const MultiDist& m : lifts)
    if (m == target) ++hits;
  c.require(hits == 1, "worked union lift reproduces [1/2 z, 1/4 x, 1/4 y] exactly once (" +
                           num(static_cast<long long>(lifts.size())) + " lifts)");

  ProbSwapReport swaps = check_prob_surface_swap(corpus);
  c.require(swaps.failed == 0 && swaps.peaks > 0,
            "internal-beta-then-choice peaks all close surface-first (" + num(swaps.peaks) +
                " peaks)");

  MassReport mass = check_mass_conservation(corpus, 2, 100000);
  c.require(mass.violations == 0 && mass.lifts > 0,
            "total mass conserved exactly on every enumerated lift (" + num(mass.lifts) +
                " lifts)");

  EmbeddingReport emb = check_betav_embedding(corpus);
  c.require(emb.mismatches == 0, "choice-free embedding bisimulates plain beta-v (" +
                                     num(emb.terms) + " terms, 0 mismatches)");
  c.require(emb.terms == 450, "embedding covered the full choice-free corpus (450 terms)");
  return c;
}

// ---------------------------------------------------------------------------
// 8. Every Holds witness replays step-by-step through the step enumerator.

Criterion criterion8(const std::vector<CatalogEntry>& cat) {
  Criterion c("witness replay: 100% of Holds witnesses re-execute and land on their endpoint");
  struct Slice {
    const char* entry_name;
    std::size_t max_size;
    long long budget;
  };
  long long verified = 0, bad = 0;
  for (const Slice& sl : {Slice{"beta-head", 6, 100000}, Slice{"lambda-oplus", 6, 100000},
                          Slice{"shuffling-left", 6, 100000}, Slice{"shuffling-weak", 6, 100000},
                          Slice{"beta-eta", 6, 100000}, Slice{"beta-y", 5, 2000},
                          Slice{"betav-z", 5, 2000}}) {
    const CatalogEntry& e = entry(cat, sl.entry_name);
    CorpusSpec spec = e.corpus;
    spec.max_size = sl.max_size;
    for (const Term& t : enumerate_corpus(spec)) {
      SearchBudget budget{sl.budget};
      TermFactorization tf = factorize_term(e.calculus, t, 4, budget);
      for (const EndpointResult& ep : tf.endpoints) {
        if (ep.verdict != Verdict::Holds) continue;
        ++verified;
        WitnessCheck w = verify_witness(e.calculus, t, ep.witness, true);
        const Term& last = ep.witness.empty() ? t : ep.witness.back().target;
        if (!w.ok || !alpha_eq(last, ep.endpoint)) ++bad;
      }
    }
  }
  c.require(bad == 0, "term witnesses: " + num(verified) + " replayed, " + num(bad) + " failures");
  c.require(verified > 1000, "term witness sample is non-trivial at these bounds");

  CorpusSpec pspec;
  pspec.max_size = 5;
  pspec.free_vars = {"x", "y"};
  pspec.allow_choice = true;
  long long pverified = 0, pbad = 0;
  for (const Term& t : enumerate_corpus(pspec)) {
    SearchBudget budget{20000};
    ProbFactorization pf = prob_factorize(MultiDist::point(t), 3, budget);
    for (const ProbEndpoint& ep : pf.endpoints) {
      if (ep.verdict != Verdict::Holds) continue;
      ++pverified;
      WitnessCheck w = verify_prob_witness(MultiDist::point(t), ep.witness, true);
      const MultiDist& last = ep.witness.empty() ? MultiDist::point(t) : ep.witness.back().target;
      if (!w.ok || !(last == ep.endpoint)) ++pbad;
    }
  }
  c.require(pbad == 0,
            "lift witnesses: " + num(pverified) + " replayed, " + num(pbad) + " failures");
  c.require(pverified > 100, "lift witness sample is exhaustive at these bounds");
  return c;
}

// ---------------------------------------------------------------------------
// 9. Independent cross-checks: a from-scratch corpus enumerator and a naive
//    essential*-then-inessential* path checker.

struct NaiveGrammar {
  std::vector<std::string> free_vars{"x", "y"};
  bool applied_oplus = false;
  bool allow_choice = false;
};

// Straightforward unmemoized recursion with an explicit scope of binder
// names; alpha-distinct by construction because binders are named by depth.
void naive_enum(std::size_t n, std::vector<std::string>& scope, const NaiveGrammar& g,
                std::vector<Term>& out) {
  if (n == 0) return;
  if (n == 1) {
    for (const std::string& v : g.free_vars) out.push_back(Term::var(v));
    for (const std::string& v : scope) out.push_back(Term::var(v));
    return;
  }
  {
    scope.push_back("n" + std::to_string(scope.size()));
    std::vector<Term> bodies;
    naive_enum(n - 1, scope, g, bodies);
    std::string binder = scope.back();
    scope.pop_back();
    for (const Term& b : bodies) out.push_back(Term::abs(binder, b));
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    std::vector<Term> funs, args;
    naive_enum(i, scope, g, funs);
    naive_enum(n - 1 - i, scope, g, args);
    for (const Term& f : funs)
      for (const Term& a : args) out.push_back(Term::app(f, a));
  }
  if (g.applied_oplus && n >= 5)
    for (std::size_t i = 1; i + 3 < n; ++i) {
      std::vector<Term> ls, rs;
      naive_enum(i, scope, g, ls);
      naive_enum(n - 3 - i, scope, g, rs);
      for (const Term& l : ls)
        for (const Term& r : rs)
          out.push_back(Term::app(Term::app(Term::con("oplus"), l), r));
    }
  if (g.allow_choice && n >= 3)
    for (std::size_t i = 1; i + 1 < n; ++i) {
      std::vector<Term> ls, rs;
      naive_enum(i, scope, g, ls);
      naive_enum(n - 1 - i, scope, g, rs);
      for (const Term& l : ls)
        for (const Term& r : rs) out.push_back(Term::choice(l, r));
    }
}

void cross_check_grammar(Criterion& c, const std::string& label, const CorpusSpec& spec,
                         const NaiveGrammar& g, const std::vector<long long>& frozen_counts) {
  std::map<std::size_t, std::vector<Term>> by_size;
  for (const Term& t : enumerate_corpus(spec)) by_size[t.size()].push_back(t);
  bool all_ok = true;
  std::string sizes;
  for (std::size_t n = 1; n <= spec.max_size; ++n) {
    std::vector<Term> naive;
    std::vector<std::string> scope;
    naive_enum(n, scope, g, naive);
    std::set<std::string> naive_keys, lib_keys;
    for (const Term& t : naive) naive_keys.insert(alpha_key(t));
    for (const Term& t : by_size[n]) lib_keys.insert(alpha_key(t));
    bool ok = naive_keys == lib_keys && naive_keys.size() == naive.size() &&
              lib_keys.size() == by_size[n].size();
    if (!frozen_counts.empty())
      ok = ok && static_cast<long long>(naive.size()) == frozen_counts[n - 1];
    all_ok = all_ok && ok;
    sizes += (n > 1 ? " " : "") + num(static_cast<long long>(naive.size()));
  }
  c.require(all_ok, label + ": per-size alpha-class sets agree with the naive enumerator (" +
                        sizes + ")");
}

Criterion criterion9(const std::vector<CatalogEntry>& cat) {
  Criterion c("independent cross-checks: naive corpus enumerator; naive phase-path oracle on 200 samples");

  {
    CorpusSpec spec;
    spec.max_size = 5;
    spec.free_vars = {"x", "y"};
    cross_check_grammar(c, "plain lambda grammar", spec, NaiveGrammar{}, {2, 3, 8, 26, 87});
  }
  {
    CorpusSpec spec;
    spec.max_size = 5;
    spec.free_vars = {"x", "y"};
    spec.constants = {"oplus"};
    NaiveGrammar g;
    g.applied_oplus = true;
    cross_check_grammar(c, "choice-constant grammar", spec, g, {});
  }
  {
    CorpusSpec spec;
    spec.max_size = 5;
    spec.free_vars = {"x", "y"};
    spec.allow_choice = true;
    NaiveGrammar g;
    g.allow_choice = true;
    cross_check_grammar(c, "choice-term grammar", spec, g, {2, 3, 12, 47, 200});
  }

  // Naive oracle: enumerate the mixed reachability set to the same depth,
  // then decide each endpoint by membership in the full essential*-then-
  // inessential* reach set (the sigma rules terminate, so both closures are
  // finite and need no budget).
  const CatalogEntry& e = entry(cat, "shuffling-left");
  Calculus sigma = e.calculus.restrict({"sigma1", "sigma3"}, "sigma-left");
  CorpusSpec rspec = e.corpus;
  rspec.mode = CorpusSpec::Mode::Random;
  rspec.seed = 20260815;
  rspec.count = 200;
  std::vector<Term> sample = enumerate_corpus(rspec);

  long long compared = 0, mismatches = 0;
  for (const Term& t : sample) {
    std::map<std::string, int> mixed;  // endpoint alpha class -> distance
    std::deque<std::pair<Term, int>> queue{{t, 0}};
    mixed[alpha_key(t)] = 0;
    while (!queue.empty()) {
      auto [cur, d] = queue.front();
      queue.pop_front();
      if (d == 3) continue;
      for (const Step& s : enumerate_steps(sigma, cur))
        if (mixed.emplace(alpha_key(s.target), d + 1).second) queue.emplace_back(s.target, d + 1);
    }

    std::unordered_set<std::string> phase_ordered;
    std::deque<Term> ess{t};
    phase_ordered.insert(alpha_key(t));
    std::vector<Term> ess_states{t};
    while (!ess.empty()) {
      Term cur = ess.front();
      ess.pop_front();
      for (const Step& s : enumerate_steps(sigma, cur, StepFilter::in(sigma.essential)))
        if (phase_ordered.insert(alpha_key(s.target)).second) {
          ess.push_back(s.target);
          ess_states.push_back(s.target);
        }
    }
    std::unordered_set<std::string> seen_internal;
    for (const Term& start : ess_states) {
      std::deque<Term> in{start};
      while (!in.empty()) {
        Term cur = in.front();
        in.pop_front();
        for (const Step& s : enumerate_steps(sigma, cur, StepFilter::not_in(sigma.essential))) {
          std::string k = alpha_key(s.target);
          phase_ordered.insert(k);
          if (seen_internal.insert(std::move(k)).second) in.push_back(s.target);
        }
      }
    }

    SearchBudget budget{100000};
    TermFactorization tf = factorize_term(sigma, t, 3, budget);
    if (tf.endpoints.size() != mixed.size()) ++mismatches;
    for (const EndpointResult& ep : tf.endpoints) {
      ++compared;
      std::string k = alpha_key(ep.endpoint);
      bool naive_holds = phase_ordered.count(k) > 0;
      bool agree = mixed.count(k) > 0 &&
                   ((ep.verdict == Verdict::Holds && naive_holds) ||
                    (ep.verdict == Verdict::Refuted && !naive_holds));
      if (!agree) ++mismatches;
    }
  }
  c.require(mismatches == 0, "sigma-only oracle agrees with the naive phase-path checker on " +
                                 num(static_cast<long long>(sample.size())) + " sampled terms (" +
                                 num(compared) + " endpoints)");
  c.require(compared > 200, "cross-check covered more endpoints than sources");
  return c;
}

}  // namespace

int main() {
  std::vector<CatalogEntry> cat = catalog();
  std::vector<Criterion> results;
  int index = 0;
  auto run = [&](auto&& fn) {
    ++index;
    auto t0 = Clock::now();
    Criterion c = [&]() {
      try {
        return fn();
      } catch (const std::exception& ex) {
        Criterion bad("criterion " + std::to_string(index));
        bad.require(false, std::string("exception: ") + ex.what());
        return bad;
      }
    }();
    c.seconds = secs_since(t0);
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << index << ". " << c.title << "  ("
              << c.seconds << " s)\n";
    for (const std::string& line : c.evidence) std::cout << "       " << line << "\n";
    results.push_back(std::move(c));
  };

  run([&] { return criterion1(cat); });
  run([&] { return criterion2(cat); });
  run([&] { return criterion3(cat); });
  run([&] { return criterion4(cat); });
  run([&] { return criterion5(cat); });
  run([&] { return criterion6(cat); });
  run([&] { return criterion7(); });
  run([&] { return criterion8(cat); });
  run([&] { return criterion9(cat); });

  int passed = 0;
  for (const Criterion& c : results) passed += c.pass ? 1 : 0;
  std::cout << "acceptance: " << passed << "/" << results.size() << " criteria passed\n";
  return passed == static_cast<int>(results.size()) ? 0 : 1;
}
