#include <catch2/catch_amalgamated.hpp>

#include "factorlab/engine.hpp"
#include "factorlab/gen.hpp"

using namespace factorlab;

namespace {
Term tt(const std::string& s) { return parse_term(s); }

const Calculus& lambda_oplus() {
  static const Calculus c = Calculus::make("lambda-oplus", {"beta", "oplus"}, ContextClass::Head,
                                           {"oplus"});
  return c;
}
const Calculus& beta_head() {
  static const Calculus c = Calculus::make("beta-head", {"beta"}, ContextClass::Head);
  return c;
}
const Calculus& shuffling() {
  static const Calculus c =
      Calculus::make("shuffling", {"betav", "sigma1", "sigma3"}, ContextClass::Left);
  return c;
}
}  // namespace

TEST_CASE("non-head steps of the motivating oplus term") {
  Term t = tt("(\\x.x x x) (oplus p q)");
  auto steps = enumerate_steps(lambda_oplus(), t, StepFilter::not_in(ContextClass::Head));
  REQUIRE(steps.size() == 2);
  CHECK(steps[0].rule == "oplus");
  CHECK(alpha_eq(steps[0].target, tt("(\\x.x x x) p")));
  CHECK(alpha_eq(steps[1].target, tt("(\\x.x x x) q")));
  CHECK(steps[0].pos == Position{Dir::Arg});
}

TEST_CASE("step enumeration order is position, then rule, then result") {
  // both a root beta step and inner oplus steps; root comes first
  Term t = tt("(\\x.x) (oplus p q)");
  auto steps = enumerate_steps(lambda_oplus(), t);
  REQUIRE(steps.size() == 3);
  CHECK(steps[0].rule == "beta");
  CHECK(steps[0].pos.empty());
  CHECK(steps[1].rule == "oplus");
  CHECK(alpha_eq(steps[1].target, tt("(\\x.x) p")));
  CHECK(steps[2].rule == "oplus");
  CHECK(alpha_eq(steps[2].target, tt("(\\x.x) q")));
}

TEST_CASE("alpha-duplicate results collapse to one step") {
  Term t = tt("oplus p p");
  auto steps = enumerate_steps(lambda_oplus(), t);
  REQUIRE(steps.size() == 1);
  CHECK(alpha_eq(steps[0].target, tt("p")));
}

TEST_CASE("root steps are in every class, so always essential") {
  for (const char* s : {"(\\x.x) y", "oplus p q"}) {
    auto steps = enumerate_steps(lambda_oplus(), tt(s));
    REQUIRE_FALSE(steps.empty());
    CHECK(steps[0].pos.empty());
    for (auto c : {ContextClass::Head, ContextClass::Left, ContextClass::Weak, ContextClass::Full})
      CHECK(steps[0].classes.contains(c));
  }
}

TEST_CASE("essential and inessential partition the step set") {
  CorpusSpec spec;
  spec.max_size = 5;
  spec.constants = {"oplus"};
  for (const Term& t : enumerate_corpus(spec)) {
    auto all = enumerate_steps(lambda_oplus(), t);
    auto ess = essential_steps(lambda_oplus(), t);
    auto iness = inessential_steps(lambda_oplus(), t);
    CHECK(all.size() == ess.size() + iness.size());
    for (const Step& s : ess) CHECK(s.classes.contains(ContextClass::Head));
    for (const Step& s : iness) CHECK_FALSE(s.classes.contains(ContextClass::Head));
  }
}

TEST_CASE("every enumerated step replays at its position") {
  CorpusSpec spec;
  spec.max_size = 6;
  for (const Term& t : enumerate_corpus(spec)) {
    for (const Step& s : enumerate_steps(shuffling(), t)) {
      Term sub = subterm_at(t, s.pos);
      bool found = false;
      for (const Term& r : root_apply(s.rule, sub))
        if (syntactic_eq(replace_at(t, s.pos, r), s.target)) found = true;
      CHECK(found);
      CHECK(classify(t, s.pos) == s.classes);
    }
  }
}

TEST_CASE("choice terms are rejected outside choice calculi") {
  CHECK_THROWS_AS(enumerate_steps(beta_head(), tt("x (+) y")), std::invalid_argument);
}

TEST_CASE("calculus json round-trips and validates") {
  nlohmann::json j = calculus_to_json(lambda_oplus());
  Calculus back = calculus_from_json(j);
  CHECK(back.name == "lambda-oplus");
  CHECK(back.rules == std::vector<std::string>{"beta", "oplus"});
  CHECK(back.essential == ContextClass::Head);
  CHECK(back.constants == std::set<std::string>{"oplus"});
  nlohmann::json bad = {{"name", "x"}, {"rules", {"nope"}}, {"essential", "head"}};
  CHECK_THROWS_AS(calculus_from_json(bad), std::invalid_argument);
}

TEST_CASE("beta is substitutive on an exhaustive triple stream") {
  CorpusSpec spec;
  spec.max_size = 6;
  auto corpus = enumerate_corpus(spec);
  auto triples = substitution_triples(spec, corpus, false);
  auto rep = check_substitutive("beta", triples);
  CHECK(rep.checked > 0);
  CHECK(rep.ok());
}

TEST_CASE("sigma rules are substitutive for value substituends") {
  CorpusSpec spec;
  spec.max_size = 6;
  auto corpus = enumerate_corpus(spec);
  auto triples = substitution_triples(spec, corpus, true);
  for (const char* rule : {"betav", "sigma1", "sigma3"}) {
    auto rep = check_substitutive(rule, triples);
    CHECK(rep.checked > 0);
    CHECK(rep.ok());
  }
}

TEST_CASE("a hand-built substitutivity violation is reported") {
  // Z is substitutive only along value substituends: Z x with x := y y
  // destroys the redex.
  std::vector<SubstTriple> triples = {{tt("Z x"), "x", tt("y y")}};
  auto rep = check_substitutive("Z", triples);
  REQUIRE(rep.violations.size() == 1);
  CHECK(alpha_eq(rep.violations[0].triple.redex, tt("Z x")));
}

TEST_CASE("inessential steps preserve shapes on a small corpus") {
  CorpusSpec spec;
  spec.max_size = 6;
  spec.constants = {"oplus"};
  auto corpus = enumerate_corpus(spec);
  auto rep = check_shape_preservation(lambda_oplus(), corpus);
  CHECK(rep.steps_checked > 0);
  CHECK(rep.ok());

  CorpusSpec pure;
  pure.max_size = 6;
  auto rep2 = check_shape_preservation(shuffling(), enumerate_corpus(pure));
  CHECK(rep2.steps_checked > 0);
  CHECK(rep2.ok());
}

TEST_CASE("step json carries the replayable fields") {
  Term t = tt("(\\x.x) (oplus p q)");
  auto steps = enumerate_steps(lambda_oplus(), t, StepFilter::not_in(ContextClass::Head));
  REQUIRE_FALSE(steps.empty());
  nlohmann::json j = step_to_json(steps[0]);
  CHECK(j.at("rule") == "oplus");
  CHECK(j.at("pos") == nlohmann::json::array({"arg"}));
  CHECK(j.at("source") == to_text(t));
}
