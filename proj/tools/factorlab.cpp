// factorlab — batch front end for the factorization laboratory.
//
// Subcommands
//   list     print the calculus catalog with each check's expected outcome
//   check    run catalog suites (or one calculus / one check) and compare
//            against expectations
//   demo     replay the worked demonstration transcripts
//   search   scan a corpus for failing swap peaks of a configured rule pair
//
// Exit codes
//   0   everything matched its expected outcome (expected failures count as
//       matches), or the demo transcripts verified, or the search ran
//   1   some check landed on the wrong side of its expectation
//   2   no definite counterexample, but inconclusive (budget-bound) verdicts
//       exceeded the configured tolerance — raise --budget
//   64  usage or configuration error

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "factorlab/calculi.hpp"

using namespace factorlab;

namespace {

constexpr const char* kProbName = "prob-cbv";
constexpr const char* kProbClaim =
    "Surface-first factorization of call-by-value reduction with binary "
    "probabilistic choice, lifted to multi-distributions with exact rational "
    "weights.";

struct CommonOpts {
  std::string calculus;
  std::string suite;
  std::string essential;
  std::size_t max_size = 0;  // 0: each suite's standard bound
  int seq_depth = 4;
  int path_bound = 6;
  long long budget = 100000;
  std::uint64_t seed = 0;  // 0: exhaustive corpus; else seeded random (500 samples)
  std::string format = "text";
  std::string out;

  RunOptions run_options() const {
    RunOptions opt;
    opt.max_size = max_size;
    opt.seq_depth = seq_depth;
    opt.path_bound = path_bound;
    opt.budget = budget;
    opt.seed = seed;
    return opt;
  }
};

void add_bounds(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--max-size", o.max_size,
                  "Corpus size bound in nodes (default: the suite's standard bound; "
                  "7 for term calculi, 6 for " +
                      std::string(kProbName) + ")");
  cmd->add_option("--seq-depth", o.seq_depth, "Reduction-sequence depth for oracles")
      ->capture_default_str();
  cmd->add_option("--path-bound", o.path_bound, "Trailing-phase length bound for swap closes")
      ->capture_default_str();
  cmd->add_option("--budget", o.budget, "Per-term search budget (env FACTORLAB_BUDGET)")
      ->envname("FACTORLAB_BUDGET")
      ->capture_default_str();
  cmd->add_option("--seed", o.seed,
                  "Use a seeded random corpus of 500 samples instead of the exhaustive one");
}

void add_output(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--format", o.format, "Report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  cmd->add_option("--out", o.out, "Write the report to this file (atomically) instead of stdout");
}

// Reports are written whole: to a temp file in the target directory, then
// renamed over the destination, so readers never observe a partial file.
void emit(const CommonOpts& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  namespace fs = std::filesystem;
  fs::path target(o.out);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << text;
  }
  fs::rename(tmp, target);
}

std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// list

std::string list_text() {
  std::ostringstream os;
  for (const CatalogEntry& e : catalog()) {
    os << e.name << "  (rules:";
    for (const std::string& r : e.calculus.rules) os << " " << r;
    os << "; essential: " << class_name(e.calculus.essential) << ")\n";
    os << "    " << e.claim << "\n";
    if (!e.notes.empty()) os << "    note: " << e.notes << "\n";
    os << "    checks:";
    for (const CheckDescriptor& d : e.checks)
      os << " " << d.id << (d.expected_pass ? " [pass]" : " [expected FAIL]");
    os << "\n\n";
  }
  os << kProbName << "  (rules: betav oplus-lifted; essential: surface)\n";
  os << "    " << kProbClaim << "\n";
  os << "    checks: worked-lift [pass] surface-swap [pass] mass-conservation [pass]"
        " embedding [pass] factorization-oracle [pass]\n";
  return os.str();
}

nlohmann::json list_json() {
  nlohmann::json j = catalog_to_json();
  j.push_back(nlohmann::json{
      {"name", kProbName},
      {"rules", {"betav", "oplus-lifted"}},
      {"essential", "surface"},
      {"claim", kProbClaim},
      {"notes",
       "multi-distribution suite; runs beside the term catalog with its own fixed checks"},
      {"peak_family", nlohmann::json::array()},
      {"checks",
       {nlohmann::json{{"id", "worked-lift"}, {"expected", "pass"}},
        nlohmann::json{{"id", "surface-swap"}, {"expected", "pass"}},
        nlohmann::json{{"id", "mass-conservation"}, {"expected", "pass"}},
        nlohmann::json{{"id", "embedding"}, {"expected", "pass"}},
        nlohmann::json{{"id", "factorization-oracle"}, {"expected", "pass"}}}}});
  return j;
}

// ---------------------------------------------------------------------------
// check

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CheckPlan {
  std::vector<std::string> entries;  // catalog entry names, in catalog order
  bool prob = false;
};

CheckPlan resolve_targets(const std::vector<CatalogEntry>& cat, const CommonOpts& o) {
  CheckPlan plan;
  if (o.calculus.empty() || o.calculus == "all") {
    for (const CatalogEntry& e : cat) plan.entries.push_back(e.name);
    plan.prob = true;
    return plan;
  }
  if (o.calculus == kProbName) {
    if (!o.essential.empty() && o.essential != "weak")
      throw UsageError("the probabilistic suite's essential class is fixed (surface/weak)");
    plan.prob = true;
    return plan;
  }
  std::string name = o.calculus;
  if (name == "shuffling") {
    if (o.essential != "left" && o.essential != "weak")
      throw UsageError("--calculus shuffling needs --essential left or --essential weak");
    name += "-" + o.essential;
  }
  const CatalogEntry* e = find_entry(cat, name);
  if (!e) throw UsageError("unknown calculus: " + o.calculus + " (see `factorlab list`)");
  if (!o.essential.empty() && o.essential != class_name(e->calculus.essential))
    throw UsageError("calculus " + name + " is " + class_name(e->calculus.essential) +
                     "-essential, not " + o.essential);
  plan.entries.push_back(name);
  return plan;
}

const char* status_tag(const CheckOutcome& c) {
  if (c.matched) return "[ ok ]";
  return c.unknown_excess ? "[ ?? ]" : "[FAIL]";
}

void render_checks_text(std::ostringstream& os, const std::vector<CheckOutcome>& checks) {
  for (const CheckOutcome& c : checks) {
    os << "  " << status_tag(c) << " " << c.desc.id << "  (expected "
       << (c.desc.expected_pass ? "pass" : "fail") << ", got "
       << (c.passed ? "pass" : "fail") << ")  " << c.detail;
    if (c.unknown_excess) os << "  <- inconclusive beyond tolerance, raise --budget";
    os << "\n";
  }
}

int exit_code_for(const std::vector<CheckOutcome>& all) {
  bool any_hard = false, any_excess = false;
  for (const CheckOutcome& c : all) {
    if (c.matched) continue;
    (c.unknown_excess ? any_excess : any_hard) = true;
  }
  if (any_hard) return 1;
  if (any_excess) return 2;
  return 0;
}

nlohmann::json config_json(const CommonOpts& o) {
  return nlohmann::json{{"calculus", o.calculus.empty() ? "all" : o.calculus},
                        {"suite", o.suite},
                        {"essential", o.essential},
                        {"max_size", o.max_size},
                        {"seq_depth", o.seq_depth},
                        {"path_bound", o.path_bound},
                        {"budget", o.budget},
                        {"seed", o.seed}};
}

int cmd_check(const CommonOpts& o) {
  const std::vector<CatalogEntry> cat = catalog();
  CheckPlan plan = resolve_targets(cat, o);
  RunOptions opt = o.run_options();
  std::vector<std::string> only;
  if (!o.suite.empty()) only.push_back(o.suite);
  const std::vector<std::string>* filter = only.empty() ? nullptr : &only;

  std::vector<EntryRun> runs;
  std::optional<ProbSuiteRun> prob;
  std::vector<CheckOutcome> all;
  for (const std::string& name : plan.entries) {
    runs.push_back(run_entry(*find_entry(cat, name), opt, filter));
    all.insert(all.end(), runs.back().checks.begin(), runs.back().checks.end());
  }
  if (plan.prob) {
    prob = run_prob_suite(opt, filter);
    all.insert(all.end(), prob->checks.begin(), prob->checks.end());
  }
  if (all.empty())
    throw UsageError("no check named '" + o.suite + "' in the selected suites");

  int code = exit_code_for(all);

  if (o.format == "json") {
    nlohmann::json jruns = nlohmann::json::array();
    for (const EntryRun& r : runs) jruns.push_back(entry_run_to_json(r));
    if (prob) jruns.push_back(prob_suite_run_to_json(*prob));
    emit(o, json_text(nlohmann::json{{"command", "check"},
                                     {"config", config_json(o)},
                                     {"runs", jruns},
                                     {"all_matched", code == 0},
                                     {"exit_code", code}}));
    return code;
  }

  std::ostringstream os;
  std::size_t matched = 0;
  for (const EntryRun& r : runs) {
    os << r.entry << "  (" << r.corpus_terms << " corpus terms)\n";
    render_checks_text(os, r.checks);
  }
  if (prob) {
    os << kProbName << "  (" << prob->corpus_terms << " corpus terms)\n";
    render_checks_text(os, prob->checks);
  }
  for (const CheckOutcome& c : all) matched += c.matched ? 1 : 0;
  os << "summary: " << matched << "/" << all.size() << " checks matched expectations\n";
  emit(o, os.str());
  return code;
}

// ---------------------------------------------------------------------------
// demo

int cmd_demo(const CommonOpts& o, const std::string& name) {
  std::vector<std::string> names = name.empty() ? demo_names() : std::vector<std::string>{name};
  std::vector<Demo> demos;
  for (const std::string& n : names) {
    try {
      demos.push_back(run_demo(n));
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string(e.what()) + " (see `factorlab demo --help`)");
    }
  }
  bool ok = std::all_of(demos.begin(), demos.end(), [](const Demo& d) { return d.ok; });

  if (o.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const Demo& d : demos) arr.push_back(demo_to_json(d));
    emit(o, json_text(
                nlohmann::json{{"command", "demo"}, {"demos", arr}, {"all_verified", ok}}));
  } else {
    std::ostringstream os;
    for (const Demo& d : demos) {
      os << "== " << d.name << ": " << d.title << "\n";
      for (const std::string& l : d.lines) os << l << "\n";
      os << (d.ok ? "verified.\n\n" : "TRANSCRIPT FAILED VERIFICATION\n\n");
    }
    emit(o, os.str());
  }
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// search

int cmd_search(const CommonOpts& o, std::vector<std::string> alpha, std::vector<std::string> gamma,
               const std::string& close_scope) {
  const std::vector<CatalogEntry> cat = catalog();
  ContextClass essential = ContextClass::Head;
  CorpusSpec spec;
  spec.max_size = o.max_size ? o.max_size : 7;
  spec.free_vars = {"x", "y"};
  if (!o.calculus.empty()) {
    CheckPlan plan = resolve_targets(cat, o);
    if (plan.entries.size() != 1)
      throw UsageError("search needs a single calculus (or none for plain lambda terms)");
    const CatalogEntry& e = *find_entry(cat, plan.entries.front());
    essential = e.calculus.essential;
    spec.constants.assign(e.calculus.constants.begin(), e.calculus.constants.end());
  } else if (!o.essential.empty()) {
    essential = class_from_name(o.essential);
  }

  std::vector<std::string> rules = alpha;
  rules.insert(rules.end(), gamma.begin(), gamma.end());
  std::sort(rules.begin(), rules.end());
  rules.erase(std::unique(rules.begin(), rules.end()), rules.end());
  for (const std::string& r : rules)
    for (const std::string& c : {std::string("oplus"), std::string("Y"), std::string("Z")})
      if (r == c && std::find(spec.constants.begin(), spec.constants.end(), c) ==
                        spec.constants.end())
        spec.constants.push_back(c);

  Calculus cal;
  try {
    cal = Calculus::make("search", rules, essential,
                         std::set<std::string>(spec.constants.begin(), spec.constants.end()));
  } catch (const std::exception& e) {
    throw UsageError(std::string("bad rule pair: ") + e.what());
  }
  if (o.seed) {
    spec.mode = CorpusSpec::Mode::Random;
    spec.seed = o.seed;
    spec.count = 500;
  }

  SwapSpec swap = make_root_linear_swap(alpha, gamma, o.path_bound,
                                        close_scope == "root" ? Scope::Root : Scope::Essential);
  std::vector<Term> corpus = enumerate_corpus(spec);
  SwapReport rep = check_swap(cal, swap, corpus, o.budget);

  if (o.format == "json") {
    nlohmann::json minimal;  // corpus is size-ordered, so the first failure is minimal
    if (!rep.failures.empty()) minimal = peak_case_to_json(rep.failures.front());
    emit(o, json_text(nlohmann::json{{"command", "search"},
                                     {"config", config_json(o)},
                                     {"swap", swap.name},
                                     {"corpus_terms", corpus.size()},
                                     {"report", swap_report_to_json(rep)},
                                     {"minimal_failure", minimal}}));
  } else {
    std::ostringstream os;
    os << "search " << swap.name << " over " << corpus.size() << " terms (size <= "
       << spec.max_size << ")\n";
    os << "peaks: " << rep.peaks << ", closed: " << rep.closed << ", failed: " << rep.failed
       << ", inconclusive: " << rep.unknown << "\n";
    if (!rep.failures.empty()) {
      const PeakCase& p = rep.failures.front();
      os << "size-minimal failing peak (" << p.first.source.size() << " nodes):\n";
      os << "  " << to_text(p.first.source) << "\n";
      os << "    -[" << p.first.rule << "]-> " << to_text(p.first.target) << "\n";
      os << "    -[" << p.second.rule << "]-> " << to_text(p.second.target) << "\n";
    } else if (rep.failed == 0) {
      os << "no failing peaks found\n";
    }
    emit(o, os.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"factorlab: bounded-search laboratory for factorization of term rewriting"};
  app.require_subcommand(1);

  CommonOpts o;

  CLI::App* list = app.add_subcommand("list", "Print the calculus catalog and expected outcomes");
  add_output(list, o);

  CLI::App* check = app.add_subcommand("check", "Run catalog suites and compare to expectations");
  check->add_option("--calculus", o.calculus,
                    "Catalog entry (default: all; `shuffling` needs --essential)");
  check->add_option("--suite", o.suite, "Run only the check with this id");
  check->add_option("--essential", o.essential, "Essential context class for ambiguous names")
      ->check(CLI::IsMember({"head", "left", "weak"}));
  add_bounds(check, o);
  add_output(check, o);

  CLI::App* demo = app.add_subcommand("demo", "Replay one or all demonstration transcripts");
  std::string demo_name;
  demo->add_option("name", demo_name,
                   "Demo name (default: all). Known: nd-duplication, sigma-overlaps, "
                   "beta-eta-counterexample, head-factorize-example, oplus-factorize-example, "
                   "prob-lift");
  add_output(demo, o);

  CLI::App* search =
      app.add_subcommand("search", "Scan for failing root-swap peaks of a rule pair");
  std::vector<std::string> alpha, gamma;
  std::string close_scope = "essential";
  search->add_option("--alpha", alpha, "Rule(s) of the first (inessential) peak step")
      ->required()
      ->delimiter(',');
  search->add_option("--gamma", gamma, "Rule(s) of the second (root) peak step")
      ->required()
      ->delimiter(',');
  search->add_option("--close-scope", close_scope, "Scope of the closing gamma step")
      ->check(CLI::IsMember({"essential", "root"}))
      ->capture_default_str();
  search->add_option("--calculus", o.calculus,
                     "Borrow constants and essential class from this catalog entry");
  search->add_option("--essential", o.essential, "Essential class when no --calculus is given")
      ->check(CLI::IsMember({"head", "left", "weak"}));
  add_bounds(search, o);
  add_output(search, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }

  try {
    if (app.got_subcommand(list)) {
      emit(o, o.format == "json" ? json_text(list_json()) : list_text());
      return 0;
    }
    if (app.got_subcommand(check)) return cmd_check(o);
    if (app.got_subcommand(demo)) return cmd_demo(o, demo_name);
    if (app.got_subcommand(search)) return cmd_search(o, alpha, gamma, close_scope);
  } catch (const UsageError& e) {
    std::cerr << "factorlab: " << e.what() << "\n";
    return 64;
  } catch (const std::exception& e) {
    std::cerr << "factorlab: error: " << e.what() << "\n";
    return 1;
  }
  return 64;
}
